#ifndef COVERMECH_IO_HPP
#define COVERMECH_IO_HPP

#include <string>

#include <json.hpp>

#include "covermech/instance.hpp"

namespace covermech {

nlohmann::json to_json(const VCInstance& inst);
nlohmann::json to_json(const UFLInstance& inst);

// Both throw ParseError naming the offending field.
VCInstance vc_instance_from_json(const nlohmann::json& j);
UFLInstance ufl_instance_from_json(const nlohmann::json& j);

/// True when the document looks like a facility-location instance.
bool is_ufl_document(const nlohmann::json& j);

void save_instance(const std::string& path, const VCInstance& inst);
void save_instance(const std::string& path, const UFLInstance& inst);
nlohmann::json load_json(const std::string& path);  // ParseError with line context
VCInstance load_vc_instance(const std::string& path);
UFLInstance load_ufl_instance(const std::string& path);

}  // namespace covermech

#endif  // COVERMECH_IO_HPP
