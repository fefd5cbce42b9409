#include "covermech/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "covermech/errors.hpp"

namespace covermech {

using nlohmann::json;

json to_json(const VCInstance& inst) {
  json edges = json::array();
  for (auto [u, v] : inst.graph.edges()) edges.push_back({u, v});
  json agents = json::array();
  for (int i = 0; i < inst.num_agents(); ++i) {
    agents.push_back({{"nodes", inst.owners.sets[i]}, {"costs", inst.costs[i]}});
  }
  return {{"graph", {{"n", inst.graph.num_nodes()}, {"edges", edges}}}, {"agents", agents}};
}

json to_json(const UFLInstance& inst) {
  json fac = json::array();
  for (int l = 0; l < inst.num_facilities(); ++l) {
    fac.push_back({{"agent", inst.facility_agent[l]}, {"open_cost", inst.open_cost[l]}});
  }
  return {{"facilities", fac}, {"clients", inst.num_clients}, {"assign_cost", inst.assign_cost}};
}

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw ParseError(field + ": " + why);
}

const json& member(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(path + "." + key, "missing");
  return *it;
}

long long as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) bad(path, "expected an integer");
  return j.get<long long>();
}

double as_real(const json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(path, "not finite");
  if (v < 0) bad(path, "negative cost");
  return v;
}

const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array");
  return j;
}

}  // namespace

VCInstance vc_instance_from_json(const json& j) {
  const json& gj = member(j, "graph", "$");
  const long long n = as_int(member(gj, "n", "graph"), "graph.n");
  if (n < 0) bad("graph.n", "negative node count");
  const json& ej = as_array(member(gj, "edges", "graph"), "graph.edges");
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < ej.size(); ++k) {
    const std::string path = "graph.edges[" + std::to_string(k) + "]";
    if (!ej[k].is_array() || ej[k].size() != 2) bad(path, "expected a pair");
    const long long u = as_int(ej[k][0], path + "[0]");
    const long long v = as_int(ej[k][1], path + "[1]");
    if (u < 0 || v < 0 || u >= n || v >= n) bad(path, "node id out of range");
    if (u >= v) bad(path, "pair must list the smaller id first (self-loops rejected)");
    edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
  }
  std::vector<Edge> sorted = edges;
  std::sort(sorted.begin(), sorted.end());
  if (auto dup = std::adjacent_find(sorted.begin(), sorted.end()); dup != sorted.end()) {
    bad("graph.edges", "duplicate edge [" + std::to_string(dup->first) + "," +
                           std::to_string(dup->second) + "]");
  }
  VCInstance inst;
  inst.graph = Graph(static_cast<int>(n), std::move(edges));

  const json& aj = as_array(member(j, "agents", "$"), "agents");
  for (std::size_t i = 0; i < aj.size(); ++i) {
    const std::string path = "agents[" + std::to_string(i) + "]";
    const json& nodes = as_array(member(aj[i], "nodes", path), path + ".nodes");
    const json& costs = as_array(member(aj[i], "costs", path), path + ".costs");
    std::vector<int> set;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const long long u = as_int(nodes[k], path + ".nodes[" + std::to_string(k) + "]");
      if (u < 0 || u >= n) bad(path + ".nodes[" + std::to_string(k) + "]", "node id out of range");
      set.push_back(static_cast<int>(u));
    }
    if (costs.size() != nodes.size()) {
      bad(path + ".costs", "has " + std::to_string(costs.size()) + " entries for " +
                               std::to_string(nodes.size()) + " owned nodes (cost for unowned node)");
    }
    std::vector<double> c;
    for (std::size_t k = 0; k < costs.size(); ++k) {
      c.push_back(as_real(costs[k], path + ".costs[" + std::to_string(k) + "]"));
    }
    // Keep costs aligned with the sorted node list.
    std::vector<std::size_t> order(set.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return set[a] < set[b]; });
    std::vector<int> sset;
    std::vector<double> scost;
    for (auto k : order) {
      sset.push_back(set[k]);
      scost.push_back(c[k]);
    }
    if (std::adjacent_find(sset.begin(), sset.end()) != sset.end()) bad(path + ".nodes", "repeated node");
    inst.owners.sets.push_back(std::move(sset));
    inst.costs.push_back(std::move(scost));
  }
  return inst;
}

UFLInstance ufl_instance_from_json(const json& j) {
  UFLInstance inst;
  const json& fj = as_array(member(j, "facilities", "$"), "facilities");
  for (std::size_t l = 0; l < fj.size(); ++l) {
    const std::string path = "facilities[" + std::to_string(l) + "]";
    const long long a = as_int(member(fj[l], "agent", path), path + ".agent");
    if (a < 0) bad(path + ".agent", "negative agent id");
    inst.facility_agent.push_back(static_cast<int>(a));
    inst.open_cost.push_back(as_real(member(fj[l], "open_cost", path), path + ".open_cost"));
  }
  const long long nd = as_int(member(j, "clients", "$"), "clients");
  if (nd < 0) bad("clients", "negative client count");
  inst.num_clients = static_cast<int>(nd);
  const json& cj = as_array(member(j, "assign_cost", "$"), "assign_cost");
  if (cj.size() != fj.size()) bad("assign_cost", "expected one row per facility");
  for (std::size_t l = 0; l < cj.size(); ++l) {
    const std::string path = "assign_cost[" + std::to_string(l) + "]";
    const json& row = as_array(cj[l], path);
    if (static_cast<long long>(row.size()) != nd) bad(path, "expected one entry per client");
    std::vector<double> r;
    for (std::size_t k = 0; k < row.size(); ++k) r.push_back(as_real(row[k], path + "[" + std::to_string(k) + "]"));
    inst.assign_cost.push_back(std::move(r));
  }
  return inst;
}

bool is_ufl_document(const json& j) { return j.is_object() && j.contains("facilities"); }

namespace {

void write_text(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

}  // namespace

void save_instance(const std::string& path, const VCInstance& inst) { write_text(path, to_json(inst)); }
void save_instance(const std::string& path, const UFLInstance& inst) { write_text(path, to_json(inst)); }

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
    throw ParseError(path + ":" + std::to_string(line) + ": malformed JSON");
  }
}

VCInstance load_vc_instance(const std::string& path) {
  try {
    return vc_instance_from_json(load_json(path));
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    throw ParseError(path + ": " + msg);
  }
}

UFLInstance load_ufl_instance(const std::string& path) {
  try {
    return ufl_instance_from_json(load_json(path));
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    throw ParseError(path + ": " + msg);
  }
}

}  // namespace covermech
