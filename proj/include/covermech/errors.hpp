#ifndef COVERMECH_ERRORS_HPP
#define COVERMECH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace covermech {

// Input exceeds a hard-coded brute-force limit.
struct SizeLimitExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed instance file; message carries line or field context.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Caller-side precondition (ownership shape, gamma too small, ...).
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A threshold read a cost it is not allowed to depend on.
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// Randomized construction hit its round guard; message includes the seed.
struct LoopGuardExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Allocation rule lost a node after its owner lowered the node's cost.
struct MonotonicityViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// Neighbor threshold never reaches 1 inside the probe range.
struct UnboundedThreshold : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Neighbor threshold is already at least 1 for a zero neighbor cost.
struct DegenerateThreshold : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Removing an agent leaves the facility LP infeasible.
struct MonopolyViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Pricing could not separate a dual point with objective below 1.
struct LMPViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace covermech

#endif  // COVERMECH_ERRORS_HPP
