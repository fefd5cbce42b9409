#ifndef COVERMECH_VERIFY_HPP
#define COVERMECH_VERIFY_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "covermech/graph.hpp"
#include "covermech/instance.hpp"
#include "covermech/parallel.hpp"
#include "covermech/threshold.hpp"
#include "covermech/ufl.hpp"

namespace covermech {

/// Allocation rule: per-node selection flags for a reported instance.
using VCAlgorithm = std::function<std::vector<char>(const VCInstance&)>;
using VCMechanism = std::function<MechanismResult(const VCInstance&)>;
/// Draws a context; must be a pure function of the generator state.
using VCSampler = std::function<VCInstance(std::mt19937_64&)>;
/// Node-cost algorithm returning a node list.
using NodeAlgorithm = std::function<std::vector<int>(const Graph&, std::span<const double>)>;

VCAlgorithm allocation_of(VCMechanism mech);
VCAlgorithm on_node_costs(NodeAlgorithm alg);

// Known non-monotone algorithms.

/// Canonical half-integral LP optimum; keeps nodes with x_u >= 1/2.
std::vector<int> lp_rounding_algorithm(const Graph& g, std::span<const double> cost);

/// Raises each edge dual as far as feasible, in the given order of edge
/// indices; returns the nodes whose cost is fully paid.
std::vector<int> ordered_primal_dual(const Graph& g, std::span<const double> cost, std::span<const int> edge_order);
std::vector<int> ordered_primal_dual(const Graph& g, std::span<const double> cost);  // edge index order

/// Raises all unfrozen edge duals at the same rate; an edge freezes once an
/// endpoint is paid. Returns the paid nodes.
std::vector<int> simultaneous_primal_dual(const Graph& g, std::span<const double> cost);

// Weak monotonicity.

struct WMONWitness {
  long probe = -1;
  int agent = -1;
  VCInstance context;              // reports c, agent's row is c_i
  std::vector<double> deviation;   // c'_i, aligned with owners.sets[agent]
  std::vector<char> a, b;          // allocations under c and c'
  double lhs = 0;                  // c_i(a) - c_i(b)
  double rhs = 0;                  // c'_i(a) - c'_i(b)
};

/// Runs alg on c and on (c'_i, c_-i); a witness when lhs > rhs + 1e-9.
std::optional<WMONWitness> wmon_compare(const VCAlgorithm& alg, const VCInstance& inst, int agent,
                                        std::span<const double> deviation);

/// Halves c'_i - c_i while the violation persists, then resets single
/// coordinates to c_i where that keeps it.
WMONWitness shrink_witness(const VCAlgorithm& alg, WMONWitness w);

/// Re-runs the algorithm on both reports and confirms the inequality.
bool replay_witness(const VCAlgorithm& alg, const WMONWitness& w);

struct WMONReport {
  long probes = 0;
  long violations = 0;
  std::vector<WMONWitness> witnesses;  // the first few by probe index, shrunk
};

struct WMONOptions {
  std::size_t keep = 16;
  bool shrink = true;
  Exec exec = Exec::parallel;
};

/// Probe k draws its context and deviation from a generator seeded by
/// (seed, k): uniform resampling of c_i, one coordinate decreased, or every
/// coordinate decreased. Results do not depend on the thread count.
WMONReport wmon_check(const VCAlgorithm& alg, const VCSampler& sampler, long probes, std::uint64_t seed,
                      WMONOptions opt = {});

// Truthfulness, IR and approximation.

struct TruthReport {
  double max_gain = 0;  // best utility gain from a misreport (0 if none helps)
  int agent = -1;
  std::vector<double> misreport;
  long evaluations = 0;
};

/// Each agent tries, per owned node and for all nodes at once, reports c*f
/// and scale*f for grid_size factors f geometric in [1/8, 8] plus f = 0,
/// where scale is the largest node cost.
TruthReport truthfulness_check(const VCMechanism& mech, const VCInstance& inst, int grid_size = 9,
                               Exec exec = Exec::parallel);

/// Largest (cost of provided nodes - payment) over agents, floored at 0.
double ir_violation(const VCInstance& inst, const MechanismResult& r);

/// Mechanism cost over the exact optimum (n <= 24); 1 when both are 0.
double approximation_ratio(const VCInstance& inst, const MechanismResult& r);

/// Exact expected-utility gain over a misreport grid for the facility
/// mechanism. With at most max_product grid points an agent tries every
/// combination over its facilities, otherwise one facility at a time plus
/// all facilities scaled together.
TruthReport ufl_truthfulness_check(const UFLInstance& inst, std::span<const double> factors, std::uint64_t seed,
                                   UFLOptions opt = {}, long max_product = 343, Exec exec = Exec::parallel);

// Frugality.

struct FrugalityReport {
  double nu = 0;
  std::vector<int> cover;  // the min-cost cover S used
  double payment = 0;
  double ratio = 0;  // payment / nu; 0 when both vanish
  int constraints = 0;
};

/// nu(G, c) over inclusion-minimal covers with S = min_vertex_cover_exact.
double frugality_nu(const Graph& g, std::span<const double> cost);
/// Same with a caller-chosen min-cost cover S.
double frugality_nu(const Graph& g, std::span<const double> cost, std::span<const int> cover, int* rows = nullptr);
/// Reference: one constraint per vertex cover, minimal or not (n <= 16).
double frugality_nu_all_covers(const Graph& g, std::span<const double> cost, std::span<const int> cover);

FrugalityReport frugality_report(const Graph& g, std::span<const double> cost, double payment);

struct FrugalityEstimate {
  double estimate = 0;  // lower bound on the frugality ratio
  std::vector<double> costs;
  long evaluations = 0;
};

/// Random node costs for half the trials, then hill climbing from the best.
FrugalityEstimate frugality_ratio_estimate(const VCMechanism& mech, const VCSkeleton& skeleton, int trials,
                                           std::uint64_t seed);

// Regression fixtures for the non-monotone algorithms.

struct WMONFixture {
  std::string name;
  VCInstance instance;
  int agent = 0;
  std::vector<double> deviation;
  VCAlgorithm algorithm;
  std::vector<int> first, second;  // expected outputs under c and c'
  double lhs = 0, rhs = 0;         // expected sides
};

/// 5-cycle u-a-b-v-d with u, v owned by agent 0 under LP rounding; path
/// u-x-y-v with agent 0 owning the endpoints under ordered and simultaneous
/// dual ascent.
std::vector<WMONFixture> wmon_fixtures();

/// The fixture's context with every cost scaled by an independent factor in
/// [1 - spread, 1 + spread].
VCSampler jitter_sampler(const VCInstance& base, double spread);

/// Path u-x-y-v, agent 0 owns {u, v}, x and y are single-node agents;
/// costs uniform on (0, max_cost].
VCSampler path_pair_sampler(double max_cost);

}  // namespace covermech

#endif  // COVERMECH_VERIFY_HPP
