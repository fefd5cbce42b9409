#ifndef COVERMECH_DECOMPOSITION_HPP
#define COVERMECH_DECOMPOSITION_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "covermech/graph.hpp"
#include "covermech/instance.hpp"
#include "covermech/threshold.hpp"

namespace covermech {

enum class PartKind { whole, single_dimensional, sparse_core, star };

const char* part_kind_name(PartKind k);

/// One piece of a decomposition. Local node k stands for original node
/// origin[k]; an original may appear twice (its two copies in the copy
/// graph), in which case its threshold is the larger of the two.
struct Part {
  PartKind kind = PartKind::whole;
  std::vector<int> origin;
  Graph graph;
  ThresholdFamily family;
  double ratio = 0;  // certified approximation ratio against OPT(G)
};

struct Decomposition {
  int num_nodes = 0;
  std::vector<Part> parts;

  double ratio_sum() const;
};

/// Throws ContractViolation unless every edge of g appears in some part.
void check_edge_coverage(const Graph& g, const Decomposition& d);

/// t_v = max over parts containing v of the part threshold, evaluated on
/// the part's restriction of the cost vector (0 for nodes in no part).
/// Neighbor kind when every part is, general kind otherwise.
ThresholdFamily combine(const Graph& g, const Decomposition& d);

/// Local costs of a part read off the per-node cost vector.
std::vector<double> part_costs(const Part& p, std::span<const double> cost);

/// Local nodes the part's own threshold rule selects.
std::vector<int> part_selection(const Part& p, std::span<const double> cost);

// Random single-dimensional decomposition.

/// Node sets V_1..V_k: each round every agent (in random order) adds one
/// uniformly chosen node of its set, skipping a node that shares an owner
/// with one already taken; unowned nodes are always added. Rounds continue
/// until the induced subgraphs cover E. Guard: ceil(64 r^2 ln(|E|+1)).
std::vector<std::vector<int>> random_singledim_decomposition(const VCInstance& inst, std::uint64_t seed);

/// Canonical half-integral LP optimum rounded at 1/2.
std::vector<char> singledim_allocation(const Graph& g, std::span<const double> cost);

/// Critical-value thresholds of singledim_allocation: t_u is the supremum of
/// the costs at which u stays selected, found by bisection.
ThresholdFamily singledim_vc_mechanism(const Graph& g);

/// Scans `probes` random (node, cost decrease) pairs; throws
/// MonotonicityViolation with the witness if a node is lost.
void check_singledim_monotone(const Graph& g, std::span<const double> cost, int probes, std::uint64_t seed);

struct DecompositionRun {
  Decomposition decomposition;
  MechanismResult result;
};

DecompositionRun rdim_mechanism(const VCInstance& inst, std::uint64_t seed);

// Sparse peeling and the copy graph.

struct PeelingResult {
  double gamma = 0;
  std::vector<std::vector<int>> core;   // T_q, the low-degree nodes of round q
  std::vector<std::vector<int>> rim;    // R_q = N(T_q) in the residual graph
  std::vector<std::vector<Edge>> cross; // F_q, (r, t) with r in R_q, t in T_q
  // Copy graph B: node b stands for origin[b] on side is_rim[b].
  Graph copy_graph;
  std::vector<int> origin;
  std::vector<char> is_rim;
  std::vector<int> core_copy;  // per original node, its T-side copy or -1
  std::vector<int> rim_copy;   // per original node, its R-side copy or -1

  int rounds() const { return static_cast<int>(core.size()); }
};

/// Peels nodes of degree <= 4 gamma until no edge is left. Throws
/// PreconditionError if gamma is below the maximum subgraph density.
PeelingResult sparse_peeling(const Graph& g, double gamma);

/// Bipartite subgraphs Z^j of the copy graph covering its edges. Each round
/// picks X: one random T-side copy per agent (skipping copies whose original
/// shares an owner with an earlier pick) plus every unowned T-side copy;
/// Z^j holds all copy-graph edges at X. Guard: ceil(64 r ln(|F|+1)).
/// Returned as copy-graph node lists, X side first.
struct ZPart {
  std::vector<int> x;
  std::vector<int> y;
  std::vector<Edge> edges;  // copy-graph ids, (rim, core)
};
std::vector<ZPart> zj_decomposition(const PeelingResult& peel, const Ownership& owners, int num_nodes,
                                    std::uint64_t seed);

/// Star mechanism on a bipartite graph whose nodes with is_y set form one
/// side: a Y node's threshold is the sum of its neighbours' costs; an X node
/// v's threshold is max over neighbours u of (c_u - sum_{w in N(u), w != v} c_w)^+.
ThresholdFamily star_mechanism(const Graph& z, std::vector<char> is_y);

/// Literal rule: pick u when c_u <= c(N(u)) and pick N(u) when c(N(u)) <= c_u.
std::vector<char> star_literal_rule(const Graph& z, std::span<const char> is_y, std::span<const double> cost);

struct MinorOptions {
  double gamma = 0;      // <= 0 means use the exact maximum density
  std::uint64_t seed = 1;
  bool skip_z = false;   // run the star mechanism on the whole copy graph
};

struct MinorRun {
  Decomposition decomposition;
  PeelingResult peeling;
  MechanismResult result;
  int z_parts = 0;
};

MinorRun minor_closed_mechanism(const VCInstance& inst, MinorOptions opt = {});

/// No node has two neighbours owned by the same agent; otherwise throws
/// PreconditionError naming (u, i).
void check_three_hop_far(const VCInstance& inst);

MinorRun threehop_mechanism(const VCInstance& inst, double gamma = 0);

}  // namespace covermech

#endif  // COVERMECH_DECOMPOSITION_HPP
