#ifndef COVERMECH_ORACLES_HPP
#define COVERMECH_ORACLES_HPP

#include <span>
#include <vector>

#include "covermech/graph.hpp"
#include "covermech/instance.hpp"
#include "covermech/lp.hpp"
#include "covermech/parallel.hpp"

namespace covermech {

inline constexpr int kMaxExactVCNodes = 24;
inline constexpr int kMaxExactUFLFacilities = 16;
inline constexpr long kMaxMinimalCovers = 1000000;

/// Optimal solution of min c.x, x_u + x_v >= 1, x >= 0, with values in
/// {0, 0.5, 1}. Solved by a min cut on the bipartite double cover; among the
/// optimal half-integral points it returns the canonical one in which x_u = 1
/// exactly when the left copy of u can still reach the sink in the residual
/// network and x_u = 0 exactly when it is reachable from the source.
std::vector<double> vc_lp_solve(const Graph& g, std::span<const double> cost);
double vc_lp_value(const Graph& g, std::span<const double> cost);

/// The same LP written out for the general simplex engine.
LPProblem vc_lp_problem(const Graph& g, std::span<const double> cost);

struct CoverResult {
  std::vector<int> nodes;  // sorted
  double cost = 0;
};

/// Minimum-cost vertex cover (n <= 24). Among optimal covers the sorted node
/// list that is lexicographically smallest is returned.
CoverResult min_vertex_cover_exact(const Graph& g, std::span<const double> cost);

/// All minimum-cost covers (n <= 24), each sorted, in lexicographic order.
std::vector<std::vector<int>> all_min_vertex_covers(const Graph& g, std::span<const double> cost,
                                                    long limit = 10000);

/// Every inclusion-minimal vertex cover, as complements of maximal
/// independent sets (Bron-Kerbosch with pivoting).
std::vector<std::vector<int>> enumerate_minimal_vertex_covers(const Graph& g);

/// Facility-location LP: y in [0,1]^F, x >= 0, sum_l x_lj >= 1, x_lj <= y_l.
/// Variable layout: y_l at l, x_lj at F + l * |D| + j. Rows: one coverage row
/// per client, then one x <= y row per (facility, client).
LPProblem flp_problem(const UFLInstance& inst);
inline int flp_x_index(const UFLInstance& inst, int l, int j) {
  return inst.num_facilities() + l * inst.num_clients + j;
}
double flp_value(const UFLInstance& inst);

/// Exhaustive search over nonempty facility subsets (|F| <= 16) with
/// nearest-open assignment; ties broken by the smaller subset bitmask.
UFLSolution ufl_exact(const UFLInstance& inst, Exec exec = Exec::parallel);

/// rho * f(F) + C(F) <= rho * OPT(FL-P) + 1e-7.
bool lmp_certificate(const UFLInstance& inst, const UFLSolution& sol, double rho);
bool lmp_certificate(const UFLInstance& inst, const UFLSolution& sol, double rho, double lp_opt);

}  // namespace covermech

#endif  // COVERMECH_ORACLES_HPP
