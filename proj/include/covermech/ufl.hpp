#ifndef COVERMECH_UFL_HPP
#define COVERMECH_UFL_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "covermech/instance.hpp"

namespace covermech {

struct FractionalSolution {
  std::vector<double> y;               // per facility
  std::vector<std::vector<double>> x;  // [facility][client]
  double value = 0;
  double connection_cost = 0;  // sum c_lj x_lj
};

FractionalSolution solve_flp(const UFLInstance& inst);

/// p*_i = OPT(y = 0 on T_i) - (sum_{l not in T_i} f_l y*_l + sum c x*), one
/// restricted LP per agent. Throws MonopolyViolation when the restricted LP
/// is infeasible (agent i owns every facility).
std::vector<double> fractional_vcg_payments(const UFLInstance& inst, const FractionalSolution& frac);
std::vector<double> fractional_vcg_payments(const UFLInstance& inst);

/// Dual-ascent LMP 2-approximation: client budgets rise together, a closed
/// facility opens once the offers from unconnected clients, (t - c_lj)^+,
/// plus switching offers from connected ones, (c_{sigma(j)j} - c_lj)^+,
/// pay for it. Facilities tight at the same moment open in index order.
UFLSolution jms_lmp(const UFLInstance& inst);

struct DualAscentTrace {
  std::vector<double> budget;     // per client: time it connected
  std::vector<double> open_time;  // per facility: opening time, inf if closed
};
UFLSolution jms_lmp_traced(const UFLInstance& inst, DualAscentTrace* trace);

using LMPAlgorithm = std::function<UFLSolution(const UFLInstance&)>;

struct Column {
  double lambda = 0;
  std::vector<char> open;
  std::vector<int> assign;
  double connection_cost = 0;
};

struct ConvexDecomposition {
  std::vector<Column> columns;  // support of lambda
  double master_value = 0;      // sum lambda - penalty * slack, before normalisation
  int iterations = 0;           // master solves
  int generated = 0;            // columns produced by the pricing oracle
  bool enumerated = false;
};

struct DecomposeOptions {
  double penalty = 1e3;  // cost of violating sum lambda y = y* in the master
  int max_iterations = 5000;
};

/// Convex combination of integral solutions matching y* on every facility
/// with expected connection cost <= rho * sum c x*. Restricted-master column
/// generation; `alg` prices columns on the instance with facility costs
/// (alpha)^+ / rho and connection costs beta * c. Throws LMPViolation when no
/// violated column exists while the master is below 1 - 1e-6.
ConvexDecomposition convex_decompose(const UFLInstance& inst, const FractionalSolution& frac,
                                     const LMPAlgorithm& alg, double rho, DecomposeOptions opt = {});

inline constexpr int kMaxEnumeratedFacilities = 10;

/// The same master over every nonempty facility subset with nearest-open
/// assignment (|F| <= 10).
ConvexDecomposition enumerate_decompose(const UFLInstance& inst, const FractionalSolution& frac, double rho,
                                        DecomposeOptions opt = {});

struct DecompositionErrors {
  double lambda_sum = 0;   // |sum lambda - 1|
  double identity = 0;     // max_l |sum lambda y_l - y*_l|
  double connection = 0;   // (sum lambda C_q - rho sum c x*)^+
  bool integral = true;    // every column opens >= 1 facility and assigns to open ones
};

DecompositionErrors check_decomposition(const UFLInstance& inst, const FractionalSolution& frac,
                                        const ConvexDecomposition& d, double rho);

struct UFLOutcome {
  double lambda = 0;
  std::vector<char> open;
  std::vector<int> assign;
  double cost = 0;
  std::vector<double> payments;  // per agent
};

struct UFLMechanismResult {
  FractionalSolution frac;
  std::vector<double> vcg;
  ConvexDecomposition decomposition;
  std::vector<UFLOutcome> outcomes;
  int sampled = -1;
  double expected_cost = 0;
  std::vector<double> expected_payments;
};

struct UFLOptions {
  double rho = 2;
  bool enumerate = false;  // use the enumeration master instead of pricing
};

/// Fractional VCG payments spread over a convex decomposition of the LP
/// optimum; one outcome is sampled with probability lambda.
UFLMechanismResult run_ufl_mechanism(const UFLInstance& inst, std::uint64_t seed, UFLOptions opt = {});
/// Same, starting from a given optimum of the facility LP (the solver only
/// returns vertices; tied non-vertex optima are supplied this way).
UFLMechanismResult run_ufl_mechanism(const UFLInstance& inst, const FractionalSolution& frac, std::uint64_t seed,
                                     UFLOptions opt = {});

/// Expected utility of `agent` under true opening costs `truth`.
double expected_utility(const UFLMechanismResult& res, const UFLInstance& inst, std::span<const double> truth,
                        int agent);

}  // namespace covermech

#endif  // COVERMECH_UFL_HPP
