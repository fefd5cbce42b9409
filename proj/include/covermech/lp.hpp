#ifndef COVERMECH_LP_HPP
#define COVERMECH_LP_HPP

#include <limits>
#include <vector>

namespace covermech {

enum class Sense { minimize, maximize };
enum class RowType { le, ge, eq };
enum class LPStatus { optimal, infeasible, unbounded };
enum class Arithmetic { automatic, floating, rational };

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dense LP: optimize objective·x subject to rows[i]·x (row_types[i]) rhs[i]
/// and lower <= x <= upper. Empty bound vectors mean x >= 0.
struct LPProblem {
  Sense sense = Sense::minimize;
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;
  std::vector<RowType> row_types;
  std::vector<double> rhs;
  std::vector<double> lower;
  std::vector<double> upper;

  explicit LPProblem(int num_vars = 0, Sense s = Sense::minimize)
      : sense(s), objective(num_vars, 0.0) {}

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }
  double lower_of(int j) const { return lower.empty() ? 0.0 : lower[j]; }
  double upper_of(int j) const { return upper.empty() ? kInf : upper[j]; }
  void set_bounds(int j, double lo, double hi);
  int add_row(std::vector<double> coeffs, RowType type, double b);
};

/// Duals follow the usual sign convention of the stated sense: for a
/// minimisation, >= rows have y >= 0 and <= rows y <= 0; for a maximisation,
/// <= rows have y >= 0. Reduced costs are objective - A^T y.
struct LPSolution {
  LPStatus status = LPStatus::infeasible;
  std::vector<double> primal;
  std::vector<double> dual;
  std::vector<double> reduced_costs;
  double objective = 0;
  double dual_objective = 0;
  bool exact = false;  // solved in rational arithmetic
  int pivots = 0;

  bool optimal() const { return status == LPStatus::optimal; }
};

/// Continued-fraction match of x by num/den with den <= max_den, to 1e-12
/// relative accuracy. Used to pick exact arithmetic for "nice" data.
bool small_rational(double x, long max_den, long& num, long& den);

LPSolution lp_solve(const LPProblem& p, Arithmetic arith = Arithmetic::automatic);

/// Largest violation of a row or bound by the primal vector.
double primal_residual(const LPProblem& p, const LPSolution& s);
/// Largest |y_i * slack_i| and |x_j - bound| * |reduced cost| product.
double complementary_slackness_residual(const LPProblem& p, const LPSolution& s);

}  // namespace covermech

#endif  // COVERMECH_LP_HPP
