#include "covermech/lp.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace covermech {

void LPProblem::set_bounds(int j, double lo, double hi) {
  if (lower.empty()) lower.assign(num_vars(), 0.0);
  if (upper.empty()) upper.assign(num_vars(), kInf);
  lower[j] = lo;
  upper[j] = hi;
}

int LPProblem::add_row(std::vector<double> coeffs, RowType type, double b) {
  if (static_cast<int>(coeffs.size()) != num_vars()) throw std::invalid_argument("lp: row length mismatch");
  rows.push_back(std::move(coeffs));
  row_types.push_back(type);
  rhs.push_back(b);
  return num_rows() - 1;
}

bool small_rational(double x, long max_den, long& num, long& den) {
  if (!std::isfinite(x)) return false;
  const double ax = std::fabs(x);
  if (ax > 1e9) return false;
  long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = ax;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    const long ai = static_cast<long>(a);
    const long h2 = ai * h1 + h0;
    const long k2 = ai * k1 + k0;
    if (k2 > max_den) return false;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (std::fabs(ax - static_cast<double>(h1) / static_cast<double>(k1)) <= 1e-12 * std::max(1.0, ax)) {
      num = x < 0 ? -h1 : h1;
      den = k1;
      return true;
    }
    const double frac = r - a;
    if (frac < 1e-300) return false;
    r = 1.0 / frac;
  }
  return false;
}

namespace {

template <class T>
struct Arith;

template <>
struct Arith<double> {
  static constexpr double eps = 1e-9;
  static bool pos(double x) { return x > eps; }
  static bool neg(double x) { return x < -eps; }
  static bool nonzero(double x) { return std::fabs(x) > eps; }
  static double to_double(double x) { return x; }
};

template <>
struct Arith<mpq_class> {
  static bool pos(const mpq_class& x) { return sgn(x) > 0; }
  static bool neg(const mpq_class& x) { return sgn(x) < 0; }
  static bool nonzero(const mpq_class& x) { return sgn(x) != 0; }
  static double to_double(const mpq_class& x) { return x.get_d(); }
};

bool small_fraction(double x, long max_den, mpq_class& out) {
  long num = 0, den = 1;
  if (!small_rational(x, max_den, num, den)) return false;
  out = mpq_class(mpz_class(num), mpz_class(den));
  out.canonicalize();
  return true;
}

template <class T>
class Tableau {
 public:
  Tableau(int rows, int cols) : m_(rows), n_(cols), a_(static_cast<std::size_t>(rows) * (cols + 1)), obj_(cols + 1), basis_(rows) {}

  T& at(int i, int j) { return a_[static_cast<std::size_t>(i) * (n_ + 1) + j]; }
  T& rhs(int i) { return at(i, n_); }
  T& obj(int j) { return obj_[j]; }
  int basis(int i) const { return basis_[i]; }
  void set_basis(int i, int j) { basis_[i] = j; }
  int rows() const { return m_; }
  int cols() const { return n_; }

  void pivot(int r, int c) {
    const T piv = at(r, c);
    std::vector<int> nz;
    for (int j = 0; j <= n_; ++j) {
      if (Arith<T>::nonzero(at(r, j)) || j == c) {
        at(r, j) /= piv;
        nz.push_back(j);
      } else {
        at(r, j) = 0;
      }
    }
    auto eliminate = [&](auto&& row) {
      const T f = row(c);
      if (!Arith<T>::nonzero(f) && f == 0) return;
      for (int j : nz) row(j) -= f * at(r, j);
      row(c) = 0;
    };
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      eliminate([&](int j) -> T& { return at(i, j); });
    }
    eliminate([&](int j) -> T& { return obj_[j]; });
    basis_[r] = c;
  }

  // Minimises the current objective row over columns with allowed[j].
  LPStatus optimize(const std::vector<char>& allowed, int& pivots) {
    bool bland = false;
    int degenerate = 0;
    for (int iter = 0;; ++iter) {
      if (iter > 200000) throw std::runtime_error("lp: iteration limit reached");
      int enter = -1;
      for (int j = 0; j < n_; ++j) {
        if (!allowed[j] || !Arith<T>::neg(obj_[j])) continue;
        if (enter < 0) {
          enter = j;
          if (bland) break;
        } else if (obj_[j] < obj_[enter]) {
          enter = j;
        }
      }
      if (enter < 0) return LPStatus::optimal;
      int leave = -1;
      T best{};
      for (int i = 0; i < m_; ++i) {
        if (!Arith<T>::pos(at(i, enter))) continue;
        T ratio = rhs(i) / at(i, enter);
        if (leave < 0) {
          leave = i;
          best = ratio;
          continue;
        }
        const T diff = ratio - best;
        if (Arith<T>::neg(diff) || (!Arith<T>::pos(diff) && basis_[i] < basis_[leave])) {
          if (Arith<T>::neg(diff)) best = ratio;
          leave = i;
        }
      }
      if (leave < 0) return LPStatus::unbounded;
      if (!Arith<T>::pos(best)) {
        if (++degenerate > 50) bland = true;
      } else {
        degenerate = 0;
      }
      pivot(leave, enter);
      ++pivots;
    }
  }

 private:
  int m_, n_;
  std::vector<T> a_;
  std::vector<T> obj_;
  std::vector<int> basis_;
};

struct VarMap {
  int col = -1;
  int neg_col = -1;  // for free variables
  double offset = 0;
  double sign = 1;
};

// Solves min c.x with c given in minimisation form; returns duals in min form.
template <class T, class Conv>
LPSolution solve_with(const LPProblem& p, const std::vector<double>& cmin, Conv conv) {
  LPSolution sol;
  const int nv = p.num_vars();
  const int mu = p.num_rows();

  std::vector<VarMap> vm(nv);
  int ns = 0;
  struct StdRow {
    std::vector<std::pair<int, T>> coef;
    RowType type;
    T rhs;
    int user;  // -1 for bound rows
  };
  std::vector<StdRow> rows;
  std::vector<std::pair<int, double>> bound_rows;  // (col, hi - lo)
  for (int j = 0; j < nv; ++j) {
    const double lo = p.lower_of(j), hi = p.upper_of(j);
    if (lo > hi) {
      sol.status = LPStatus::infeasible;
      return sol;
    }
    if (std::isfinite(lo)) {
      vm[j] = {ns++, -1, lo, 1.0};
      if (std::isfinite(hi)) bound_rows.emplace_back(vm[j].col, hi - lo);
    } else if (std::isfinite(hi)) {
      vm[j] = {ns++, -1, hi, -1.0};
    } else {
      vm[j].col = ns++;
      vm[j].neg_col = ns++;
    }
  }
  for (int k = 0; k < mu; ++k) {
    StdRow r{{}, p.row_types[k], conv(p.rhs[k]), k};
    for (int j = 0; j < nv; ++j) {
      const double a = p.rows[k][j];
      if (a == 0) continue;
      const T ta = conv(a);
      if (vm[j].offset != 0) r.rhs -= ta * conv(vm[j].offset);
      r.coef.emplace_back(vm[j].col, vm[j].sign > 0 ? ta : T(-ta));
      if (vm[j].neg_col >= 0) r.coef.emplace_back(vm[j].neg_col, T(-ta));
    }
    rows.push_back(std::move(r));
  }
  for (auto [col, width] : bound_rows) {
    rows.push_back({{{col, T(1)}}, RowType::le, conv(width), -1});
  }
  const int m = static_cast<int>(rows.size());
  std::vector<int> flip(m, 1);
  for (int i = 0; i < m; ++i) {
    if (Arith<T>::neg(rows[i].rhs) || rows[i].rhs < 0) {
      flip[i] = -1;
      rows[i].rhs = -rows[i].rhs;
      for (auto& [c, v] : rows[i].coef) v = -v;
      if (rows[i].type == RowType::le) {
        rows[i].type = RowType::ge;
      } else if (rows[i].type == RowType::ge) {
        rows[i].type = RowType::le;
      }
    }
  }
  int ncols = ns;
  std::vector<int> slack(m, -1), art(m, -1), unit(m, -1);
  for (int i = 0; i < m; ++i)
    if (rows[i].type != RowType::eq) slack[i] = ncols++;
  const int first_art = ncols;
  for (int i = 0; i < m; ++i)
    if (rows[i].type != RowType::le) art[i] = ncols++;

  Tableau<T> tab(m, ncols);
  for (int i = 0; i < m; ++i) {
    for (auto& [c, v] : rows[i].coef) tab.at(i, c) += v;
    tab.rhs(i) = rows[i].rhs;
    if (slack[i] >= 0) tab.at(i, slack[i]) = rows[i].type == RowType::le ? T(1) : T(-1);
    if (art[i] >= 0) tab.at(i, art[i]) = T(1);
    unit[i] = rows[i].type == RowType::le ? slack[i] : art[i];
    tab.set_basis(i, unit[i]);
  }

  // Phase 1: minimise the sum of artificials.
  if (first_art < ncols) {
    for (int j = 0; j <= ncols; ++j) tab.obj(j) = 0;
    for (int j = first_art; j < ncols; ++j) tab.obj(j) = 1;
    for (int i = 0; i < m; ++i) {
      if (art[i] < 0) continue;
      for (int j = 0; j <= ncols; ++j) tab.obj(j) -= tab.at(i, j);
    }
    std::vector<char> all(ncols, 1);
    tab.optimize(all, sol.pivots);
    const T infeas = -tab.obj(ncols);
    double scale = 1.0;
    for (int i = 0; i < m; ++i) scale = std::max(scale, std::fabs(Arith<T>::to_double(tab.rhs(i))));
    if constexpr (std::is_same_v<T, double>) {
      if (infeas > 1e-9 * scale) {
        sol.status = LPStatus::infeasible;
        return sol;
      }
    } else {
      if (Arith<T>::pos(infeas)) {
        sol.status = LPStatus::infeasible;
        return sol;
      }
    }
    for (int i = 0; i < m; ++i) {
      if (tab.basis(i) < first_art) continue;
      for (int j = 0; j < first_art; ++j) {
        if (Arith<T>::nonzero(tab.at(i, j))) {
          tab.pivot(i, j);
          ++sol.pivots;
          break;
        }
      }
    }
  }

  // Phase 2.
  std::vector<T> cost(ncols, T(0));
  for (int j = 0; j < nv; ++j) {
    const T cj = conv(cmin[j]);
    cost[vm[j].col] = vm[j].sign > 0 ? cj : T(-cj);
    if (vm[j].neg_col >= 0) cost[vm[j].neg_col] = -cj;
  }
  for (int j = 0; j < ncols; ++j) tab.obj(j) = cost[j];
  tab.obj(ncols) = 0;
  for (int i = 0; i < m; ++i) {
    const T cb = cost[tab.basis(i)];
    if (!Arith<T>::nonzero(cb) && cb == 0) continue;
    for (int j = 0; j <= ncols; ++j) tab.obj(j) -= cb * tab.at(i, j);
  }
  std::vector<char> allowed(ncols, 1);
  for (int j = first_art; j < ncols; ++j) allowed[j] = 0;
  sol.status = tab.optimize(allowed, sol.pivots);
  if (sol.status != LPStatus::optimal) return sol;

  std::vector<double> xs(ncols, 0.0);
  for (int i = 0; i < m; ++i) xs[tab.basis(i)] = Arith<T>::to_double(tab.rhs(i));
  sol.primal.assign(nv, 0.0);
  for (int j = 0; j < nv; ++j) {
    double v = vm[j].offset + vm[j].sign * xs[vm[j].col];
    if (vm[j].neg_col >= 0) v -= xs[vm[j].neg_col];
    sol.primal[j] = v;
  }
  sol.dual.assign(mu, 0.0);
  for (int i = 0; i < m; ++i) {
    if (rows[i].user < 0) continue;
    const T y = -tab.obj(unit[i]);
    sol.dual[rows[i].user] = flip[i] * Arith<T>::to_double(y);
  }
  sol.exact = std::is_same_v<T, mpq_class>;
  return sol;
}

bool rational_data(const LPProblem& p, std::vector<mpq_class>& cache_unused) {
  (void)cache_unused;
  mpq_class q;
  auto ok = [&](double x) { return small_fraction(x, 10000, q); };
  for (double c : p.objective)
    if (!ok(c)) return false;
  for (const auto& r : p.rows)
    for (double a : r)
      if (!ok(a)) return false;
  for (double b : p.rhs)
    if (!ok(b)) return false;
  for (int j = 0; j < p.num_vars(); ++j) {
    if (std::isfinite(p.lower_of(j)) && !ok(p.lower_of(j))) return false;
    if (std::isfinite(p.upper_of(j)) && !ok(p.upper_of(j))) return false;
  }
  return true;
}

}  // namespace

LPSolution lp_solve(const LPProblem& p, Arithmetic arith) {
  if (static_cast<int>(p.row_types.size()) != p.num_rows() || static_cast<int>(p.rhs.size()) != p.num_rows())
    throw std::invalid_argument("lp: row metadata length mismatch");
  for (const auto& r : p.rows)
    if (static_cast<int>(r.size()) != p.num_vars()) throw std::invalid_argument("lp: row length mismatch");
  if ((!p.lower.empty() && p.lower.size() != p.objective.size()) ||
      (!p.upper.empty() && p.upper.size() != p.objective.size()))
    throw std::invalid_argument("lp: bound length mismatch");

  const double sign = p.sense == Sense::minimize ? 1.0 : -1.0;
  std::vector<double> cmin(p.objective);
  for (double& c : cmin) c *= sign;

  bool use_rational = arith == Arithmetic::rational;
  if (arith == Arithmetic::automatic) {
    long bounded = 0;
    for (int j = 0; j < p.num_vars(); ++j) bounded += std::isfinite(p.upper_of(j)) && std::isfinite(p.lower_of(j));
    const long m = p.num_rows() + bounded;
    const long cols = p.num_vars() + 2 * m;
    std::vector<mpq_class> unused;
    use_rational = m * cols <= 6000 && rational_data(p, unused);
  }

  LPSolution sol;
  if (use_rational) {
    sol = solve_with<mpq_class>(p, cmin, [](double x) {
      mpq_class q;
      if (small_fraction(x, 10000, q)) return q;
      return mpq_class(x);  // exact binary value
    });
  } else {
    sol = solve_with<double>(p, cmin, [](double x) { return x; });
  }
  if (!sol.optimal()) return sol;

  // Reduced costs and dual objective in minimisation form, then convert.
  const int nv = p.num_vars();
  sol.reduced_costs.assign(nv, 0.0);
  double dual_obj = 0;
  for (int k = 0; k < p.num_rows(); ++k) dual_obj += p.rhs[k] * sol.dual[k];
  for (int j = 0; j < nv; ++j) {
    double rc = cmin[j];
    for (int k = 0; k < p.num_rows(); ++k) rc -= p.rows[k][j] * sol.dual[k];
    sol.reduced_costs[j] = rc;
    if (std::fabs(rc) <= 1e-12) continue;
    const double bound = rc > 0 ? p.lower_of(j) : p.upper_of(j);
    if (std::isfinite(bound)) dual_obj += bound * rc;
  }
  double obj = 0;
  for (int j = 0; j < nv; ++j) obj += p.objective[j] * sol.primal[j];
  sol.objective = obj;
  sol.dual_objective = sign * dual_obj;
  for (double& y : sol.dual) y *= sign;
  for (double& r : sol.reduced_costs) r *= sign;
  return sol;
}

double primal_residual(const LPProblem& p, const LPSolution& s) {
  double worst = 0;
  for (int k = 0; k < p.num_rows(); ++k) {
    double lhs = 0;
    for (int j = 0; j < p.num_vars(); ++j) lhs += p.rows[k][j] * s.primal[j];
    const double d = lhs - p.rhs[k];
    if (p.row_types[k] == RowType::le) worst = std::max(worst, d);
    if (p.row_types[k] == RowType::ge) worst = std::max(worst, -d);
    if (p.row_types[k] == RowType::eq) worst = std::max(worst, std::fabs(d));
  }
  for (int j = 0; j < p.num_vars(); ++j) {
    worst = std::max(worst, p.lower_of(j) - s.primal[j]);
    worst = std::max(worst, s.primal[j] - p.upper_of(j));
  }
  return worst;
}

double complementary_slackness_residual(const LPProblem& p, const LPSolution& s) {
  double worst = 0;
  for (int k = 0; k < p.num_rows(); ++k) {
    double lhs = 0;
    for (int j = 0; j < p.num_vars(); ++j) lhs += p.rows[k][j] * s.primal[j];
    worst = std::max(worst, std::fabs(s.dual[k] * (lhs - p.rhs[k])));
  }
  for (int j = 0; j < p.num_vars(); ++j) {
    const double lo = p.lower_of(j), hi = p.upper_of(j);
    double gap = kInf;
    if (std::isfinite(lo)) gap = std::min(gap, std::fabs(s.primal[j] - lo));
    if (std::isfinite(hi)) gap = std::min(gap, std::fabs(s.primal[j] - hi));
    if (!std::isfinite(gap)) gap = 1.0;
    worst = std::max(worst, std::fabs(s.reduced_costs[j]) * gap);
  }
  return worst;
}

}  // namespace covermech
