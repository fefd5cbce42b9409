#include <doctest.h>

#include <cmath>
#include <random>

#include "covermech/lp.hpp"
#include "covermech/oracles.hpp"

using namespace covermech;

namespace {

// Independent optimality certificate: primal and dual feasibility plus equal
// objective values.
void check_certificate(const LPProblem& p, const LPSolution& s, double tol = 1e-7) {
  REQUIRE(s.optimal());
  CHECK(primal_residual(p, s) <= 1e-8);
  CHECK(complementary_slackness_residual(p, s) <= 1e-8);
  CHECK(std::fabs(s.objective - s.dual_objective) <= tol * (1 + std::fabs(s.objective)));
  const bool min = p.sense == Sense::minimize;
  for (int k = 0; k < p.num_rows(); ++k) {
    const double y = min ? s.dual[k] : -s.dual[k];  // dual of the min form
    if (p.row_types[k] == RowType::ge) CHECK(y >= -1e-9);
    if (p.row_types[k] == RowType::le) CHECK(y <= 1e-9);
  }
  for (int j = 0; j < p.num_vars(); ++j) {
    const double rc = min ? s.reduced_costs[j] : -s.reduced_costs[j];
    if (s.primal[j] < p.upper_of(j) - 1e-9) CHECK(rc >= -1e-8);
    if (s.primal[j] > p.lower_of(j) + 1e-9) CHECK(rc <= 1e-8);
  }
}

}  // namespace

TEST_CASE("one-variable maximisation") {
  LPProblem p(1, Sense::maximize);
  p.objective = {1};
  p.add_row({1}, RowType::le, 2);
  const auto s = lp_solve(p);
  REQUIRE(s.optimal());
  CHECK(s.primal[0] == 2.0);
  CHECK(s.objective == 2.0);
  CHECK(s.dual[0] == 1.0);
  CHECK(s.exact);
  check_certificate(p, s);
}

TEST_CASE("vertex cover LP on one edge") {
  const std::vector<double> c{1, 2};
  const LPProblem p = vc_lp_problem(path_graph(2), c);
  const auto s = lp_solve(p);
  REQUIRE(s.optimal());
  CHECK(s.primal == std::vector<double>{1, 0});
  CHECK(s.objective == 1.0);
  check_certificate(p, s);
}

TEST_CASE("facility LP with one facility") {
  UFLInstance inst{{0}, {3.0}, 2, {{1.0, 1.0}}};
  const LPProblem p = flp_problem(inst);
  const auto s = lp_solve(p);
  REQUIRE(s.optimal());
  CHECK(s.primal[0] == doctest::Approx(1.0));
  CHECK(s.objective == doctest::Approx(5.0));
  check_certificate(p, s);
}

TEST_CASE("status reporting") {
  LPProblem inf(1);
  inf.objective = {1};
  inf.add_row({1}, RowType::ge, 2);
  inf.add_row({1}, RowType::le, 1);
  CHECK(lp_solve(inf).status == LPStatus::infeasible);
  CHECK(lp_solve(inf, Arithmetic::floating).status == LPStatus::infeasible);

  LPProblem unb(2, Sense::maximize);
  unb.objective = {1, 1};
  unb.add_row({1, -1}, RowType::le, 1);
  CHECK(lp_solve(unb).status == LPStatus::unbounded);
  CHECK(lp_solve(unb, Arithmetic::floating).status == LPStatus::unbounded);

  LPProblem crossed(1);
  crossed.objective = {1};
  crossed.set_bounds(0, 2, 1);
  CHECK(lp_solve(crossed).status == LPStatus::infeasible);
}

TEST_CASE("bounds of every shape") {
  // min x0 - x1 + 2 x2 with x0 free, x1 <= 3 (no lower), x2 in [-1, 4].
  LPProblem p(3);
  p.objective = {1, -1, 2};
  p.set_bounds(0, -kInf, kInf);
  p.set_bounds(1, -kInf, 3);
  p.set_bounds(2, -1, 4);
  p.add_row({1, 0, 0}, RowType::ge, -5);
  p.add_row({1, 1, 1}, RowType::eq, 0);
  for (auto arith : {Arithmetic::rational, Arithmetic::floating}) {
    const auto s = lp_solve(p, arith);
    check_certificate(p, s);
    CHECK(s.objective == doctest::Approx(-7));  // x1 = 3, x2 = -1, x0 = -2
    CHECK(s.exact == (arith == Arithmetic::rational));
  }
}

TEST_CASE("exact fractions survive the rational path") {
  // min x + y, 3x + y >= 1.05, x + 3y >= 1/32.
  LPProblem p(2);
  p.objective = {1, 1};
  p.add_row({3, 1}, RowType::ge, 1.05);
  p.add_row({1, 3}, RowType::ge, 1.0 / 32);
  const auto s = lp_solve(p);
  REQUIRE(s.exact);
  CHECK(s.objective == doctest::Approx(0.35).epsilon(1e-15));
  check_certificate(p, s);
}

TEST_CASE("random LPs: both arithmetics agree and certify") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> coef(-4, 6);
  std::uniform_int_distribution<int> type(0, 2);
  int solved = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int nv = 2 + trial % 6, nr = 1 + trial % 7;
    LPProblem p(nv, trial % 2 ? Sense::maximize : Sense::minimize);
    for (auto& c : p.objective) c = coef(rng);
    for (int k = 0; k < nr; ++k) {
      std::vector<double> row(nv);
      for (auto& a : row) a = coef(rng);
      p.add_row(row, static_cast<RowType>(type(rng)), coef(rng));
    }
    for (int j = 0; j < nv; ++j) {
      if (trial % 3 == 0) p.set_bounds(j, -3, 5);
      if (trial % 5 == 0 && j == 0) p.set_bounds(j, -kInf, kInf);
    }
    const auto r = lp_solve(p, Arithmetic::rational);
    const auto f = lp_solve(p, Arithmetic::floating);
    CHECK(r.status == f.status);
    if (r.optimal() && f.optimal()) {
      ++solved;
      check_certificate(p, r);
      check_certificate(p, f);
      CHECK(r.objective == doctest::Approx(f.objective).epsilon(1e-9));
    }
  }
  CHECK(solved > 50);
}

TEST_CASE("degenerate LP terminates") {
  // Classic cycling example for Dantzig's rule without an anti-cycling rule.
  LPProblem p(4, Sense::maximize);
  p.objective = {10, -57, -9, -24};
  p.add_row({0.5, -5.5, -2.5, 9}, RowType::le, 0);
  p.add_row({0.5, -1.5, -0.5, 1}, RowType::le, 0);
  p.add_row({1, 0, 0, 0}, RowType::le, 1);
  for (auto arith : {Arithmetic::rational, Arithmetic::floating}) {
    const auto s = lp_solve(p, arith);
    check_certificate(p, s);
    CHECK(s.objective == doctest::Approx(1.0));
  }
}
