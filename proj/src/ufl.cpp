#include "covermech/ufl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "covermech/errors.hpp"
#include "covermech/lp.hpp"
#include "covermech/oracles.hpp"

namespace covermech {

FractionalSolution solve_flp(const UFLInstance& inst) {
  const auto sol = lp_solve(flp_problem(inst));
  if (!sol.optimal()) throw std::runtime_error("facility LP not solved to optimality");
  const int nf = inst.num_facilities(), nd = inst.num_clients;
  FractionalSolution f;
  f.value = sol.objective;
  f.y.assign(sol.primal.begin(), sol.primal.begin() + nf);
  f.x.assign(nf, std::vector<double>(nd, 0.0));
  for (int l = 0; l < nf; ++l)
    for (int j = 0; j < nd; ++j) {
      f.x[l][j] = sol.primal[flp_x_index(inst, l, j)];
      f.connection_cost += inst.assign_cost[l][j] * f.x[l][j];
    }
  return f;
}

std::vector<double> fractional_vcg_payments(const UFLInstance& inst, const FractionalSolution& frac) {
  const auto owned = inst.agent_facilities();
  std::vector<double> pay(owned.size(), 0.0);
  for (std::size_t i = 0; i < owned.size(); ++i) {
    if (owned[i].empty()) continue;
    if (static_cast<int>(owned[i].size()) == inst.num_facilities()) {
      throw MonopolyViolation("agent " + std::to_string(i) + " owns every facility");
    }
    auto p = flp_problem(inst);
    double own = 0;
    for (int l : owned[i]) {
      p.set_bounds(l, 0.0, 0.0);
      own += inst.open_cost[l] * frac.y[l];
    }
    const auto sol = lp_solve(p);
    if (sol.status == LPStatus::infeasible) {
      throw MonopolyViolation("facility LP infeasible without agent " + std::to_string(i));
    }
    if (!sol.optimal()) throw std::runtime_error("restricted facility LP not solved to optimality");
    // OPT(-i) >= OPT holds exactly; clamp float noise so p*_i >= own cost.
    const double without = std::max(sol.objective, frac.value);
    pay[i] = without - (frac.value - own);
  }
  return pay;
}

std::vector<double> fractional_vcg_payments(const UFLInstance& inst) {
  return fractional_vcg_payments(inst, solve_flp(inst));
}

namespace {

// Smallest tau >= 0 with sum_k (tau - d_k)^+ >= need, d sorted ascending.
double tight_time(const std::vector<double>& d, double need) {
  if (need <= 0) return 0;
  double prefix = 0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    prefix += d[k];
    const double tau = (need + prefix) / static_cast<double>(k + 1);
    if (tau >= d[k] && (k + 1 == d.size() || tau <= d[k + 1])) return tau;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

UFLSolution jms_lmp(const UFLInstance& inst) { return jms_lmp_traced(inst, nullptr); }

UFLSolution jms_lmp_traced(const UFLInstance& inst, DualAscentTrace* trace) {
  const int nf = inst.num_facilities(), nd = inst.num_clients;
  if (nf == 0) throw std::invalid_argument("jms_lmp: no facilities");
  const auto& c = inst.assign_cost;
  std::vector<char> open(nf, 0);
  std::vector<int> sigma(nd, -1);
  int unconnected = nd;
  double t = 0;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> budget(nd, inf), open_time(nf, inf);
  auto near = [&](double a, double b) { return a <= b + 1e-12 * (1.0 + std::abs(b)); };

  // Every event connects a client or opens a facility.
  for (int guard = 0; guard <= 2 * (nf + nd) + 2; ++guard) {
    const bool any_open = std::any_of(open.begin(), open.end(), [](char o) { return o; });
    if (unconnected == 0 && any_open) break;

    // Earliest client reaching an open facility, earliest tight facility.
    double reach = inf;
    for (int j = 0; j < nd; ++j) {
      if (sigma[j] >= 0) continue;
      for (int l = 0; l < nf; ++l)
        if (open[l]) reach = std::min(reach, std::max(t, c[l][j]));
    }
    double tight = inf;
    int next_fac = -1;
    for (int l = 0; l < nf; ++l) {
      if (open[l]) continue;
      double need = inst.open_cost[l];
      std::vector<double> d;
      for (int j = 0; j < nd; ++j) {
        if (sigma[j] >= 0) need -= std::max(0.0, c[sigma[j]][j] - c[l][j]);
        else d.push_back(c[l][j]);
      }
      std::sort(d.begin(), d.end());
      const double tau = std::max(t, tight_time(d, need));
      if (tau < tight && !(next_fac >= 0 && near(tight, tau))) {
        tight = tau;
        next_fac = l;
      }
    }
    if (reach == inf && tight == inf) {
      // No clients at all: open the cheapest facility.
      int best = 0;
      for (int l = 1; l < nf; ++l)
        if (inst.open_cost[l] < inst.open_cost[best]) best = l;
      open[best] = 1;
      open_time[best] = t;
      continue;
    }
    // A client reaching an open facility settles before a tie-time opening.
    const bool connect = near(reach, tight);
    t = connect ? reach : tight;

    bool connected_any = false;
    for (int j = 0; j < nd; ++j) {
      if (sigma[j] >= 0) continue;
      int best = -1;
      for (int l = 0; l < nf; ++l)
        if (open[l] && near(c[l][j], t) && (best < 0 || c[l][j] < c[best][j])) best = l;
      if (best >= 0) {
        sigma[j] = best;
        budget[j] = t;
        --unconnected;
        connected_any = true;
      }
    }
    if (connected_any) continue;
    if (connect || next_fac < 0) throw std::logic_error("jms_lmp: event without effect");

    const int l = next_fac;
    open[l] = 1;
    open_time[l] = t;
    for (int j = 0; j < nd; ++j) {
      if (sigma[j] < 0) {
        if (near(c[l][j], t)) {
          sigma[j] = l;
          budget[j] = t;
          --unconnected;
        }
      } else if (c[l][j] < c[sigma[j]][j]) {
        sigma[j] = l;
      }
    }
  }
  if (unconnected > 0) throw LoopGuardExceeded("jms_lmp: dual ascent did not finish");
  if (trace) *trace = {budget, open_time};

  UFLSolution s;
  s.open = open;
  s.assign = sigma;
  for (int l = 0; l < nf; ++l)
    if (open[l]) s.facility_cost += inst.open_cost[l];
  for (int j = 0; j < nd; ++j) s.connection_cost += c[sigma[j]][j];
  return s;
}

namespace {

Column make_column(const UFLInstance& inst, std::vector<char> open, std::vector<int> assign) {
  Column col;
  col.open = std::move(open);
  col.assign = std::move(assign);
  for (int j = 0; j < inst.num_clients; ++j) col.connection_cost += inst.assign_cost[col.assign[j]][j];
  return col;
}

Column nearest_column(const UFLInstance& inst, const std::vector<char>& open) {
  const auto s = assign_nearest(inst, open);
  return make_column(inst, s.open, s.assign);
}

bool same_column(const Column& a, const Column& b) { return a.open == b.open && a.assign == b.assign; }

struct MasterSolution {
  std::vector<double> lambda;
  std::vector<double> alpha;
  double beta = 0, z = 0;
  double value = 0;  // sum lambda - penalty * slack
};

// max sum lambda - M sum(s+ + s-)  s.t.  sum lambda y + s+ - s- = y*,
// sum lambda C <= rho C*, sum lambda <= 1.
MasterSolution solve_master(const UFLInstance& inst, const FractionalSolution& frac, const std::vector<Column>& cols,
                            double rho, double penalty) {
  const int nf = inst.num_facilities(), q = static_cast<int>(cols.size());
  LPProblem p(q + 2 * nf, Sense::maximize);
  for (int k = 0; k < q; ++k) p.objective[k] = 1.0;
  for (int l = 0; l < 2 * nf; ++l) p.objective[q + l] = -penalty;
  for (int l = 0; l < nf; ++l) {
    std::vector<double> row(p.num_vars(), 0.0);
    for (int k = 0; k < q; ++k) row[k] = cols[k].open[l] ? 1.0 : 0.0;
    row[q + l] = 1.0;
    row[q + nf + l] = -1.0;
    p.add_row(std::move(row), RowType::eq, frac.y[l]);
  }
  std::vector<double> crow(p.num_vars(), 0.0), srow(p.num_vars(), 0.0);
  for (int k = 0; k < q; ++k) {
    crow[k] = cols[k].connection_cost;
    srow[k] = 1.0;
  }
  p.add_row(std::move(crow), RowType::le, rho * frac.connection_cost);
  p.add_row(std::move(srow), RowType::le, 1.0);
  const auto sol = lp_solve(p, Arithmetic::floating);
  if (!sol.optimal()) throw std::runtime_error("decomposition master not solved to optimality");
  MasterSolution m;
  m.lambda.assign(sol.primal.begin(), sol.primal.begin() + q);
  m.alpha.assign(sol.dual.begin(), sol.dual.begin() + nf);
  m.beta = sol.dual[nf];
  m.z = sol.dual[nf + 1];
  m.value = sol.objective;
  return m;
}

ConvexDecomposition finish(std::vector<Column> cols, const MasterSolution& m) {
  ConvexDecomposition d;
  d.master_value = m.value;
  double total = 0;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (m.lambda[k] <= 1e-12) continue;
    cols[k].lambda = m.lambda[k];
    total += m.lambda[k];
    d.columns.push_back(std::move(cols[k]));
  }
  for (auto& c : d.columns) c.lambda /= total;
  return d;
}

double column_price(const Column& c, const MasterSolution& m) {
  double s = m.beta * c.connection_cost + m.z;
  for (std::size_t l = 0; l < c.open.size(); ++l)
    if (c.open[l]) s += m.alpha[l];
  return s;
}

std::vector<Column> seed_columns(const UFLInstance& inst, const FractionalSolution& frac) {
  const int nf = inst.num_facilities();
  std::vector<Column> cols;
  auto add = [&](Column c) {
    for (const auto& o : cols)
      if (same_column(o, c)) return;
    cols.push_back(std::move(c));
  };
  bool integral = true;
  std::vector<char> rounded(nf, 0);
  for (int l = 0; l < nf; ++l) {
    rounded[l] = frac.y[l] > 0.5;
    if (std::abs(frac.y[l] - rounded[l]) > 1e-9) integral = false;
  }
  if (integral && std::any_of(rounded.begin(), rounded.end(), [](char o) { return o; })) {
    add(nearest_column(inst, rounded));
  }
  const auto j = jms_lmp(inst);
  add(make_column(inst, j.open, j.assign));
  add(nearest_column(inst, std::vector<char>(nf, 1)));
  return cols;
}

}  // namespace

ConvexDecomposition convex_decompose(const UFLInstance& inst, const FractionalSolution& frac,
                                     const LMPAlgorithm& alg, double rho, DecomposeOptions opt) {
  const int nf = inst.num_facilities();
  auto cols = seed_columns(inst, frac);
  int generated = 0;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    const auto m = solve_master(inst, frac, cols, rho, opt.penalty);
    if (m.value >= 1.0 - 1e-9) {
      auto d = finish(std::move(cols), m);
      d.iterations = it;
      d.generated = generated;
      return d;
    }
    // Pricing instance: opening costs alpha^+ / rho, connection costs beta c.
    UFLInstance priced = inst;
    for (int l = 0; l < nf; ++l) priced.open_cost[l] = std::max(0.0, m.alpha[l]) / rho;
    for (auto& row : priced.assign_cost)
      for (double& v : row) v *= m.beta;
    const auto s = alg(priced);
    ++generated;
    std::vector<char> open = s.open;
    for (int l = 0; l < nf; ++l)
      if (m.alpha[l] <= 0) open[l] = 1;
    Column col = make_column(inst, std::move(open), s.assign);
    const bool violated = column_price(col, m) < 1.0 - 1e-9;
    const bool fresh = std::none_of(cols.begin(), cols.end(), [&](const Column& o) { return same_column(o, col); });
    if (!violated || !fresh) {
      if (m.value < 1.0 - 1e-6) {
        std::ostringstream msg;
        msg << "no violated column while the master is at " << m.value << "; dual witness alpha=(";
        for (int l = 0; l < nf; ++l) msg << (l ? "," : "") << m.alpha[l];
        msg << ") beta=" << m.beta << " z=" << m.z << "; priced column scores " << column_price(col, m);
        throw LMPViolation(msg.str());
      }
      auto d = finish(std::move(cols), m);
      d.iterations = it;
      d.generated = generated;
      return d;
    }
    cols.push_back(std::move(col));
  }
  throw LoopGuardExceeded("column generation exceeded " + std::to_string(opt.max_iterations) + " iterations");
}

ConvexDecomposition enumerate_decompose(const UFLInstance& inst, const FractionalSolution& frac, double rho,
                                        DecomposeOptions opt) {
  const int nf = inst.num_facilities();
  if (nf > kMaxEnumeratedFacilities) {
    throw SizeLimitExceeded("enumerated decomposition limited to " + std::to_string(kMaxEnumeratedFacilities) +
                            " facilities, got " + std::to_string(nf));
  }
  std::vector<Column> cols;
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << nf); ++mask) {
    std::vector<char> open(nf, 0);
    for (int l = 0; l < nf; ++l) open[l] = (mask >> l) & 1;
    cols.push_back(nearest_column(inst, open));
  }
  const auto m = solve_master(inst, frac, cols, rho, opt.penalty);
  if (m.value < 1.0 - 1e-6) {
    throw LMPViolation("enumerated master stops at " + std::to_string(m.value));
  }
  auto d = finish(std::move(cols), m);
  d.iterations = 1;
  d.enumerated = true;
  return d;
}

DecompositionErrors check_decomposition(const UFLInstance& inst, const FractionalSolution& frac,
                                        const ConvexDecomposition& d, double rho) {
  const int nf = inst.num_facilities();
  DecompositionErrors e;
  double total = 0, conn = 0;
  std::vector<double> mix(nf, 0.0);
  for (const auto& c : d.columns) {
    total += c.lambda;
    conn += c.lambda * c.connection_cost;
    bool any = false;
    for (int l = 0; l < nf; ++l) {
      if (c.open[l]) {
        mix[l] += c.lambda;
        any = true;
      }
    }
    if (!any) e.integral = false;
    for (int j = 0; j < inst.num_clients; ++j)
      if (c.assign[j] < 0 || c.assign[j] >= nf || !c.open[c.assign[j]]) e.integral = false;
  }
  e.lambda_sum = std::abs(total - 1.0);
  for (int l = 0; l < nf; ++l) e.identity = std::max(e.identity, std::abs(mix[l] - frac.y[l]));
  e.connection = std::max(0.0, conn - rho * frac.connection_cost);
  return e;
}

UFLMechanismResult run_ufl_mechanism(const UFLInstance& inst, std::uint64_t seed, UFLOptions opt) {
  const auto report = validate_ufl_instance(inst);
  if (!report.ok) throw PreconditionError("invalid facility instance: " + report.reasons.front());
  return run_ufl_mechanism(inst, solve_flp(inst), seed, opt);
}

UFLMechanismResult run_ufl_mechanism(const UFLInstance& inst, const FractionalSolution& frac, std::uint64_t seed,
                                     UFLOptions opt) {
  UFLMechanismResult r;
  r.frac = frac;
  r.vcg = fractional_vcg_payments(inst, r.frac);
  r.decomposition = opt.enumerate ? enumerate_decompose(inst, r.frac, opt.rho)
                                  : convex_decompose(inst, r.frac, jms_lmp, opt.rho);
  const auto owned = inst.agent_facilities();
  const int na = static_cast<int>(owned.size());
  std::vector<double> den(na, 0.0);
  for (int i = 0; i < na; ++i)
    for (int l : owned[i]) den[i] += inst.open_cost[l] * r.frac.y[l];

  r.expected_payments.assign(na, 0.0);
  std::vector<double> weights;
  for (const auto& col : r.decomposition.columns) {
    UFLOutcome o;
    o.lambda = col.lambda;
    o.open = col.open;
    o.assign = col.assign;
    o.cost = col.connection_cost;
    for (int l = 0; l < inst.num_facilities(); ++l)
      if (col.open[l]) o.cost += inst.open_cost[l];
    o.payments.assign(na, 0.0);
    for (int i = 0; i < na; ++i) {
      if (den[i] <= 1e-12) continue;
      double own = 0;
      for (int l : owned[i])
        if (col.open[l]) own += inst.open_cost[l];
      o.payments[i] = own * r.vcg[i] / den[i];
      r.expected_payments[i] += o.lambda * o.payments[i];
    }
    r.expected_cost += o.lambda * o.cost;
    weights.push_back(o.lambda);
    r.outcomes.push_back(std::move(o));
  }
  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  r.sampled = pick(rng);
  return r;
}

double expected_utility(const UFLMechanismResult& res, const UFLInstance& inst, std::span<const double> truth,
                        int agent) {
  double u = 0;
  for (const auto& o : res.outcomes) {
    double cost = 0;
    for (int l = 0; l < inst.num_facilities(); ++l)
      if (o.open[l] && inst.facility_agent[l] == agent) cost += truth[l];
    u += o.lambda * (o.payments[agent] - cost);
  }
  return u;
}

}  // namespace covermech
