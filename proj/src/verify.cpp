#include "covermech/verify.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

#include "covermech/errors.hpp"
#include "covermech/lp.hpp"
#include "covermech/oracles.hpp"

namespace covermech {

namespace {

// Runs body(k) for k in [0, n), in parallel when asked; the first exception
// (by index) is rethrown after the loop.
template <class Body>
void for_each_index(long n, Exec exec, Body body) {
  if (exec == Exec::serial) {
    for (long k = 0; k < n; ++k) body(k);
    return;
  }
  std::vector<std::exception_ptr> errors(n > 0 ? 1 : 0);
  long first_error = n;
#pragma omp parallel for schedule(dynamic) num_threads(worker_threads())
  for (long k = 0; k < n; ++k) {
    try {
      body(k);
    } catch (...) {
#pragma omp critical(covermech_verify_error)
      if (k < first_error) {
        first_error = k;
        errors[0] = std::current_exception();
      }
    }
  }
  if (first_error < n) std::rethrow_exception(errors[0]);
}

std::mt19937_64 probe_rng(std::uint64_t seed, std::uint64_t k) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  return std::mt19937_64(seq);
}

std::vector<char> to_flags(int n, const std::vector<int>& nodes) {
  std::vector<char> f(n, 0);
  for (int u : nodes) f[u] = 1;
  return f;
}

double agent_cost(const Ownership& o, int agent, std::span<const double> row, const std::vector<char>& alloc) {
  double s = 0;
  for (std::size_t k = 0; k < o.sets[agent].size(); ++k)
    if (alloc[o.sets[agent][k]]) s += row[k];
  return s;
}

}  // namespace

VCAlgorithm allocation_of(VCMechanism mech) {
  return [mech = std::move(mech)](const VCInstance& inst) { return to_flags(inst.num_nodes(), mech(inst).selected); };
}

VCAlgorithm on_node_costs(NodeAlgorithm alg) {
  return [alg = std::move(alg)](const VCInstance& inst) {
    const auto c = inst.node_costs();
    return to_flags(inst.num_nodes(), alg(inst.graph, c));
  };
}

std::vector<int> lp_rounding_algorithm(const Graph& g, std::span<const double> cost) {
  const auto x = vc_lp_solve(g, cost);
  std::vector<int> out;
  for (int u = 0; u < g.num_nodes(); ++u)
    if (x[u] >= 0.5 - 1e-12) out.push_back(u);
  return out;
}

std::vector<int> ordered_primal_dual(const Graph& g, std::span<const double> cost, std::span<const int> edge_order) {
  std::vector<double> left(cost.begin(), cost.end());
  const auto& edges = g.edges();
  for (int k : edge_order) {
    const auto [a, b] = edges.at(k);
    const double d = std::max(0.0, std::min(left[a], left[b]));
    left[a] -= d;
    left[b] -= d;
  }
  std::vector<int> out;
  for (int u = 0; u < g.num_nodes(); ++u)
    if (left[u] <= 1e-12 * (1.0 + std::abs(cost[u]))) out.push_back(u);
  return out;
}

std::vector<int> ordered_primal_dual(const Graph& g, std::span<const double> cost) {
  std::vector<int> order(g.num_edges());
  std::iota(order.begin(), order.end(), 0);
  return ordered_primal_dual(g, cost, order);
}

std::vector<int> simultaneous_primal_dual(const Graph& g, std::span<const double> cost) {
  const int n = g.num_nodes();
  std::vector<double> left(cost.begin(), cost.end());
  std::vector<char> paid(n, 0);
  auto settle = [&](int u) {
    if (!paid[u] && left[u] <= 1e-12 * (1.0 + std::abs(cost[u]))) paid[u] = 1;
  };
  for (int u = 0; u < n; ++u) settle(u);
  for (int round = 0; round <= n; ++round) {
    std::vector<int> rate(n, 0);
    bool active = false;
    for (auto [a, b] : g.edges()) {
      if (paid[a] || paid[b]) continue;
      ++rate[a];
      ++rate[b];
      active = true;
    }
    if (!active) break;
    double dt = std::numeric_limits<double>::infinity();
    for (int u = 0; u < n; ++u)
      if (rate[u] > 0) dt = std::min(dt, left[u] / rate[u]);
    for (int u = 0; u < n; ++u) {
      if (rate[u] == 0) continue;
      // Nodes reaching zero in the same step are paid together.
      if (left[u] / rate[u] <= dt * (1.0 + 1e-12)) left[u] = 0;
      else left[u] -= dt * rate[u];
      settle(u);
    }
  }
  std::vector<int> out;
  for (int u = 0; u < n; ++u)
    if (paid[u]) out.push_back(u);
  return out;
}

std::optional<WMONWitness> wmon_compare(const VCAlgorithm& alg, const VCInstance& inst, int agent,
                                        std::span<const double> deviation) {
  VCInstance dev = inst;
  dev.costs[agent].assign(deviation.begin(), deviation.end());
  WMONWitness w;
  w.agent = agent;
  w.a = alg(inst);
  w.b = alg(dev);
  const auto& row = inst.costs[agent];
  w.lhs = agent_cost(inst.owners, agent, row, w.a) - agent_cost(inst.owners, agent, row, w.b);
  w.rhs = agent_cost(inst.owners, agent, deviation, w.a) - agent_cost(inst.owners, agent, deviation, w.b);
  if (!(w.lhs > w.rhs + 1e-9)) return std::nullopt;
  w.context = inst;
  w.deviation.assign(deviation.begin(), deviation.end());
  return w;
}

WMONWitness shrink_witness(const VCAlgorithm& alg, WMONWitness w) {
  const std::vector<double> c = w.context.costs[w.agent];
  for (int step = 0; step < 40; ++step) {
    std::vector<double> mid(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) mid[k] = c[k] + 0.5 * (w.deviation[k] - c[k]);
    auto next = wmon_compare(alg, w.context, w.agent, mid);
    if (!next) break;
    next->probe = w.probe;
    w = std::move(*next);
  }
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (w.deviation[k] == c[k]) continue;
    auto trial = w.deviation;
    trial[k] = c[k];
    if (auto next = wmon_compare(alg, w.context, w.agent, trial)) {
      next->probe = w.probe;
      w = std::move(*next);
    }
  }
  return w;
}

bool replay_witness(const VCAlgorithm& alg, const WMONWitness& w) {
  const auto again = wmon_compare(alg, w.context, w.agent, w.deviation);
  return again && again->a == w.a && again->b == w.b;
}

WMONReport wmon_check(const VCAlgorithm& alg, const VCSampler& sampler, long probes, std::uint64_t seed,
                      WMONOptions opt) {
  std::vector<std::optional<WMONWitness>> found(probes);
  for_each_index(probes, opt.exec, [&](long k) {
    auto rng = probe_rng(seed, static_cast<std::uint64_t>(k));
    const VCInstance inst = sampler(rng);
    std::vector<int> agents;
    for (int i = 0; i < inst.num_agents(); ++i)
      if (!inst.owners.sets[i].empty()) agents.push_back(i);
    if (agents.empty()) return;
    const int i = agents[std::uniform_int_distribution<std::size_t>(0, agents.size() - 1)(rng)];
    const auto& row = inst.costs[i];
    std::vector<double> dev = row;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
      case 0: {
        double scale = 0;
        for (const auto& r : inst.costs)
          for (double v : r) scale = std::max(scale, v);
        if (scale <= 0) scale = 1;
        for (double& v : dev) v = 2 * scale * unit(rng);
        break;
      }
      case 1: {
        const auto k = std::uniform_int_distribution<std::size_t>(0, dev.size() - 1)(rng);
        dev[k] *= unit(rng);
        break;
      }
      default:
        for (double& v : dev) v *= unit(rng);
    }
    if (auto w = wmon_compare(alg, inst, i, dev)) {
      w->probe = k;
      found[k] = std::move(w);
    }
  });
  WMONReport rep;
  rep.probes = probes;
  for (auto& f : found) {
    if (!f) continue;
    ++rep.violations;
    if (rep.witnesses.size() < opt.keep) rep.witnesses.push_back(opt.shrink ? shrink_witness(alg, *f) : *f);
  }
  return rep;
}

namespace {

double utility(const VCInstance& truth, const MechanismResult& r, int agent) {
  double u = r.payments[agent];
  const auto& set = truth.owners.sets[agent];
  for (std::size_t k = 0; k < set.size(); ++k)
    if (r.provider[set[k]] == agent) u -= truth.costs[agent][k];
  return u;
}

std::vector<double> grid_factors(int grid_size) {
  std::vector<double> f{0.0};
  for (int k = 0; k < grid_size; ++k) {
    const double e = grid_size == 1 ? 0.0 : -3.0 + 6.0 * k / (grid_size - 1);
    f.push_back(std::exp2(e));
  }
  return f;
}

}  // namespace

TruthReport truthfulness_check(const VCMechanism& mech, const VCInstance& inst, int grid_size, Exec exec) {
  double scale = 0;
  for (const auto& r : inst.costs)
    for (double v : r) scale = std::max(scale, v);
  if (scale <= 0) scale = 1;
  const auto factors = grid_factors(grid_size);

  struct Task {
    int agent;
    std::vector<double> report;
  };
  std::vector<Task> tasks;
  for (int i = 0; i < inst.num_agents(); ++i) {
    const auto& row = inst.costs[i];
    if (row.empty()) continue;
    for (double f : factors) {
      for (double base : {-1.0, scale}) {
        auto all = row;
        for (double& v : all) v = (base < 0 ? v : base) * f;
        tasks.push_back({i, all});
        if (row.size() == 1) continue;
        for (std::size_t k = 0; k < row.size(); ++k) {
          auto one = row;
          one[k] = (base < 0 ? row[k] : base) * f;
          tasks.push_back({i, one});
        }
      }
    }
  }

  const auto honest = mech(inst);
  std::vector<double> gain(tasks.size(), 0.0);
  for_each_index(static_cast<long>(tasks.size()), exec, [&](long t) {
    VCInstance lie = inst;
    lie.costs[tasks[t].agent] = tasks[t].report;
    const auto r = mech(lie);
    gain[t] = utility(inst, r, tasks[t].agent) - utility(inst, honest, tasks[t].agent);
  });
  TruthReport rep;
  rep.evaluations = static_cast<long>(tasks.size());
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    if (gain[t] > rep.max_gain) {
      rep.max_gain = gain[t];
      rep.agent = tasks[t].agent;
      rep.misreport = tasks[t].report;
    }
  }
  return rep;
}

double ir_violation(const VCInstance& inst, const MechanismResult& r) {
  double worst = 0;
  for (int i = 0; i < inst.num_agents(); ++i) worst = std::max(worst, -utility(inst, r, i));
  return worst;
}

double approximation_ratio(const VCInstance& inst, const MechanismResult& r) {
  const auto c = inst.node_costs();
  const double opt = min_vertex_cover_exact(inst.graph, c).cost;
  if (opt <= 0) return r.cost <= 0 ? 1.0 : std::numeric_limits<double>::infinity();
  return r.cost / opt;
}

TruthReport ufl_truthfulness_check(const UFLInstance& inst, std::span<const double> factors, std::uint64_t seed,
                                   UFLOptions opt, long max_product, Exec exec) {
  const auto owned = inst.agent_facilities();
  struct Task {
    int agent;
    std::vector<double> report;  // full opening-cost vector
  };
  std::vector<Task> tasks;
  const long nfac = static_cast<long>(factors.size());
  for (int i = 0; i < static_cast<int>(owned.size()); ++i) {
    const auto& mine = owned[i];
    if (mine.empty()) continue;
    long combos = 1;
    bool product = true;
    for (std::size_t k = 0; k < mine.size() && product; ++k) {
      combos *= nfac;
      if (combos > max_product) product = false;
    }
    if (product) {
      for (long code = 0; code < combos; ++code) {
        auto rep = inst.open_cost;
        long c = code;
        for (int l : mine) {
          rep[l] *= factors[c % nfac];
          c /= nfac;
        }
        tasks.push_back({i, rep});
      }
    } else {
      for (double f : factors) {
        auto all = inst.open_cost;
        for (int l : mine) all[l] *= f;
        tasks.push_back({i, all});
        for (int l : mine) {
          auto one = inst.open_cost;
          one[l] *= f;
          tasks.push_back({i, one});
        }
      }
    }
  }

  const auto honest = run_ufl_mechanism(inst, seed, opt);
  std::vector<double> gain(tasks.size(), 0.0);
  for_each_index(static_cast<long>(tasks.size()), exec, [&](long t) {
    UFLInstance lie = inst;
    lie.open_cost = tasks[t].report;
    const auto r = run_ufl_mechanism(lie, seed, opt);
    gain[t] = expected_utility(r, inst, inst.open_cost, tasks[t].agent) -
              expected_utility(honest, inst, inst.open_cost, tasks[t].agent);
  });
  TruthReport rep;
  rep.evaluations = static_cast<long>(tasks.size());
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    if (gain[t] > rep.max_gain) {
      rep.max_gain = gain[t];
      rep.agent = tasks[t].agent;
      rep.misreport = tasks[t].report;
    }
  }
  return rep;
}

namespace {

// max sum_{S} x_v  s.t.  x_v >= c_v on S,  sum_{S \ T} x <= c(T \ S) per T.
double nu_lp(const Graph& g, std::span<const double> cost, std::span<const int> cover,
             const std::vector<std::vector<int>>& covers, int* rows) {
  const int n = g.num_nodes();
  std::vector<int> pos(n, -1);
  for (std::size_t k = 0; k < cover.size(); ++k) pos[cover[k]] = static_cast<int>(k);
  LPProblem p(static_cast<int>(cover.size()), Sense::maximize);
  for (std::size_t k = 0; k < cover.size(); ++k) {
    p.objective[k] = 1.0;
    p.set_bounds(static_cast<int>(k), cost[cover[k]], kInf);
  }
  for (const auto& t : covers) {
    std::vector<char> in_t(n, 0);
    for (int u : t) in_t[u] = 1;
    std::vector<double> row(cover.size(), 0.0);
    bool any = false;
    for (std::size_t k = 0; k < cover.size(); ++k)
      if (!in_t[cover[k]]) {
        row[k] = 1.0;
        any = true;
      }
    if (!any) continue;
    double rhs = 0;
    for (int u : t)
      if (pos[u] < 0) rhs += cost[u];
    p.add_row(std::move(row), RowType::le, rhs);
  }
  if (rows) *rows = p.num_rows();
  if (cover.empty()) return 0.0;
  const auto sol = lp_solve(p);
  if (!sol.optimal()) throw ContractViolation("frugality LP not optimal: the given set is not a min-cost cover");
  return sol.objective;
}

}  // namespace

double frugality_nu(const Graph& g, std::span<const double> cost, std::span<const int> cover, int* rows) {
  return nu_lp(g, cost, cover, enumerate_minimal_vertex_covers(g), rows);
}

double frugality_nu(const Graph& g, std::span<const double> cost) {
  return frugality_nu(g, cost, min_vertex_cover_exact(g, cost).nodes);
}

double frugality_nu_all_covers(const Graph& g, std::span<const double> cost, std::span<const int> cover) {
  const int n = g.num_nodes();
  if (n > 16) throw SizeLimitExceeded("all-cover frugality LP limited to 16 nodes");
  std::vector<std::vector<int>> covers;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
    bool ok = true;
    for (auto [a, b] : g.edges())
      if (!((mask >> a) & 1) && !((mask >> b) & 1)) {
        ok = false;
        break;
      }
    if (!ok) continue;
    std::vector<int> t;
    for (int u = 0; u < n; ++u)
      if ((mask >> u) & 1) t.push_back(u);
    covers.push_back(std::move(t));
  }
  return nu_lp(g, cost, cover, covers, nullptr);
}

FrugalityReport frugality_report(const Graph& g, std::span<const double> cost, double payment) {
  FrugalityReport r;
  r.cover = min_vertex_cover_exact(g, cost).nodes;
  r.nu = frugality_nu(g, cost, r.cover, &r.constraints);
  r.payment = payment;
  if (r.nu > 0) r.ratio = payment / r.nu;
  else r.ratio = payment > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  return r;
}

FrugalityEstimate frugality_ratio_estimate(const VCMechanism& mech, const VCSkeleton& skeleton, int trials,
                                           std::uint64_t seed) {
  const int n = skeleton.graph.num_nodes();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  FrugalityEstimate best;
  auto score = [&](const std::vector<double>& c) {
    const auto inst = attach_costs(skeleton, c);
    const auto r = mech(inst);
    ++best.evaluations;
    const auto rep = frugality_report(skeleton.graph, c, r.total_payment());
    return std::isfinite(rep.ratio) ? rep.ratio : 0.0;
  };
  const int random_trials = std::max(1, trials / 2);
  for (int t = 0; t < random_trials; ++t) {
    std::vector<double> c(n);
    for (double& v : c) v = 1e-3 + unit(rng);
    const double s = score(c);
    if (s > best.estimate || best.costs.empty()) {
      best.estimate = s;
      best.costs = c;
    }
  }
  std::normal_distribution<double> step(0.0, 0.7);
  for (int t = random_trials; t < trials && n > 0; ++t) {
    auto c = best.costs;
    const int u = std::uniform_int_distribution<int>(0, n - 1)(rng);
    c[u] = std::max(1e-6, c[u] * std::exp(step(rng)));
    const double s = score(c);
    if (s >= best.estimate) {
      best.estimate = s;
      best.costs = std::move(c);
    }
  }
  return best;
}

std::vector<WMONFixture> wmon_fixtures() {
  std::vector<WMONFixture> out;
  {
    // u=0, a=1, b=2, v=3, d=4 on the cycle u-a-b-v-d-u.
    const Graph g(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}});
    WMONFixture f;
    f.name = "lp-rounding-five-cycle";
    f.instance.graph = g;
    f.instance.owners.sets = {{0, 3}, {1}, {2}, {4}};
    f.instance.costs = {{1.25, 1.0}, {1.0}, {1.0}, {1.0}};
    f.deviation = {9.0 / 8.0, 1.0 / 32.0};
    f.algorithm = on_node_costs(lp_rounding_algorithm);
    f.first = {0, 1, 2, 3, 4};
    f.second = {1, 3, 4};
    f.lhs = 1.25;
    f.rhs = 9.0 / 8.0;
    out.push_back(std::move(f));
  }
  const Graph path(4, {{0, 1}, {1, 2}, {2, 3}});  // u=0, x=1, y=2, v=3
  {
    WMONFixture f;
    f.name = "ordered-primal-dual-path";
    f.instance.graph = path;
    f.instance.owners.sets = {{0, 3}, {1}, {2}};
    f.instance.costs = {{1.0, 0.5}, {1.5}, {1.05}};
    f.deviation = {0.5, 0.3};
    f.algorithm = on_node_costs([](const Graph& g, std::span<const double> c) { return ordered_primal_dual(g, c); });
    f.first = {0, 1, 3};
    f.second = {0, 1, 2};
    f.lhs = 0.5;
    f.rhs = 0.3;
    out.push_back(std::move(f));
  }
  {
    WMONFixture f;
    f.name = "simultaneous-primal-dual-path";
    f.instance.graph = path;
    f.instance.owners.sets = {{0, 3}, {1}, {2}};
    f.instance.costs = {{1.0, 2.5}, {3.0}, {4.6}};
    f.deviation = {0.5, 2.4};
    f.algorithm = on_node_costs(simultaneous_primal_dual);
    f.first = {0, 1, 3};
    f.second = {0, 2};
    f.lhs = 2.5;
    f.rhs = 2.4;
    out.push_back(std::move(f));
  }
  return out;
}

VCSampler jitter_sampler(const VCInstance& base, double spread) {
  return [base, spread](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> f(1.0 - spread, 1.0 + spread);
    VCInstance inst = base;
    for (auto& row : inst.costs)
      for (double& v : row) v *= f(rng);
    return inst;
  };
}

VCSampler path_pair_sampler(double max_cost) {
  return [max_cost](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(0.0, max_cost);
    auto draw = [&] { return max_cost - d(rng); };  // (0, max_cost]
    VCInstance inst;
    inst.graph = Graph(4, {{0, 1}, {1, 2}, {2, 3}});
    inst.owners.sets = {{0, 3}, {1}, {2}};
    const double cu = draw(), cv = draw(), cx = draw(), cy = draw();
    inst.costs = {{cu, cv}, {cx}, {cy}};
    return inst;
  };
}

}  // namespace covermech
