#include "covermech/oracles.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>

#include "covermech/errors.hpp"
#include "covermech/flow.hpp"

namespace covermech {

namespace {

// Integer scale making every cost integral, or 0 when none fits comfortably.
long long integer_scale(std::span<const double> cost) {
  long long scale = 1;
  double max_cost = 0;
  for (double c : cost) {
    long num = 0, den = 1;
    if (!small_rational(c, 10000, num, den)) return 0;
    scale = std::lcm(scale, static_cast<long long>(den));
    if (scale > 1000000) return 0;
    max_cost = std::max(max_cost, c);
  }
  if (max_cost * static_cast<double>(scale) > 1e12) return 0;
  return scale;
}

// Left copy of u is node u, right copy is n + u; source 2n, sink 2n + 1.
template <class Cap>
std::vector<double> double_cover_solution(const Graph& g, const std::vector<Cap>& cap, Cap eps) {
  const int n = g.num_nodes();
  const int source = 2 * n, sink = 2 * n + 1;
  MaxFlow<Cap> flow(2 * n + 2, eps);
  for (int u = 0; u < n; ++u) {
    flow.add_arc(source, u, cap[u]);
    flow.add_arc(n + u, sink, cap[u]);
  }
  for (auto [u, v] : g.edges()) {
    flow.add_arc(u, n + v, MaxFlow<Cap>::infinity());
    flow.add_arc(v, n + u, MaxFlow<Cap>::infinity());
  }
  flow.solve(source, sink);
  const auto from_source = flow.reachable_from(source);
  const auto to_sink = flow.reaching(sink);
  std::vector<double> x(n, 0.5);
  for (int u = 0; u < n; ++u) {
    if (to_sink[u]) {
      x[u] = 1.0;
    } else if (from_source[u]) {
      x[u] = 0.0;
    }
  }
  return x;
}

}  // namespace

std::vector<double> vc_lp_solve(const Graph& g, std::span<const double> cost) {
  const int n = g.num_nodes();
  if (static_cast<int>(cost.size()) != n) throw std::invalid_argument("vc_lp_solve: cost length mismatch");
  for (double c : cost)
    if (!(c >= 0) || !std::isfinite(c)) throw std::invalid_argument("vc_lp_solve: costs must be finite and >= 0");
  if (const long long scale = integer_scale(cost); scale > 0) {
    std::vector<long long> cap(n);
    for (int u = 0; u < n; ++u) {
      long num = 0, den = 1;
      small_rational(cost[u], 10000, num, den);
      cap[u] = static_cast<long long>(num) * (scale / den);
    }
    return double_cover_solution<long long>(g, cap, 0);
  }
  double max_cost = 0;
  for (double c : cost) max_cost = std::max(max_cost, c);
  std::vector<double> cap(cost.begin(), cost.end());
  return double_cover_solution<double>(g, cap, 1e-12 * (1.0 + max_cost));
}

double vc_lp_value(const Graph& g, std::span<const double> cost) {
  const auto x = vc_lp_solve(g, cost);
  double v = 0;
  for (int u = 0; u < g.num_nodes(); ++u) v += cost[u] * x[u];
  return v;
}

LPProblem vc_lp_problem(const Graph& g, std::span<const double> cost) {
  LPProblem p(g.num_nodes(), Sense::minimize);
  p.objective.assign(cost.begin(), cost.end());
  for (auto [u, v] : g.edges()) {
    std::vector<double> row(g.num_nodes(), 0.0);
    row[u] = row[v] = 1.0;
    p.add_row(std::move(row), RowType::ge, 1.0);
  }
  return p;
}

namespace {

using Mask = std::uint32_t;

// Branch and bound over vertex covers of a graph with at most 24 nodes.
// Covers whose cost is at most `target` are reported to `visit`, which may
// stop the search by returning false. `prune_at_equal` tightens the search
// when only the optimum value is wanted.
class CoverSearch {
 public:
  CoverSearch(const Graph& g, std::span<const double> cost) : n_(g.num_nodes()), cost_(cost.begin(), cost.end()) {
    adj_.assign(n_, 0);
    for (auto [u, v] : g.edges()) {
      adj_[u] |= Mask{1} << v;
      adj_[v] |= Mask{1} << u;
    }
    edges_ = g.edges();
  }

  double cost_of(Mask m) const {
    double s = 0;
    for (; m; m &= m - 1) s += cost_[std::countr_zero(m)];
    return s;
  }

  // Greedy fractional edge packing on uncovered edges: a valid lower bound.
  double packing_bound(Mask in, Mask out) const {
    std::vector<double> left(cost_);
    double bound = 0;
    const Mask decided = in | out;
    for (auto [u, v] : edges_) {
      const Mask bu = Mask{1} << u, bv = Mask{1} << v;
      if ((in & bu) || (in & bv)) continue;
      if ((decided & bu) && (decided & bv)) continue;
      const double y = std::min(left[u], left[v]);
      bound += y;
      left[u] -= y;
      left[v] -= y;
    }
    return bound;
  }

  template <class Visit>
  void run(Mask in, Mask out, double target, bool prune_at_equal, Visit&& visit) {
    stop_ = false;
    explore(in, out, target, prune_at_equal, visit);
  }

  double best = std::numeric_limits<double>::infinity();

 private:
  // Forces neighbours of excluded nodes in; false on a contradiction.
  bool propagate(Mask& in, Mask& out) const {
    for (bool changed = true; changed;) {
      changed = false;
      for (Mask o = out; o; o &= o - 1) {
        const int v = std::countr_zero(o);
        const Mask need = adj_[v] & ~in;
        if (need & out) return false;
        if (need) {
          in |= need;
          changed = true;
        }
      }
    }
    return true;
  }

  template <class Visit>
  void explore(Mask in, Mask out, double target, bool prune_at_equal, Visit& visit) {
    if (stop_) return;
    if (!propagate(in, out)) return;
    const double base = cost_of(in);
    const double lb = base + packing_bound(in, out);
    const double tol = 1e-9 * std::max(1.0, std::fabs(prune_at_equal ? best : target));
    if (prune_at_equal ? lb >= best - tol : lb > target + tol) return;
    // Undecided node with the most undecided-or-uncovering neighbours.
    const Mask all = n_ == 32 ? ~Mask{0} : (Mask{1} << n_) - 1;
    const Mask open = all & ~(in | out);
    int pick = -1, pick_deg = 0;
    for (Mask o = open; o; o &= o - 1) {
      const int v = std::countr_zero(o);
      const int d = std::popcount(adj_[v] & open);
      if (d > pick_deg) {
        pick = v;
        pick_deg = d;
      }
    }
    if (pick < 0) {
      // Remaining undecided nodes have no uncovered edges: leave them out.
      if (prune_at_equal) {
        best = std::min(best, base);
      } else if (base <= target + tol && !visit(in)) {
        stop_ = true;
      }
      return;
    }
    const Mask bit = Mask{1} << pick;
    explore(in | bit, out, target, prune_at_equal, visit);
    explore(in, out | bit, target, prune_at_equal, visit);
  }

  int n_;
  std::vector<double> cost_;
  std::vector<Mask> adj_;
  std::vector<Edge> edges_;
  bool stop_ = false;
};

void check_exact_size(const Graph& g, std::span<const double> cost) {
  if (g.num_nodes() > kMaxExactVCNodes) {
    throw SizeLimitExceeded("exact vertex cover limited to " + std::to_string(kMaxExactVCNodes) + " nodes, got " +
                            std::to_string(g.num_nodes()));
  }
  if (static_cast<int>(cost.size()) != g.num_nodes()) throw std::invalid_argument("vertex cover: cost length mismatch");
}

std::vector<int> mask_nodes(Mask m) {
  std::vector<int> out;
  for (; m; m &= m - 1) out.push_back(std::countr_zero(m));
  return out;
}

// Optimum value; seeded with the rounded LP cover as the incumbent.
double optimum_value(const Graph& g, std::span<const double> cost, CoverSearch& search) {
  const auto x = vc_lp_solve(g, cost);
  Mask rounded = 0;
  for (int u = 0; u < g.num_nodes(); ++u)
    if (x[u] >= 0.5) rounded |= Mask{1} << u;
  search.best = search.cost_of(rounded);
  search.run(0, 0, search.best, true, [](Mask) { return true; });
  return search.best;
}

}  // namespace

CoverResult min_vertex_cover_exact(const Graph& g, std::span<const double> cost) {
  check_exact_size(g, cost);
  const int n = g.num_nodes();
  CoverSearch search(g, cost);
  const double opt = optimum_value(g, cost, search);
  const double target = opt + 1e-9 * std::max(1.0, std::fabs(opt));

  // Lexicographically smallest sorted list: stop as soon as the chosen prefix
  // is itself an optimal cover, otherwise take the smallest next node that
  // still admits an optimal completion.
  Mask in = 0, out = 0;
  auto feasible = [&](Mask i, Mask o) {
    bool found = false;
    search.run(i, o, target, false, [&](Mask) {
      found = true;
      return false;
    });
    return found;
  };
  for (int u = 0; u < n; ++u) {
    if (g.is_vertex_cover(std::span<const int>(mask_nodes(in)))) break;
    const Mask bit = Mask{1} << u;
    if (feasible(in | bit, out)) {
      in |= bit;
    } else {
      out |= bit;
    }
  }
  CoverResult res{mask_nodes(in), 0.0};
  for (int u : res.nodes) res.cost += cost[u];
  return res;
}

std::vector<std::vector<int>> all_min_vertex_covers(const Graph& g, std::span<const double> cost, long limit) {
  check_exact_size(g, cost);
  CoverSearch search(g, cost);
  const double opt = optimum_value(g, cost, search);
  const double target = opt + 1e-9 * std::max(1.0, std::fabs(opt));
  std::vector<std::vector<int>> out;
  search.run(0, 0, target, false, [&](Mask m) {
    out.push_back(mask_nodes(m));
    if (static_cast<long>(out.size()) > limit) throw SizeLimitExceeded("too many optimal vertex covers");
    return true;
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::vector<int>> enumerate_minimal_vertex_covers(const Graph& g) {
  const int n = g.num_nodes();
  if (n > kMaxExactVCNodes) {
    throw SizeLimitExceeded("minimal cover enumeration limited to " + std::to_string(kMaxExactVCNodes) + " nodes");
  }
  const Mask all = (Mask{1} << n) - 1;
  std::vector<Mask> compat(n);  // non-neighbours
  for (int u = 0; u < n; ++u) {
    Mask adj = 0;
    for (int v : g.neighbors(u)) adj |= Mask{1} << v;
    compat[u] = all & ~adj & ~(Mask{1} << u);
  }
  std::vector<std::vector<int>> covers;
  // Bron-Kerbosch with pivoting over the compatibility graph.
  auto rec = [&](auto&& self, Mask r, Mask p, Mask x) -> void {
    if (!p && !x) {
      covers.push_back(mask_nodes(all & ~r));
      if (static_cast<long>(covers.size()) > kMaxMinimalCovers)
        throw SizeLimitExceeded("more than " + std::to_string(kMaxMinimalCovers) + " minimal vertex covers");
      return;
    }
    int pivot = -1, best = -1;
    for (Mask c = p | x; c; c &= c - 1) {
      const int u = std::countr_zero(c);
      const int k = std::popcount(p & compat[u]);
      if (k > best) {
        best = k;
        pivot = u;
      }
    }
    for (Mask c = p & ~compat[pivot]; c; c &= c - 1) {
      const int v = std::countr_zero(c);
      const Mask bit = Mask{1} << v;
      self(self, r | bit, p & compat[v], x & compat[v]);
      p &= ~bit;
      x |= bit;
    }
  };
  rec(rec, 0, all, 0);
  std::sort(covers.begin(), covers.end());
  return covers;
}

LPProblem flp_problem(const UFLInstance& inst) {
  const int nf = inst.num_facilities(), nd = inst.num_clients;
  LPProblem p(nf + nf * nd, Sense::minimize);
  for (int l = 0; l < nf; ++l) {
    p.objective[l] = inst.open_cost[l];
    for (int j = 0; j < nd; ++j) p.objective[flp_x_index(inst, l, j)] = inst.assign_cost[l][j];
  }
  for (int l = 0; l < nf; ++l) p.set_bounds(l, 0.0, 1.0);
  for (int j = 0; j < nd; ++j) {
    std::vector<double> row(p.num_vars(), 0.0);
    for (int l = 0; l < nf; ++l) row[flp_x_index(inst, l, j)] = 1.0;
    p.add_row(std::move(row), RowType::ge, 1.0);
  }
  for (int l = 0; l < nf; ++l) {
    for (int j = 0; j < nd; ++j) {
      std::vector<double> row(p.num_vars(), 0.0);
      row[flp_x_index(inst, l, j)] = 1.0;
      row[l] = -1.0;
      p.add_row(std::move(row), RowType::le, 0.0);
    }
  }
  return p;
}

double flp_value(const UFLInstance& inst) {
  const auto sol = lp_solve(flp_problem(inst));
  if (!sol.optimal()) throw std::runtime_error("facility LP not solved to optimality");
  return sol.objective;
}

namespace {

double subset_cost(const UFLInstance& inst, std::uint32_t mask) {
  double total = 0;
  for (std::uint32_t m = mask; m; m &= m - 1) total += inst.open_cost[std::countr_zero(m)];
  for (int j = 0; j < inst.num_clients; ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t m = mask; m; m &= m - 1) best = std::min(best, inst.assign_cost[std::countr_zero(m)][j]);
    total += best;
  }
  return total;
}

}  // namespace

UFLSolution ufl_exact(const UFLInstance& inst, Exec exec) {
  const int nf = inst.num_facilities();
  if (nf > kMaxExactUFLFacilities) {
    throw SizeLimitExceeded("exact facility location limited to " + std::to_string(kMaxExactUFLFacilities) +
                            " facilities, got " + std::to_string(nf));
  }
  if (nf == 0) throw std::invalid_argument("ufl_exact: no facilities");
  const std::uint32_t end = std::uint32_t{1} << nf;
  std::uint32_t best_mask = 0;
  double best = std::numeric_limits<double>::infinity();
  if (exec == Exec::serial) {
    for (std::uint32_t mask = 1; mask < end; ++mask) {
      const double c = subset_cost(inst, mask);
      if (c < best) {
        best = c;
        best_mask = mask;
      }
    }
  } else {
#pragma omp parallel num_threads(worker_threads())
    {
      std::uint32_t local_mask = 0;
      double local = std::numeric_limits<double>::infinity();
#pragma omp for schedule(static) nowait
      for (long long mask = 1; mask < static_cast<long long>(end); ++mask) {
        const double c = subset_cost(inst, static_cast<std::uint32_t>(mask));
        if (c < local) {
          local = c;
          local_mask = static_cast<std::uint32_t>(mask);
        }
      }
#pragma omp critical
      {
        if (local < best || (local == best && local_mask != 0 && local_mask < best_mask)) {
          best = local;
          best_mask = local_mask;
        }
      }
    }
  }
  std::vector<char> open(nf, 0);
  for (int l = 0; l < nf; ++l) open[l] = (best_mask >> l) & 1;
  return assign_nearest(inst, open);
}

bool lmp_certificate(const UFLInstance&, const UFLSolution& sol, double rho, double lp_opt) {
  return rho * sol.facility_cost + sol.connection_cost <= rho * lp_opt + 1e-7;
}

bool lmp_certificate(const UFLInstance& inst, const UFLSolution& sol, double rho) {
  return lmp_certificate(inst, sol, rho, flp_value(inst));
}

}  // namespace covermech
