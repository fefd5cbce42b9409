#include "covermech/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>

#include "covermech/errors.hpp"
#include "covermech/oracles.hpp"

namespace covermech {

const char* part_kind_name(PartKind k) {
  switch (k) {
    case PartKind::whole: return "whole";
    case PartKind::single_dimensional: return "single_dimensional";
    case PartKind::sparse_core: return "sparse_core";
    case PartKind::star: return "star";
  }
  return "?";
}

double Decomposition::ratio_sum() const {
  double s = 0;
  for (const auto& p : parts) s += p.ratio;
  return s;
}

void check_edge_coverage(const Graph& g, const Decomposition& d) {
  std::vector<char> seen(g.num_edges(), 0);
  // Edge ids by endpoint pair; adjacency lists are short, so a scan is fine.
  auto edge_id = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    const auto& e = g.edges();
    const auto it = std::lower_bound(e.begin(), e.end(), Edge{a, b});
    return it != e.end() && *it == Edge{a, b} ? static_cast<int>(it - e.begin()) : -1;
  };
  for (const auto& p : d.parts) {
    for (auto [a, b] : p.graph.edges()) {
      const int id = edge_id(p.origin[a], p.origin[b]);
      if (id < 0) throw ContractViolation("decomposition part contains an edge that is not in the graph");
      seen[id] = 1;
    }
  }
  for (int k = 0; k < g.num_edges(); ++k) {
    if (!seen[k]) {
      std::ostringstream os;
      os << "edge-coverage violation: edge (" << g.edges()[k].first << "," << g.edges()[k].second
         << ") lies in no part";
      throw ContractViolation(os.str());
    }
  }
}

std::vector<double> part_costs(const Part& p, std::span<const double> cost) {
  std::vector<double> local(p.origin.size());
  for (std::size_t k = 0; k < p.origin.size(); ++k) local[k] = cost[p.origin[k]];
  return local;
}

std::vector<int> part_selection(const Part& p, std::span<const double> cost) {
  const auto local = part_costs(p, cost);
  std::vector<int> out;
  for (int k = 0; k < static_cast<int>(local.size()); ++k)
    if (local[k] <= p.family.threshold(k, local)) out.push_back(k);
  return out;
}

ThresholdFamily combine(const Graph& g, const Decomposition& d) {
  check_edge_coverage(g, d);
  auto parts = std::make_shared<const std::vector<Part>>(d.parts);
  auto member = std::make_shared<std::vector<std::vector<std::pair<int, int>>>>(g.num_nodes());
  bool all_neighbor = !d.parts.empty();
  for (int q = 0; q < static_cast<int>(d.parts.size()); ++q) {
    const auto& p = d.parts[q];
    if (p.family.kind() != ThresholdKind::neighbor) all_neighbor = false;
    for (int k = 0; k < static_cast<int>(p.origin.size()); ++k) (*member)[p.origin[k]].emplace_back(q, k);
  }
  NodeThreshold f = [parts, member](int u, std::span<const double> cost) {
    double t = 0;
    for (auto [q, k] : (*member)[u]) {
      const auto local = part_costs((*parts)[q], cost);
      t = std::max(t, (*parts)[q].family.threshold(k, local));
    }
    return t;
  };
  if (all_neighbor) return ThresholdFamily::neighbor(g, std::move(f));
  return ThresholdFamily::general(g.num_nodes(), std::move(f));
}

namespace {

std::uint64_t guard_rounds(double factor) { return static_cast<std::uint64_t>(std::ceil(factor)); }

// One conflict-free random pick per agent: agents in random order each take
// a uniform element of candidates[i] unless some owner of its original is
// already represented.
std::vector<int> pick_round(const std::vector<std::vector<int>>& candidates, const std::vector<int>& origin,
                            const std::vector<std::vector<int>>& owners_of, std::mt19937_64& rng) {
  const int agents = static_cast<int>(candidates.size());
  std::vector<int> order(agents);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<char> blocked(agents, 0);
  std::vector<int> picked;
  for (int i : order) {
    if (candidates[i].empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, candidates[i].size() - 1);
    const int v = candidates[i][pick(rng)];
    if (blocked[i]) continue;
    const auto& own = owners_of[origin.empty() ? v : origin[v]];
    if (std::any_of(own.begin(), own.end(), [&](int j) { return blocked[j]; })) continue;
    for (int j : own) blocked[j] = 1;
    picked.push_back(v);
  }
  return picked;
}

}  // namespace

std::vector<std::vector<int>> random_singledim_decomposition(const VCInstance& inst, std::uint64_t seed) {
  const Graph& g = inst.graph;
  const int n = g.num_nodes();
  const auto owners_of = inst.owners.owners_by_node(n);
  std::vector<int> unowned;
  for (int u = 0; u < n; ++u)
    if (owners_of[u].empty()) unowned.push_back(u);
  const double r = std::max(1, inst.owners.dimension());
  const auto guard = guard_rounds(64.0 * r * r * std::log(g.num_edges() + 1.0));

  std::mt19937_64 rng(seed);
  std::vector<char> covered(g.num_edges(), 0);
  int remaining = g.num_edges();
  std::vector<std::vector<int>> out;
  while (remaining > 0) {
    if (out.size() >= guard) {
      std::ostringstream os;
      os << "single-dimensional decomposition exceeded " << guard << " rounds (seed " << seed << ")";
      throw LoopGuardExceeded(os.str());
    }
    auto part = pick_round(inst.owners.sets, {}, owners_of, rng);
    part.insert(part.end(), unowned.begin(), unowned.end());
    std::sort(part.begin(), part.end());
    std::vector<char> in(n, 0);
    for (int u : part) in[u] = 1;
    for (int k = 0; k < g.num_edges(); ++k) {
      const auto [a, b] = g.edges()[k];
      if (!covered[k] && in[a] && in[b]) {
        covered[k] = 1;
        --remaining;
      }
    }
    out.push_back(std::move(part));
  }
  return out;
}

std::vector<char> singledim_allocation(const Graph& g, std::span<const double> cost) {
  const auto x = vc_lp_solve(g, cost);
  std::vector<char> sel(x.size());
  for (std::size_t u = 0; u < x.size(); ++u) sel[u] = x[u] >= 0.5;
  return sel;
}

namespace {

double critical_value(const Graph& g, int u, std::span<const double> cost) {
  std::vector<double> c(cost.begin(), cost.end());
  double scale = 1, others = 0;
  for (int w = 0; w < g.num_nodes(); ++w) {
    if (w == u) continue;
    scale = std::max(scale, c[w]);
    others += c[w];
  }
  auto selected_at = [&](double b) {
    c[u] = b;
    return singledim_allocation(g, c)[u] != 0;
  };
  if (!selected_at(0.0)) return 0.0;
  // Above the total cost of everything else, dropping u is always cheaper.
  double hi = 2.0 * others + 1.0, lo = 0.0;
  if (selected_at(hi)) return hi;
  while (hi - lo > 1e-10 * scale) {
    const double mid = 0.5 * (lo + hi);
    if (selected_at(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // The upper end keeps boundary ties (where the LP still picks u) selected.
  return hi;
}

}  // namespace

ThresholdFamily singledim_vc_mechanism(const Graph& g) {
  auto graph = std::make_shared<const Graph>(g);
  return ThresholdFamily::general(g.num_nodes(), [graph](int u, std::span<const double> cost) {
    return critical_value(*graph, u, cost);
  });
}

void check_singledim_monotone(const Graph& g, std::span<const double> cost, int probes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> c(cost.begin(), cost.end());
  const auto base = singledim_allocation(g, c);
  std::vector<int> chosen;
  for (int u = 0; u < g.num_nodes(); ++u)
    if (base[u]) chosen.push_back(u);
  if (chosen.empty()) return;
  for (int p = 0; p < probes; ++p) {
    const int u = chosen[std::uniform_int_distribution<std::size_t>(0, chosen.size() - 1)(rng)];
    const double lowered = c[u] * unit(rng);
    const double keep = c[u];
    c[u] = lowered;
    const bool still = singledim_allocation(g, c)[u] != 0;
    c[u] = keep;
    if (!still) {
      std::ostringstream os;
      os << "node " << u << " selected at cost " << keep << " but dropped at " << lowered;
      throw MonotonicityViolation(os.str());
    }
  }
}

DecompositionRun rdim_mechanism(const VCInstance& inst, std::uint64_t seed) {
  DecompositionRun run;
  run.decomposition.num_nodes = inst.num_nodes();
  for (auto& nodes : random_singledim_decomposition(inst, seed)) {
    Part p;
    p.kind = PartKind::single_dimensional;
    p.graph = inst.graph.induced(nodes);
    p.family = singledim_vc_mechanism(p.graph);
    p.origin = std::move(nodes);
    p.ratio = 2.0;
    run.decomposition.parts.push_back(std::move(p));
  }
  if (run.decomposition.parts.empty()) {
    run.result = run_any(ThresholdFamily::general(inst.num_nodes(), [](int, std::span<const double>) { return 0.0; }),
                         inst);
    return run;
  }
  run.result = run_any(combine(inst.graph, run.decomposition), inst);
  return run;
}

PeelingResult sparse_peeling(const Graph& g, double gamma) {
  const int n = g.num_nodes();
  const Density d = max_subgraph_density(g);
  if (gamma * static_cast<double>(d.nodes) < static_cast<double>(d.edges) * (1 - 1e-12)) {
    std::ostringstream os;
    os << "gamma " << gamma << " is below the maximum subgraph density " << d.edges << "/" << d.nodes;
    throw PreconditionError(os.str());
  }
  PeelingResult res;
  res.gamma = gamma;
  std::vector<char> alive(n, 1);
  std::vector<int> deg(n);
  int live_edges = g.num_edges();
  for (int u = 0; u < n; ++u) deg[u] = g.degree(u);
  const double cut = 4.0 * gamma;
  while (live_edges > 0) {
    std::vector<int> core;
    for (int u = 0; u < n; ++u)
      if (alive[u] && deg[u] <= cut) core.push_back(u);
    if (core.empty()) throw PreconditionError("peeling stalled: gamma is below the density of the residual graph");
    std::vector<char> in_core(n, 0);
    for (int u : core) in_core[u] = 1;
    std::vector<int> rim;
    std::vector<Edge> cross;
    std::vector<char> in_rim(n, 0);
    for (int t : core) {
      for (int v : g.neighbors(t)) {
        if (!alive[v] || in_core[v]) continue;
        cross.emplace_back(v, t);
        if (!in_rim[v]) {
          in_rim[v] = 1;
          rim.push_back(v);
        }
      }
    }
    std::sort(rim.begin(), rim.end());
    std::sort(cross.begin(), cross.end());
    for (int t : core) {
      alive[t] = 0;
      for (int v : g.neighbors(t)) {
        if (!alive[v] && !in_core[v]) continue;
        if (in_core[v] && v < t) continue;  // count core-core edges once
        --live_edges;
        if (alive[v]) --deg[v];
      }
    }
    res.core.push_back(std::move(core));
    res.rim.push_back(std::move(rim));
    res.cross.push_back(std::move(cross));
  }

  std::vector<char> in_t(n, 0), in_r(n, 0);
  for (const auto& c : res.core)
    for (int u : c) in_t[u] = 1;
  for (const auto& r : res.rim)
    for (int u : r) in_r[u] = 1;
  res.core_copy.assign(n, -1);
  res.rim_copy.assign(n, -1);
  for (int u = 0; u < n; ++u) {
    if (in_t[u]) {
      res.core_copy[u] = static_cast<int>(res.origin.size());
      res.origin.push_back(u);
      res.is_rim.push_back(0);
    }
    if (in_r[u]) {
      res.rim_copy[u] = static_cast<int>(res.origin.size());
      res.origin.push_back(u);
      res.is_rim.push_back(1);
    }
  }
  std::vector<Edge> f;
  for (const auto& cross : res.cross)
    for (auto [r, t] : cross) f.emplace_back(res.rim_copy[r], res.core_copy[t]);
  for (auto& e : f)
    if (e.first > e.second) std::swap(e.first, e.second);
  res.copy_graph = Graph(static_cast<int>(res.origin.size()), std::move(f));
  return res;
}

std::vector<ZPart> zj_decomposition(const PeelingResult& peel, const Ownership& owners, int num_nodes,
                                    std::uint64_t seed) {
  const Graph& b = peel.copy_graph;
  const auto owners_of = owners.owners_by_node(num_nodes);
  std::vector<std::vector<int>> candidates(owners.num_agents());
  std::vector<int> unowned;
  for (int v = 0; v < b.num_nodes(); ++v) {
    if (peel.is_rim[v]) continue;
    const auto& own = owners_of[peel.origin[v]];
    if (own.empty()) unowned.push_back(v);
    for (int i : own) candidates[i].push_back(v);
  }
  const double r = std::max(1, owners.dimension());
  const auto guard = guard_rounds(64.0 * r * std::log(b.num_edges() + 1.0));

  std::mt19937_64 rng(seed);
  std::vector<char> covered(b.num_edges(), 0);
  int remaining = b.num_edges();
  std::vector<ZPart> out;
  std::uint64_t rounds = 0;
  while (remaining > 0) {
    if (rounds++ >= guard) {
      std::ostringstream os;
      os << "Z decomposition exceeded " << guard << " rounds (seed " << seed << ")";
      throw LoopGuardExceeded(os.str());
    }
    auto x = pick_round(candidates, peel.origin, owners_of, rng);
    x.insert(x.end(), unowned.begin(), unowned.end());
    std::sort(x.begin(), x.end());
    std::vector<char> in_x(b.num_nodes(), 0);
    for (int v : x) in_x[v] = 1;
    ZPart z;
    std::vector<char> in_y(b.num_nodes(), 0);
    std::vector<char> has_edge(b.num_nodes(), 0);
    for (int k = 0; k < b.num_edges(); ++k) {
      auto [p, q] = b.edges()[k];
      if (!peel.is_rim[p]) std::swap(p, q);  // p rim, q core
      if (!in_x[q]) continue;
      z.edges.emplace_back(p, q);
      in_y[p] = 1;
      has_edge[q] = 1;
      if (!covered[k]) {
        covered[k] = 1;
        --remaining;
      }
    }
    if (z.edges.empty()) continue;
    for (int v : x)
      if (has_edge[v]) z.x.push_back(v);
    for (int v = 0; v < b.num_nodes(); ++v)
      if (in_y[v]) z.y.push_back(v);
    out.push_back(std::move(z));
  }
  return out;
}

ThresholdFamily star_mechanism(const Graph& z, std::vector<char> is_y) {
  if (static_cast<int>(is_y.size()) != z.num_nodes()) throw std::invalid_argument("star_mechanism: side vector size");
  for (auto [a, b] : z.edges())
    if (is_y[a] == is_y[b]) throw PreconditionError("star_mechanism: graph is not bipartite between the sides");
  auto graph = std::make_shared<const Graph>(z);
  auto side = std::make_shared<const std::vector<char>>(std::move(is_y));
  return ThresholdFamily::general(z.num_nodes(), [graph, side](int v, std::span<const double> c) {
    const Graph& g = *graph;
    if ((*side)[v]) {
      double s = 0;
      for (int w : g.neighbors(v)) s += c[w];
      return s;
    }
    double t = 0;
    for (int u : g.neighbors(v)) {
      double rest = 0;
      for (int w : g.neighbors(u))
        if (w != v) rest += c[w];
      t = std::max(t, c[u] - rest);
    }
    return t;
  });
}

std::vector<char> star_literal_rule(const Graph& z, std::span<const char> is_y, std::span<const double> cost) {
  std::vector<char> sel(z.num_nodes(), 0);
  for (int u = 0; u < z.num_nodes(); ++u) {
    if (!is_y[u]) continue;
    double s = 0;
    for (int w : z.neighbors(u)) s += cost[w];
    if (cost[u] <= s) sel[u] = 1;
    if (s <= cost[u])
      for (int w : z.neighbors(u)) sel[w] = 1;
  }
  return sel;
}

namespace {

// Every Y node's X neighbours must have pairwise disjoint owner sets.
void check_star_ownership(const Part& p, const std::vector<char>& is_y,
                          const std::vector<std::vector<int>>& owners_of, int agents) {
  std::vector<int> mark(agents, -1);
  for (int u = 0; u < p.graph.num_nodes(); ++u) {
    if (!is_y[u]) continue;
    for (int w : p.graph.neighbors(u)) {
      for (int i : owners_of[p.origin[w]]) {
        if (mark[i] == u) {
          std::ostringstream os;
          os << "star-ownership violated: node " << p.origin[u] << " has two neighbours owned by agent " << i;
          throw PreconditionError(os.str());
        }
        mark[i] = u;
      }
    }
  }
}

void check_star_rule(const Part& p, const std::vector<char>& is_y, std::span<const double> cost) {
  const auto local = part_costs(p, cost);
  const auto literal = star_literal_rule(p.graph, is_y, local);
  for (int k = 0; k < p.graph.num_nodes(); ++k) {
    const double t = p.family.threshold(k, local);
    const bool by_threshold = local[k] <= t;
    if (by_threshold == static_cast<bool>(literal[k])) continue;
    // A zero-cost X node meets a zero threshold without the rule picking it.
    if (by_threshold && !is_y[k] && local[k] == 0 && t == 0) continue;
    std::ostringstream os;
    os << "star thresholds disagree with the literal rule at node " << p.origin[k];
    throw ContractViolation(os.str());
  }
}

}  // namespace

MinorRun minor_closed_mechanism(const VCInstance& inst, MinorOptions opt) {
  const Graph& g = inst.graph;
  const double gamma = opt.gamma > 0 ? opt.gamma : sparsity_gamma(g);
  MinorRun run;
  run.peeling = sparse_peeling(g, gamma);
  const PeelingResult& peel = run.peeling;
  auto& d = run.decomposition;
  d.num_nodes = g.num_nodes();

  for (const auto& core : peel.core) {
    Part p;
    p.kind = PartKind::sparse_core;
    p.graph = g.induced(core);
    if (p.graph.num_edges() == 0) continue;
    p.origin = core;
    p.family = ax_mechanism(p.graph, std::vector<double>(core.size(), 1.0));
    p.ratio = 4 * gamma + 1;
    d.parts.push_back(std::move(p));
  }

  std::vector<ZPart> zs;
  if (opt.skip_z) {
    if (peel.copy_graph.num_edges() > 0) {
      ZPart all;
      for (int v = 0; v < peel.copy_graph.num_nodes(); ++v) {
        if (peel.copy_graph.degree(v) == 0) continue;
        (peel.is_rim[v] ? all.y : all.x).push_back(v);
      }
      for (auto [a, b] : peel.copy_graph.edges()) all.edges.emplace_back(peel.is_rim[a] ? a : b, peel.is_rim[a] ? b : a);
      zs.push_back(std::move(all));
    }
  } else {
    zs = zj_decomposition(peel, inst.owners, g.num_nodes(), opt.seed);
  }
  run.z_parts = static_cast<int>(zs.size());

  const auto owners_of = inst.owners.owners_by_node(g.num_nodes());
  std::vector<std::vector<char>> sides;
  for (const auto& z : zs) {
    Part p;
    p.kind = PartKind::star;
    std::vector<int> local(peel.copy_graph.num_nodes(), -1);
    std::vector<char> is_y;
    for (int v : z.x) {
      local[v] = static_cast<int>(p.origin.size());
      p.origin.push_back(peel.origin[v]);
      is_y.push_back(0);
    }
    for (int v : z.y) {
      local[v] = static_cast<int>(p.origin.size());
      p.origin.push_back(peel.origin[v]);
      is_y.push_back(1);
    }
    std::vector<Edge> edges;
    for (auto [y, x] : z.edges) edges.emplace_back(std::min(local[y], local[x]), std::max(local[y], local[x]));
    p.graph = Graph(static_cast<int>(p.origin.size()), std::move(edges));
    std::vector<int> sorted = p.origin;
    std::sort(sorted.begin(), sorted.end());
    const bool doubled = std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
    // A cover of G lifts to the copies at up to twice its cost.
    p.ratio = 8 * gamma * (doubled ? 2 : 1);
    check_star_ownership(p, is_y, owners_of, inst.num_agents());
    p.family = star_mechanism(p.graph, is_y);
    d.parts.push_back(std::move(p));
    sides.push_back(std::move(is_y));
  }

  const auto chat = inst.node_costs();
  const std::size_t first_star = d.parts.size() - zs.size();
  for (std::size_t k = 0; k < zs.size(); ++k) check_star_rule(d.parts[first_star + k], sides[k], chat);

  if (d.parts.empty()) {
    run.result = run_any(ThresholdFamily::general(g.num_nodes(), [](int, std::span<const double>) { return 0.0; }), inst);
    return run;
  }
  run.result = run_any(combine(g, d), inst);
  return run;
}

void check_three_hop_far(const VCInstance& inst) {
  const Graph& g = inst.graph;
  const auto owners_of = inst.owners.owners_by_node(g.num_nodes());
  std::vector<int> mark(inst.num_agents(), -1);
  for (int u = 0; u < g.num_nodes(); ++u) {
    for (int w : g.neighbors(u)) {
      for (int i : owners_of[w]) {
        if (mark[i] == u) {
          std::ostringstream os;
          os << "instance is not 3-hop-far: node " << u << " has two neighbours owned by agent " << i;
          throw PreconditionError(os.str());
        }
        mark[i] = u;
      }
    }
  }
}

MinorRun threehop_mechanism(const VCInstance& inst, double gamma) {
  check_three_hop_far(inst);
  MinorOptions opt;
  opt.gamma = gamma;
  opt.skip_z = true;
  return minor_closed_mechanism(inst, opt);
}

}  // namespace covermech
