#ifndef COVERMECH_TESTS_SUPPORT_HPP
#define COVERMECH_TESTS_SUPPORT_HPP

// Brute-force reference computations and small generators shared by tests.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "covermech/graph.hpp"
#include "covermech/instance.hpp"

namespace covermech::testing {

inline Graph random_graph(int n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> e;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (coin(rng)) e.emplace_back(u, v);
  return Graph(n, std::move(e));
}

inline std::vector<double> random_costs(int n, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> c(n);
  for (double& x : c) x = d(rng);
  return c;
}

inline bool covers(const Graph& g, std::uint32_t mask) {
  for (auto [u, v] : g.edges())
    if (!((mask >> u) & 1) && !((mask >> v) & 1)) return false;
  return true;
}

inline double mask_cost(std::uint32_t mask, const std::vector<double>& c) {
  double s = 0;
  for (std::size_t u = 0; u < c.size(); ++u)
    if ((mask >> u) & 1) s += c[u];
  return s;
}

// Minimum cover cost by trying all subsets.
inline double brute_min_cover(const Graph& g, const std::vector<double>& c) {
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t m = 0; m < (std::uint32_t{1} << g.num_nodes()); ++m)
    if (covers(g, m)) best = std::min(best, mask_cost(m, c));
  return best;
}

// Maximum |E[S]| / |S| over all nonempty S.
inline double brute_density(const Graph& g) {
  double best = 0;
  for (std::uint32_t m = 1; m < (std::uint32_t{1} << g.num_nodes()); ++m) {
    int e = 0;
    for (auto [u, v] : g.edges())
      if (((m >> u) & 1) && ((m >> v) & 1)) ++e;
    best = std::max(best, static_cast<double>(e) / std::popcount(m));
  }
  return best;
}

// Smallest achievable max in-degree over all 2^m orientations.
inline int brute_min_max_indegree(const Graph& g) {
  const int m = g.num_edges();
  int best = std::numeric_limits<int>::max();
  for (std::uint32_t o = 0; o < (std::uint32_t{1} << m); ++o) {
    std::vector<int> in(g.num_nodes(), 0);
    for (int k = 0; k < m; ++k) ++in[(o >> k) & 1 ? g.edges()[k].first : g.edges()[k].second];
    best = std::min(best, in.empty() ? 0 : *std::max_element(in.begin(), in.end()));
  }
  return g.num_nodes() == 0 ? 0 : best;
}

// Inclusion-minimal covers by checking every subset.
inline std::vector<std::vector<int>> brute_minimal_covers(const Graph& g) {
  std::vector<std::vector<int>> out;
  const int n = g.num_nodes();
  for (std::uint32_t m = 0; m < (std::uint32_t{1} << n); ++m) {
    if (!covers(g, m)) continue;
    bool minimal = true;
    for (int u = 0; u < n && minimal; ++u)
      if (((m >> u) & 1) && covers(g, m & ~(std::uint32_t{1} << u))) minimal = false;
    if (!minimal) continue;
    std::vector<int> s;
    for (int u = 0; u < n; ++u)
      if ((m >> u) & 1) s.push_back(u);
    out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Cheapest facility subset with nearest assignment, by enumeration.
inline double brute_ufl(const UFLInstance& inst) {
  double best = std::numeric_limits<double>::infinity();
  const int nf = inst.num_facilities();
  for (std::uint32_t m = 1; m < (std::uint32_t{1} << nf); ++m) {
    double c = 0;
    for (int l = 0; l < nf; ++l)
      if ((m >> l) & 1) c += inst.open_cost[l];
    for (int j = 0; j < inst.num_clients; ++j) {
      double d = std::numeric_limits<double>::infinity();
      for (int l = 0; l < nf; ++l)
        if ((m >> l) & 1) d = std::min(d, inst.assign_cost[l][j]);
      c += d;
    }
    best = std::min(best, c);
  }
  return best;
}

// Sparse random graph: a random forest plus a few chords.
inline Graph sparse_graph(int n, int extra, std::mt19937_64& rng) {
  std::vector<Edge> e;
  for (int v = 1; v < n; ++v) e.emplace_back(std::uniform_int_distribution<int>(0, v - 1)(rng), v);
  std::uniform_int_distribution<int> node(0, n - 1);
  for (int k = 0; k < extra; ++k) {
    int a = node(rng), b = node(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (std::find(e.begin(), e.end(), Edge{a, b}) == e.end()) e.emplace_back(a, b);
  }
  return Graph(n, e);
}

// Sparse graph plus a hub adjacent to everything, with random independent
// ownership groups of size <= r.
inline VCInstance hub_instance(int n, int r, std::mt19937_64& rng) {
  const Graph base = sparse_graph(n - 1, 2, rng);
  std::vector<Edge> e;
  for (auto [a, b] : base.edges()) e.emplace_back(a + 1, b + 1);
  for (int v = 1; v < n; ++v) e.emplace_back(0, v);
  const Graph g(n, e);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  Ownership own;
  std::vector<char> used(n, 0);
  for (int a : order) {
    if (used[a]) continue;
    std::vector<int> group{a};
    used[a] = 1;
    for (int b : order) {
      if (static_cast<int>(group.size()) >= r) break;
      if (used[b] || std::any_of(group.begin(), group.end(), [&](int u) { return g.has_edge(u, b); })) continue;
      group.push_back(b);
      used[b] = 1;
    }
    std::sort(group.begin(), group.end());
    own.sets.push_back(group);
  }
  std::uniform_real_distribution<double> d(0.0, 1.0);
  std::vector<double> c(n);
  for (double& x : c) x = d(rng);
  return attach_costs({g, own}, c);
}

// Adds an edge at every isolated node so that no node is isolated.
inline Graph without_isolated(const Graph& g) {
  const int n = g.num_nodes();
  std::vector<Edge> e = g.edges();
  for (int u = 0; u < n; ++u)
    if (g.degree(u) == 0 && n > 1) e.emplace_back(std::min(u, (u + 1) % n), std::max(u, (u + 1) % n));
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  return Graph(n, e);
}

inline std::vector<double> ones(int n) { return std::vector<double>(n, 1.0); }

}  // namespace covermech::testing

#endif  // COVERMECH_TESTS_SUPPORT_HPP
