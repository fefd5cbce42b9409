#include "covermech/graph.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>
#include <string>

#include "covermech/flow.hpp"

namespace covermech {

Graph::Graph(int num_nodes, std::vector<Edge> edges) : n_(num_nodes) {
  if (num_nodes < 0) throw std::invalid_argument("graph: negative node count");
  for (auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n_ || v >= n_) {
      throw std::invalid_argument("graph: edge (" + std::to_string(u) + "," + std::to_string(v) +
                                  ") out of range");
    }
    if (u == v) throw std::invalid_argument("graph: self-loop at node " + std::to_string(u));
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  if (auto dup = std::adjacent_find(edges.begin(), edges.end()); dup != edges.end()) {
    throw std::invalid_argument("graph: duplicate edge (" + std::to_string(dup->first) + "," +
                                std::to_string(dup->second) + ")");
  }
  edges_ = std::move(edges);
  adj_.assign(n_, {});
  matrix_.assign(static_cast<std::size_t>(n_) * n_, 0);
  for (auto [u, v] : edges_) {
    adj_[u].push_back(v);
    adj_[v].push_back(u);
    matrix_[u * n_ + v] = matrix_[v * n_ + u] = 1;
  }
  for (auto& a : adj_) std::sort(a.begin(), a.end());
}

int Graph::max_degree() const {
  int d = 0;
  for (const auto& a : adj_) d = std::max(d, static_cast<int>(a.size()));
  return d;
}

bool Graph::is_independent(std::span<const int> nodes) const {
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      if (nodes[a] == nodes[b] || has_edge(nodes[a], nodes[b])) return false;
    }
  }
  return true;
}

bool Graph::is_vertex_cover(const std::vector<bool>& in_cover) const {
  return std::all_of(edges_.begin(), edges_.end(),
                     [&](const Edge& e) { return in_cover[e.first] || in_cover[e.second]; });
}

bool Graph::is_vertex_cover(std::span<const int> nodes) const {
  std::vector<bool> mark(n_, false);
  for (int u : nodes) mark[u] = true;
  return is_vertex_cover(mark);
}

Graph Graph::induced(std::span<const int> nodes) const {
  std::vector<int> local(n_, -1);
  for (std::size_t k = 0; k < nodes.size(); ++k) local[nodes[k]] = static_cast<int>(k);
  std::vector<Edge> sub;
  for (auto [u, v] : edges_) {
    if (local[u] >= 0 && local[v] >= 0) sub.emplace_back(local[u], local[v]);
  }
  return Graph(static_cast<int>(nodes.size()), std::move(sub));
}

std::vector<std::vector<int>> Graph::components() const {
  std::vector<int> comp(n_, -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < n_; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> members{s};
    comp[s] = static_cast<int>(out.size());
    for (std::size_t k = 0; k < members.size(); ++k) {
      for (int w : adj_[members[k]]) {
        if (comp[w] < 0) {
          comp[w] = comp[s];
          members.push_back(w);
        }
      }
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  return out;
}

Graph complete_graph(int n) {
  std::vector<Edge> e;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) e.emplace_back(u, v);
  return Graph(n, std::move(e));
}

Graph cycle_graph(int n) {
  std::vector<Edge> e;
  for (int u = 0; u < n; ++u) e.emplace_back(u, (u + 1) % n);
  return Graph(n, std::move(e));
}

Graph path_graph(int n) {
  std::vector<Edge> e;
  for (int u = 0; u + 1 < n; ++u) e.emplace_back(u, u + 1);
  return Graph(n, std::move(e));
}

Graph star_graph(int leaves) {
  std::vector<Edge> e;
  for (int v = 1; v <= leaves; ++v) e.emplace_back(0, v);
  return Graph(leaves + 1, std::move(e));
}

namespace {

// max over S of (q |E[S]| - p |S|) > 0, via the edge/node closure network.
bool denser_than(const Graph& g, long long p, long long q) {
  const int n = g.num_nodes();
  const int m = g.num_edges();
  const int source = n + m;
  const int sink = source + 1;
  MaxFlow<long long> flow(n + m + 2);
  for (int k = 0; k < m; ++k) {
    const auto [u, v] = g.edges()[k];
    flow.add_arc(source, n + k, q);
    flow.add_arc(n + k, u, MaxFlow<long long>::infinity());
    flow.add_arc(n + k, v, MaxFlow<long long>::infinity());
  }
  for (int u = 0; u < n; ++u) flow.add_arc(u, sink, p);
  const long long cut = flow.solve(source, sink);
  return static_cast<long long>(m) * q - cut > 0;
}

}  // namespace

Density max_subgraph_density(const Graph& g) {
  if (g.num_nodes() == 0) throw std::invalid_argument("sparsity: empty graph");
  const long long n = g.num_nodes();
  const long long m = g.num_edges();
  if (m == 0) return {0, 1};
  std::vector<std::pair<long long, long long>> candidates;
  for (long long q = 1; q <= n; ++q) {
    for (long long p = 0; p <= m; ++p) {
      if (std::gcd(p, q) == 1) candidates.emplace_back(p, q);
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    return a.first * b.second < b.first * a.second;
  });
  // First candidate f with no subgraph strictly denser than f.
  std::size_t lo = 0, hi = candidates.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (denser_than(g, candidates[mid].first, candidates[mid].second)) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return {candidates[lo].first, candidates[lo].second};
}

double sparsity_gamma(const Graph& g) { return max_subgraph_density(g).value(); }

int Orientation::max_in_degree() const {
  return in_degree.empty() ? 0 : *std::max_element(in_degree.begin(), in_degree.end());
}

std::vector<std::vector<int>> Orientation::in_neighbors() const {
  std::vector<std::vector<int>> in(in_degree.size());
  for (auto [tail, head] : arcs) in[head].push_back(tail);
  for (auto& v : in) std::sort(v.begin(), v.end());
  return in;
}

std::vector<std::vector<int>> Orientation::out_neighbors() const {
  std::vector<std::vector<int>> out(in_degree.size());
  for (auto [tail, head] : arcs) out[tail].push_back(head);
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

Orientation orient_min_max_indegree(const Graph& g) {
  const int n = g.num_nodes();
  Orientation o;
  o.arcs = g.edges();
  o.in_degree.assign(n, 0);
  for (auto [tail, head] : o.arcs) ++o.in_degree[head];
  // in_arcs[v] = indices of arcs whose head is v.
  std::vector<std::vector<int>> in_arcs(n);
  for (int k = 0; k < static_cast<int>(o.arcs.size()); ++k) in_arcs[o.arcs[k].second].push_back(k);

  for (;;) {
    const int d = o.max_in_degree();
    if (d <= 1) break;
    // Backward BFS from every max node; via[w] is the arc leaving w on the path.
    std::vector<int> via(n, -2);
    std::vector<int> queue;
    for (int v = 0; v < n; ++v) {
      if (o.in_degree[v] == d) {
        via[v] = -1;
        queue.push_back(v);
      }
    }
    int found = -1;
    for (std::size_t k = 0; k < queue.size() && found < 0; ++k) {
      const int v = queue[k];
      for (int arc : in_arcs[v]) {
        const int w = o.arcs[arc].first;
        if (via[w] != -2) continue;
        via[w] = arc;
        if (o.in_degree[w] <= d - 2) {
          found = w;
          break;
        }
        queue.push_back(w);
      }
    }
    if (found < 0) break;
    // Reverse the path found -> ... -> max node.
    int w = found;
    ++o.in_degree[found];
    while (via[w] >= 0) {
      const int arc = via[w];
      const int head = o.arcs[arc].second;
      auto& list = in_arcs[head];
      list.erase(std::find(list.begin(), list.end(), arc));
      o.arcs[arc] = {head, w};
      in_arcs[w].push_back(arc);
      w = head;
    }
    --o.in_degree[w];
  }
  return o;
}

namespace {

struct MwisSearch {
  std::vector<std::uint64_t> nbr;
  std::vector<double> weight;
  double best = -1.0;
  std::uint64_t best_set = 0;

  double mass(std::uint64_t p) const {
    double s = 0;
    for (; p; p &= p - 1) s += weight[std::countr_zero(p)];
    return s;
  }

  void run(std::uint64_t chosen, double value, std::uint64_t open) {
    if (open == 0) {
      if (value > best) {
        best = value;
        best_set = chosen;
      }
      return;
    }
    if (value + mass(open) <= best) return;
    int pick = -1;
    for (std::uint64_t p = open; p; p &= p - 1) {
      const int k = std::countr_zero(p);
      if (pick < 0 || weight[k] > weight[pick]) pick = k;
    }
    const std::uint64_t bit = std::uint64_t{1} << pick;
    run(chosen | bit, value + weight[pick], open & ~bit & ~nbr[pick]);
    run(chosen, value, open & ~bit);
  }
};

}  // namespace

double max_weight_independent_subset(const Graph& g, std::span<const int> candidates,
                                     std::span<const double> weight, std::vector<int>* witness) {
  const int k = static_cast<int>(candidates.size());
  if (k > 64) throw std::invalid_argument("independent subset search limited to 64 candidates");
  MwisSearch s;
  s.nbr.assign(k, 0);
  s.weight.resize(k);
  for (int a = 0; a < k; ++a) {
    s.weight[a] = weight[candidates[a]];
    for (int b = 0; b < k; ++b) {
      if (a != b && g.has_edge(candidates[a], candidates[b])) s.nbr[a] |= std::uint64_t{1} << b;
    }
  }
  const std::uint64_t all = k == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;
  s.best = 0.0;
  s.run(0, 0.0, all);
  if (witness) {
    witness->clear();
    for (int a = 0; a < k; ++a)
      if (s.best_set >> a & 1) witness->push_back(candidates[a]);
  }
  return s.best;
}

}  // namespace covermech
