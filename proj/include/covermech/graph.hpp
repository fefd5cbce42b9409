#ifndef COVERMECH_GRAPH_HPP
#define COVERMECH_GRAPH_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace covermech {

using Edge = std::pair<int, int>;

/// Simple undirected graph on nodes 0..n-1. Edges are stored with the
/// smaller id first and sorted; self-loops and duplicates are rejected.
class Graph {
 public:
  Graph() = default;
  Graph(int num_nodes, std::vector<Edge> edges);

  int num_nodes() const { return n_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int u) const { return adj_[u]; }
  int degree(int u) const { return static_cast<int>(adj_[u].size()); }
  int max_degree() const;
  bool has_edge(int u, int v) const { return matrix_[u * n_ + v] != 0; }

  bool is_independent(std::span<const int> nodes) const;
  bool is_vertex_cover(const std::vector<bool>& in_cover) const;
  bool is_vertex_cover(std::span<const int> nodes) const;

  /// Subgraph induced by `nodes`; local id k corresponds to nodes[k].
  Graph induced(std::span<const int> nodes) const;

  /// Connected components as sorted node lists, ordered by smallest member.
  std::vector<std::vector<int>> components() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adj_;
  std::vector<std::uint8_t> matrix_;
};

Graph complete_graph(int n);
Graph cycle_graph(int n);
Graph path_graph(int n);
Graph star_graph(int leaves);  // center is node 0

/// Exact maximum subgraph density max_{S != {}} |E[S]| / |S|.
struct Density {
  long long edges = 0;  // numerator |E[S]|
  long long nodes = 1;  // denominator |S|
  double value() const { return static_cast<double>(edges) / static_cast<double>(nodes); }
};
Density max_subgraph_density(const Graph& g);
double sparsity_gamma(const Graph& g);

/// Orientation of every edge; arcs[k] = (tail, head) for edges()[k].
struct Orientation {
  std::vector<Edge> arcs;
  std::vector<int> in_degree;
  int max_in_degree() const;
  std::vector<std::vector<int>> in_neighbors() const;
  std::vector<std::vector<int>> out_neighbors() const;
};

/// Orientation minimising the maximum in-degree, by reversing directed paths
/// from max-in-degree nodes back to nodes whose in-degree is at least two
/// smaller, until no such path exists.
Orientation orient_min_max_indegree(const Graph& g);

/// Maximum weight independent set inside `candidates` (ids of g), exact.
/// Intended for small candidate sets (at most 64 nodes).
double max_weight_independent_subset(const Graph& g, std::span<const int> candidates,
                                     std::span<const double> weight, std::vector<int>* witness);

}  // namespace covermech

#endif  // COVERMECH_GRAPH_HPP
