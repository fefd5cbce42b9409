#ifndef COVERMECH_FLOW_HPP
#define COVERMECH_FLOW_HPP

#include <algorithm>
#include <limits>
#include <queue>
#include <vector>

namespace covermech {

/// Dinic max-flow over an arbitrary arithmetic capacity type. For floating
/// capacities, residuals at or below `eps` are treated as saturated.
template <class Cap>
class MaxFlow {
 public:
  explicit MaxFlow(int num_nodes, Cap eps = Cap{0}) : graph_(num_nodes), eps_(eps) {}

  static Cap infinity() {
    if constexpr (std::numeric_limits<Cap>::has_infinity) {
      return std::numeric_limits<Cap>::infinity();
    } else {
      return std::numeric_limits<Cap>::max() / 4;
    }
  }

  int add_arc(int from, int to, Cap cap) {
    const int id = static_cast<int>(arcs_.size());
    arcs_.push_back({to, cap});
    graph_[from].push_back(id);
    arcs_.push_back({from, Cap{0}});
    graph_[to].push_back(id + 1);
    return id;
  }

  Cap solve(int source, int sink) {
    Cap total{0};
    while (build_levels(source, sink)) {
      next_.assign(graph_.size(), 0);
      for (;;) {
        const Cap pushed = augment(source, sink, infinity());
        if (!(pushed > eps_)) break;
        total += pushed;
      }
    }
    return total;
  }

  Cap flow(int arc) const { return arcs_[arc ^ 1].residual; }

  /// Nodes reachable from `source` through arcs with positive residual.
  std::vector<char> reachable_from(int source) const {
    std::vector<char> seen(graph_.size(), 0);
    std::vector<int> stack{source};
    seen[source] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int id : graph_[u]) {
        const auto& a = arcs_[id];
        if (a.residual > eps_ && !seen[a.to]) {
          seen[a.to] = 1;
          stack.push_back(a.to);
        }
      }
    }
    return seen;
  }

  /// Nodes that can still reach `sink` through arcs with positive residual.
  std::vector<char> reaching(int sink) const {
    std::vector<char> seen(graph_.size(), 0);
    std::vector<int> stack{sink};
    seen[sink] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int id : graph_[v]) {
        // id is an arc out of v; its partner id^1 is the arc (to -> v).
        const auto& back = arcs_[id ^ 1];
        const int u = arcs_[id].to;
        if (back.residual > eps_ && !seen[u]) {
          seen[u] = 1;
          stack.push_back(u);
        }
      }
    }
    return seen;
  }

 private:
  struct Arc {
    int to;
    Cap residual;
  };

  bool build_levels(int source, int sink) {
    level_.assign(graph_.size(), -1);
    std::queue<int> queue;
    level_[source] = 0;
    queue.push(source);
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop();
      for (int id : graph_[u]) {
        const auto& a = arcs_[id];
        if (a.residual > eps_ && level_[a.to] < 0) {
          level_[a.to] = level_[u] + 1;
          queue.push(a.to);
        }
      }
    }
    return level_[sink] >= 0;
  }

  Cap augment(int u, int sink, Cap limit) {
    if (u == sink) return limit;
    for (auto& i = next_[u]; i < static_cast<int>(graph_[u].size()); ++i) {
      const int id = graph_[u][i];
      auto& a = arcs_[id];
      if (!(a.residual > eps_) || level_[a.to] != level_[u] + 1) continue;
      const Cap pushed = augment(a.to, sink, std::min(limit, a.residual));
      if (pushed > eps_) {
        if (a.residual != infinity()) a.residual -= pushed;
        auto& back = arcs_[id ^ 1];
        if (back.residual != infinity()) back.residual += pushed;
        return pushed;
      }
    }
    return Cap{0};
  }

  std::vector<std::vector<int>> graph_;
  std::vector<Arc> arcs_;
  std::vector<int> level_;
  std::vector<int> next_;
  Cap eps_;
};

}  // namespace covermech

#endif  // COVERMECH_FLOW_HPP
