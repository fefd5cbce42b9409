#ifndef COVERMECH_THRESHOLD_HPP
#define COVERMECH_THRESHOLD_HPP

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "covermech/graph.hpp"
#include "covermech/instance.hpp"
#include "covermech/parallel.hpp"

namespace covermech {

enum class ThresholdKind { general, neighbor, edge };

/// t_u as a function of the per-node cost vector. The caller guarantees the
/// owner's own entries are masked; run_threshold_mechanism checks that the
/// value does not move when they change.
using NodeThreshold = std::function<double(int u, std::span<const double> cost)>;
/// t_u^{(uv)} as a function of c_v.
using EdgeThreshold = std::function<double(int u, int v, double c_v)>;

class ThresholdFamily {
 public:
  ThresholdFamily() = default;

  static ThresholdFamily general(int num_nodes, NodeThreshold f);
  static ThresholdFamily neighbor(const Graph& g, NodeThreshold f);
  static ThresholdFamily edge(const Graph& g, EdgeThreshold f);
  /// Edge family with t_first = coef[k][0] * c_second and
  /// t_second = coef[k][1] * c_first for edge k = (first, second) of g.
  static ThresholdFamily linear_edge(const Graph& g, std::vector<std::array<double, 2>> coef);
  /// t_u^{(uv)} = x_u * (c_v / x_v); the grouping keeps c_v = x_v ties exact.
  static ThresholdFamily scaled_edge(const Graph& g, std::vector<double> x);

  ThresholdKind kind() const { return kind_; }
  int num_nodes() const { return n_; }
  bool has_graph() const { return graph_ != nullptr; }
  const Graph& graph() const { return *graph_; }
  bool is_linear_edge() const { return linear_; }
  const std::vector<std::array<double, 2>>& edge_coefficients() const { return coef_; }

  double threshold(int u, std::span<const double> cost) const;

 private:
  ThresholdKind kind_ = ThresholdKind::general;
  int n_ = 0;
  std::shared_ptr<const Graph> graph_;
  NodeThreshold node_;
  EdgeThreshold edge_;
  std::vector<std::array<double, 2>> coef_;
  std::vector<std::vector<std::array<double, 3>>> linear_adj_;  // (neighbour, mult, div)
  bool linear_ = false;
};

struct MechanismResult {
  std::vector<int> selected;       // sorted node ids
  std::vector<int> provider;       // per node: credited agent, -1 if none
  std::vector<double> thresholds;  // per node: threshold applied
  std::vector<double> payments;    // per agent
  double cost = 0;                 // sum of effective node costs of selected nodes
  bool feasible = false;           // selected nodes cover every edge

  double total_payment() const;
  bool contains(int u) const;
};

struct RunOptions {
  bool check_independence = true;  // evaluate with owner costs masked two ways
};

/// S = {v : c_v <= t_v}; agent i is paid the thresholds of its selected
/// nodes. Requires disjoint ownership.
MechanismResult run_threshold_mechanism(const ThresholdFamily& tf, const VCInstance& inst,
                                        RunOptions opt = {});

/// Remark-style wrapper for overlapping ownership: thresholds are computed on
/// the min-over-owners costs, capped by the other owners' bids; among owners
/// meeting their threshold the lowest agent index wins.
MechanismResult nondisjoint_wrap(const ThresholdFamily& tf, const VCInstance& inst, RunOptions opt = {});

/// Dispatches to run_threshold_mechanism or nondisjoint_wrap.
MechanismResult run_any(const ThresholdFamily& tf, const VCInstance& inst, RunOptions opt = {});

void check_scaling(const Graph& g, std::span<const double> x);

/// Edge family t_u^{(uv)} = x_u c_v / x_v.
ThresholdFamily ax_mechanism(const Graph& g, std::span<const double> x);
/// Neighbor family t_u = sum_{v in N(u)} x_u c_v / x_v.
ThresholdFamily bx_mechanism(const Graph& g, std::span<const double> x);

struct AlphaResult {
  double value = 0;
  int node = -1;            // maximising u
  std::vector<int> subset;  // independent S within N(u)
};

/// max_u max_{S in N(u) independent} x(S) / x_u, exactly (degree <= 24).
AlphaResult alpha_Gx(const Graph& g, std::span<const double> x, Exec exec = Exec::parallel);
/// max_u x(N(u)) / x_u.
double beta_Gx(const Graph& g, std::span<const double> x);

struct PerronResult {
  std::vector<double> x;  // positive, max entry 1 per component
  double lambda_max = 0;
  int iterations = 0;
};

/// Power iteration on A + I per connected component, starting from ones.
PerronResult perron_vector(const Graph& g, double tol = 1e-10, int max_iter = 100000);

/// Costs c_u = x_u, c_v = x_v on the alpha witness S, 0 elsewhere; one agent
/// per node.
VCInstance tightness_instance(const Graph& g, std::span<const double> x);

struct EdgeConversion {
  ThresholdFamily family;
  Orientation orientation;
  std::vector<double> scale;  // per edge: x for arc (a -> b), t_b = x c_a, t_a = c_b / x
};

/// Turns a monotone neighbor family into linear edge thresholds along the
/// minimum max-in-degree orientation. For arc (a -> b), x is the least
/// beta with t_a(c_b = beta, other costs 0) >= 1, found by bisection.
/// Throws UnboundedThreshold if t_a stays below 1 up to probe_limit and
/// DegenerateThreshold if it is already >= 1 at beta = 0.
EdgeConversion neighbor_to_edge_convert(const ThresholdFamily& tf, const Graph& g, double probe_limit = 1e6);
EdgeConversion neighbor_to_edge_convert(const ThresholdFamily& tf, const Graph& g, const Orientation& o,
                                        double probe_limit = 1e6);

/// Largest independent set among the in-neighbours of any node (exact).
int max_independent_in_neighbors(const Graph& g, const Orientation& o);

}  // namespace covermech

#endif  // COVERMECH_THRESHOLD_HPP
