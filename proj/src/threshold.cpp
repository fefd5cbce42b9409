#include "covermech/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "covermech/errors.hpp"

namespace covermech {

ThresholdFamily ThresholdFamily::general(int num_nodes, NodeThreshold f) {
  ThresholdFamily tf;
  tf.kind_ = ThresholdKind::general;
  tf.n_ = num_nodes;
  tf.node_ = std::move(f);
  return tf;
}

ThresholdFamily ThresholdFamily::neighbor(const Graph& g, NodeThreshold f) {
  ThresholdFamily tf;
  tf.kind_ = ThresholdKind::neighbor;
  tf.n_ = g.num_nodes();
  tf.graph_ = std::make_shared<const Graph>(g);
  tf.node_ = std::move(f);
  return tf;
}

ThresholdFamily ThresholdFamily::edge(const Graph& g, EdgeThreshold f) {
  ThresholdFamily tf;
  tf.kind_ = ThresholdKind::edge;
  tf.n_ = g.num_nodes();
  tf.graph_ = std::make_shared<const Graph>(g);
  tf.edge_ = std::move(f);
  return tf;
}

ThresholdFamily ThresholdFamily::linear_edge(const Graph& g, std::vector<std::array<double, 2>> coef) {
  if (static_cast<int>(coef.size()) != g.num_edges()) throw std::invalid_argument("linear_edge: one coefficient pair per edge");
  ThresholdFamily tf;
  tf.kind_ = ThresholdKind::edge;
  tf.n_ = g.num_nodes();
  tf.graph_ = std::make_shared<const Graph>(g);
  tf.linear_adj_.assign(g.num_nodes(), {});
  for (int k = 0; k < g.num_edges(); ++k) {
    const auto [a, b] = g.edges()[k];
    tf.linear_adj_[a].push_back({double(b), coef[k][0], 1.0});
    tf.linear_adj_[b].push_back({double(a), coef[k][1], 1.0});
  }
  tf.coef_ = std::move(coef);
  tf.linear_ = true;
  return tf;
}

ThresholdFamily ThresholdFamily::scaled_edge(const Graph& g, std::vector<double> x) {
  std::vector<std::array<double, 2>> coef;
  for (auto [a, b] : g.edges()) coef.push_back({x[a] / x[b], x[b] / x[a]});
  ThresholdFamily tf = linear_edge(g, std::move(coef));
  for (int u = 0; u < g.num_nodes(); ++u)
    for (auto& e : tf.linear_adj_[u]) e = {e[0], x[u], x[static_cast<int>(e[0])]};
  return tf;
}

double ThresholdFamily::threshold(int u, std::span<const double> cost) const {
  if (kind_ != ThresholdKind::edge) return node_(u, cost);
  double t = 0;
  if (linear_) {
    for (const auto& e : linear_adj_[u]) t = std::max(t, e[1] * (cost[static_cast<int>(e[0])] / e[2]));
  } else {
    for (int v : graph_->neighbors(u)) t = std::max(t, edge_(u, v, cost[v]));
  }
  return t;
}

double MechanismResult::total_payment() const { return std::accumulate(payments.begin(), payments.end(), 0.0); }

bool MechanismResult::contains(int u) const { return std::binary_search(selected.begin(), selected.end(), u); }

namespace {

bool same_threshold(double a, double b) {
  if (a == b) return true;
  return std::fabs(a - b) <= 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

[[noreturn]] void dependence_error(int u, int agent, double a, double b) {
  std::ostringstream os;
  os << "threshold of node " << u << " moves with its owner's report (agent " << agent << "): " << a << " vs " << b;
  throw ContractViolation(os.str());
}

void finish(const Graph& g, MechanismResult& res, std::span<const double> node_cost) {
  std::vector<bool> in(g.num_nodes(), false);
  for (int u : res.selected) {
    in[u] = true;
    res.cost += node_cost[u];
  }
  res.feasible = g.is_vertex_cover(in);
}

}  // namespace

MechanismResult run_threshold_mechanism(const ThresholdFamily& tf, const VCInstance& inst, RunOptions opt) {
  const int n = inst.num_nodes();
  if (tf.num_nodes() != n) throw std::invalid_argument("threshold family size does not match the instance");
  if (!inst.disjoint()) throw PreconditionError("run_threshold_mechanism needs disjoint ownership; use nondisjoint_wrap");
  const std::vector<double> c = inst.node_costs();
  MechanismResult res;
  res.provider.assign(n, -1);
  res.thresholds.assign(n, 0.0);
  res.payments.assign(inst.num_agents(), 0.0);
  std::vector<char> owned(n, 0);

  std::vector<double> low(c), high(c);
  for (int i = 0; i < inst.num_agents(); ++i) {
    const auto& set = inst.owners.sets[i];
    for (int u : set) {
      low[u] = 0.0;
      high[u] = 2.0 * c[u] + 1.0;
      owned[u] = 1;
    }
    for (int u : set) {
      const double t = tf.threshold(u, low);
      if (opt.check_independence) {
        const double t2 = tf.threshold(u, high);
        if (!same_threshold(t, t2)) dependence_error(u, i, t, t2);
      }
      res.thresholds[u] = t;
      if (c[u] <= t) {
        res.provider[u] = i;
        res.payments[i] += t;
      }
    }
    for (int u : set) low[u] = high[u] = c[u];
  }
  for (int u = 0; u < n; ++u) {
    if (!owned[u]) res.thresholds[u] = tf.threshold(u, c);
    if (c[u] <= res.thresholds[u]) res.selected.push_back(u);
  }
  finish(inst.graph, res, c);
  return res;
}

MechanismResult nondisjoint_wrap(const ThresholdFamily& tf, const VCInstance& inst, RunOptions opt) {
  const int n = inst.num_nodes();
  if (tf.num_nodes() != n) throw std::invalid_argument("threshold family size does not match the instance");
  const std::vector<double> chat = inst.node_costs();
  // bid[u] lists (agent, cost) for every owner of u.
  std::vector<std::vector<std::pair<int, double>>> bid(n);
  for (int i = 0; i < inst.num_agents(); ++i)
    for (std::size_t k = 0; k < inst.owners.sets[i].size(); ++k)
      bid[inst.owners.sets[i][k]].emplace_back(i, inst.costs[i][k]);

  // Effective costs with agent i's reports replaced by `value(u)`.
  auto masked = [&](int agent, auto value) {
    std::vector<double> c(n, 0.0);
    for (int u = 0; u < n; ++u) {
      double best = std::numeric_limits<double>::infinity();
      bool any = false;
      for (auto [j, cost] : bid[u]) {
        best = std::min(best, j == agent ? value(u) : cost);
        any = true;
      }
      c[u] = any ? best : 0.0;
    }
    return c;
  };

  MechanismResult res;
  res.provider.assign(n, -1);
  res.thresholds.assign(n, 0.0);
  res.payments.assign(inst.num_agents(), 0.0);
  std::vector<double> that(n, 0.0);
  std::vector<char> done(n, 0);
  for (int i = 0; i < inst.num_agents(); ++i) {
    const auto& set = inst.owners.sets[i];
    if (set.empty()) continue;
    const auto low = masked(i, [](int) { return 0.0; });
    std::vector<double> high;
    if (opt.check_independence) high = masked(i, [&](int u) { return 2.0 * chat[u] + 1.0; });
    for (int u : set) {
      const double t = tf.threshold(u, low);
      if (opt.check_independence) {
        const double t2 = tf.threshold(u, high);
        if (!same_threshold(t, t2)) dependence_error(u, i, t, t2);
      }
      if (done[u] && !same_threshold(that[u], t)) dependence_error(u, i, that[u], t);
      if (!done[u]) {
        that[u] = t;
        done[u] = 1;
      }
    }
  }
  for (int u = 0; u < n; ++u) {
    if (bid[u].empty()) {
      const double t = tf.threshold(u, chat);
      res.thresholds[u] = t;
      if (0.0 <= t) res.selected.push_back(u);
      continue;
    }
    res.thresholds[u] = that[u];
    for (auto [i, cost] : bid[u]) {  // agents ascending
      double cap = that[u];
      for (auto [j, other] : bid[u])
        if (j != i) cap = std::min(cap, other);
      if (cost <= cap) {
        res.provider[u] = i;
        res.thresholds[u] = cap;
        res.payments[i] += cap;
        res.selected.push_back(u);
        break;
      }
    }
  }
  finish(inst.graph, res, chat);
  return res;
}

MechanismResult run_any(const ThresholdFamily& tf, const VCInstance& inst, RunOptions opt) {
  return inst.disjoint() ? run_threshold_mechanism(tf, inst, opt) : nondisjoint_wrap(tf, inst, opt);
}

void check_scaling(const Graph& g, std::span<const double> x) {
  if (static_cast<int>(x.size()) != g.num_nodes()) throw std::invalid_argument("scaling vector length mismatch");
  for (double v : x)
    if (!(v > 0) || !std::isfinite(v)) throw std::invalid_argument("scaling vector must be positive and finite");
}

ThresholdFamily ax_mechanism(const Graph& g, std::span<const double> x) {
  check_scaling(g, x);
  return ThresholdFamily::scaled_edge(g, std::vector<double>(x.begin(), x.end()));
}

ThresholdFamily bx_mechanism(const Graph& g, std::span<const double> x) {
  check_scaling(g, x);
  std::vector<double> xs(x.begin(), x.end());
  auto graph = std::make_shared<const Graph>(g);
  return ThresholdFamily::neighbor(g, [xs, graph](int u, std::span<const double> c) {
    double t = 0;
    for (int v : graph->neighbors(u)) t += xs[u] * c[v] / xs[v];
    return t;
  });
}

AlphaResult alpha_Gx(const Graph& g, std::span<const double> x, Exec exec) {
  check_scaling(g, x);
  const int n = g.num_nodes();
  if (g.max_degree() > 24) throw SizeLimitExceeded("alpha_Gx needs maximum degree at most 24");
  std::vector<double> ratio(n, 0.0);
  std::vector<std::vector<int>> witness(n);
  auto one = [&](int u) {
    const auto& nb = g.neighbors(u);
    ratio[u] = max_weight_independent_subset(g, nb, x, &witness[u]) / x[u];
  };
  if (exec == Exec::serial) {
    for (int u = 0; u < n; ++u) one(u);
  } else {
#pragma omp parallel for schedule(dynamic) num_threads(worker_threads())
    for (int u = 0; u < n; ++u) one(u);
  }
  AlphaResult res;
  for (int u = 0; u < n; ++u) {
    if (res.node < 0 || ratio[u] > res.value) {
      res.value = ratio[u];
      res.node = u;
      res.subset = witness[u];
    }
  }
  return res;
}

double beta_Gx(const Graph& g, std::span<const double> x) {
  check_scaling(g, x);
  double best = 0;
  for (int u = 0; u < g.num_nodes(); ++u) {
    double s = 0;
    for (int v : g.neighbors(u)) s += x[v];
    best = std::max(best, s / x[u]);
  }
  return best;
}

PerronResult perron_vector(const Graph& g, double tol, int max_iter) {
  const int n = g.num_nodes();
  PerronResult res;
  res.x.assign(n, 1.0);
  for (const auto& comp : g.components()) {
    if (comp.size() == 1) continue;
    const Graph h = g.induced(comp);
    const int k = h.num_nodes();
    std::vector<double> v(k, 1.0), w(k);
    double lambda = 0, prev = -1;
    int it = 0;
    for (; it < max_iter; ++it) {
      // w = (A + I) v; the shift keeps bipartite components from oscillating.
      for (int a = 0; a < k; ++a) {
        double s = v[a];
        for (int b : h.neighbors(a)) s += v[b];
        w[a] = s;
      }
      double num = 0, den = 0;
      for (int a = 0; a < k; ++a) {
        num += v[a] * (w[a] - v[a]);
        den += v[a] * v[a];
      }
      lambda = num / den;
      const double top = *std::max_element(w.begin(), w.end());
      double change = 0;
      for (int a = 0; a < k; ++a) {
        const double next = w[a] / top;
        change = std::max(change, std::fabs(next - v[a]));
        v[a] = next;
      }
      if (std::fabs(lambda - prev) <= tol && change <= std::sqrt(tol)) break;
      prev = lambda;
    }
    res.iterations = std::max(res.iterations, it + 1);
    res.lambda_max = std::max(res.lambda_max, lambda);
    for (int a = 0; a < k; ++a) res.x[comp[a]] = v[a];
  }
  return res;
}

VCInstance tightness_instance(const Graph& g, std::span<const double> x) {
  const AlphaResult a = alpha_Gx(g, x);
  std::vector<double> c(g.num_nodes(), 0.0);
  if (a.node >= 0) {
    c[a.node] = x[a.node];
    for (int v : a.subset) c[v] = x[v];
  }
  return singleton_instance(g, c);
}

namespace {

// t_a with every cost zero except c_b = beta.
double probe(const ThresholdFamily& tf, std::vector<double>& scratch, int a, int b, double beta) {
  scratch[b] = beta;
  const double t = tf.threshold(a, scratch);
  scratch[b] = 0.0;
  return t;
}

double crossing_point(const ThresholdFamily& tf, std::vector<double>& scratch, int a, int b, double probe_limit) {
  if (probe(tf, scratch, a, b, 0.0) >= 1.0) {
    throw DegenerateThreshold("threshold of node " + std::to_string(a) + " is at least 1 with zero cost on neighbour " +
                              std::to_string(b) + "; the source mechanism cannot be a bounded approximation");
  }
  if (probe(tf, scratch, a, b, probe_limit) < 1.0) {
    std::ostringstream os;
    os << "threshold of node " << a << " stays below 1 for every cost of neighbour " << b << " up to " << probe_limit
       << "; the source mechanism has unbounded approximation ratio";
    throw UnboundedThreshold(os.str());
  }
  double lo = 0.0, hi = probe_limit;
  for (int it = 0; it < 400 && hi - lo > 1e-9 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (probe(tf, scratch, a, b, mid) >= 1.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  // Sampled monotonicity: below the crossing stays below, above stays above.
  for (int k = 0; k < 8; ++k) {
    const double above = hi * std::pow(2.0, k);
    if (above <= probe_limit && probe(tf, scratch, a, b, above) < 1.0)
      throw ContractViolation("neighbor threshold of node " + std::to_string(a) + " is not monotone in the cost of " +
                              std::to_string(b));
    const double below = lo * std::pow(0.5, k);
    if (below > 0 && probe(tf, scratch, a, b, below) >= 1.0)
      throw ContractViolation("neighbor threshold of node " + std::to_string(a) + " is not monotone in the cost of " +
                              std::to_string(b));
  }
  return hi;
}

}  // namespace

EdgeConversion neighbor_to_edge_convert(const ThresholdFamily& tf, const Graph& g, const Orientation& o,
                                        double probe_limit) {
  if (tf.kind() == ThresholdKind::general) throw PreconditionError("conversion needs a neighbor or edge family");
  if (tf.num_nodes() != g.num_nodes()) throw std::invalid_argument("threshold family size does not match the graph");
  EdgeConversion out;
  out.orientation = o;
  std::vector<double> scratch(g.num_nodes(), 0.0);
  std::vector<std::array<double, 2>> coef;
  for (int k = 0; k < g.num_edges(); ++k) {
    const auto [a, b] = o.arcs[k];
    const double x = crossing_point(tf, scratch, a, b, probe_limit);
    out.scale.push_back(x);
    // t_b = x c_a and t_a = c_b / x, stored against the edge's (first, second).
    if (a == g.edges()[k].first) {
      coef.push_back({1.0 / x, x});
    } else {
      coef.push_back({x, 1.0 / x});
    }
  }
  out.family = ThresholdFamily::linear_edge(g, std::move(coef));
  return out;
}

EdgeConversion neighbor_to_edge_convert(const ThresholdFamily& tf, const Graph& g, double probe_limit) {
  return neighbor_to_edge_convert(tf, g, orient_min_max_indegree(g), probe_limit);
}

int max_independent_in_neighbors(const Graph& g, const Orientation& o) {
  const auto in = o.in_neighbors();
  const std::vector<double> w(g.num_nodes(), 1.0);
  int best = 0;
  for (int u = 0; u < g.num_nodes(); ++u) {
    if (in[u].size() > 64) throw SizeLimitExceeded("in-neighbourhood too large for exact search");
    best = std::max(best, static_cast<int>(std::lround(max_weight_independent_subset(g, in[u], w, nullptr))));
  }
  return best;
}

}  // namespace covermech
