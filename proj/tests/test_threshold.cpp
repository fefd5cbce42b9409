#include <doctest.h>

#include <cmath>
#include <random>

#include "covermech/errors.hpp"
#include "covermech/oracles.hpp"
#include "covermech/threshold.hpp"
#include "support.hpp"

using namespace covermech;

namespace {

std::vector<double> random_scaling(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(0.2, 3.0);
  std::vector<double> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

double ratio_vs_opt(const Graph& g, const MechanismResult& r, const std::vector<double>& c) {
  const double opt = min_vertex_cover_exact(g, c).cost;
  if (opt == 0) return r.cost == 0 ? 1.0 : INFINITY;
  return r.cost / opt;
}

}  // namespace

TEST_CASE("threshold mechanism basics") {
  const Graph e = path_graph(2);
  auto inst = singleton_instance(e, std::vector<double>{0, 5});
  auto r = run_threshold_mechanism(ax_mechanism(e, testing::ones(2)), inst);
  CHECK(r.selected == std::vector<int>{0});
  CHECK(r.thresholds[0] == 5);
  CHECK(r.payments == std::vector<double>{5, 0});
  CHECK(r.feasible);

  const Graph k3 = complete_graph(3);
  const auto zero = ThresholdFamily::general(3, [](int, std::span<const double>) { return 0.0; });
  r = run_threshold_mechanism(zero, singleton_instance(k3, std::vector<double>{1, 2, 3}));
  CHECK(r.selected.empty());
  CHECK(r.total_payment() == 0);
  CHECK_FALSE(r.feasible);

  const auto big = ThresholdFamily::general(3, [](int u, std::span<const double>) { return 1e9 + u; });
  r = run_threshold_mechanism(big, singleton_instance(k3, std::vector<double>{1, 2, 3}));
  CHECK(r.selected.size() == 3);
  CHECK(r.total_payment() == 3e9 + 3);
}

TEST_CASE("threshold reading the owner's cost is rejected") {
  const Graph e = path_graph(2);
  const auto own = ThresholdFamily::general(2, [](int u, std::span<const double> c) { return c[u] + 1; });
  CHECK_THROWS_AS(run_threshold_mechanism(own, singleton_instance(e, std::vector<double>{1, 1})), ContractViolation);
  // Agent 0 owns both endpoints: A_x reads the partner's cost, which is masked.
  VCInstance both{e, Ownership{{{0, 1}}}, {{1, 1}}};
  CHECK_THROWS_AS(run_threshold_mechanism(ax_mechanism(e, testing::ones(2)), both), ContractViolation);
}

TEST_CASE("A_x and B_x fixtures") {
  const Graph k3 = complete_graph(3);
  auto r = run_threshold_mechanism(ax_mechanism(k3, testing::ones(3)), singleton_instance(k3, testing::ones(3)));
  CHECK(r.selected == std::vector<int>{0, 1, 2});
  CHECK(r.thresholds == std::vector<double>{1, 1, 1});
  CHECK(r.cost == 3);
  CHECK(min_vertex_cover_exact(k3, testing::ones(3)).cost == 2);

  const Graph e = path_graph(2);
  const std::vector<double> x{1, 2};
  r = run_threshold_mechanism(ax_mechanism(e, x), singleton_instance(e, testing::ones(2)));
  CHECK(r.thresholds[0] == 0.5);
  CHECK(r.thresholds[1] == 2);
  CHECK(r.selected == std::vector<int>{1});
  auto rb = run_threshold_mechanism(bx_mechanism(e, x), singleton_instance(e, testing::ones(2)));
  CHECK(rb.thresholds == r.thresholds);

  const Graph star = star_graph(3);
  rb = run_threshold_mechanism(bx_mechanism(star, testing::ones(4)),
                               singleton_instance(star, std::vector<double>{2, 1, 1, 1}));
  CHECK(rb.thresholds == std::vector<double>{3, 2, 2, 2});
  CHECK(rb.selected == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("alpha and beta functionals") {
  const Graph star = star_graph(3), k3 = complete_graph(3), c5 = cycle_graph(5);
  const auto as = alpha_Gx(star, testing::ones(4));
  CHECK(as.value == 3);
  CHECK(as.node == 0);
  CHECK(as.subset == std::vector<int>{1, 2, 3});
  CHECK(alpha_Gx(k3, testing::ones(3)).value == 1);
  CHECK(alpha_Gx(c5, testing::ones(5)).value == 2);
  CHECK(beta_Gx(star, testing::ones(4)) == 3);
  CHECK(beta_Gx(k3, testing::ones(3)) == 2);
  CHECK(beta_Gx(path_graph(2), std::vector<double>{1, 2}) == 2);
  CHECK_THROWS_AS(alpha_Gx(star_graph(25), testing::ones(26)), SizeLimitExceeded);
  CHECK_THROWS_AS(ax_mechanism(k3, std::vector<double>{1, 0, 1}), std::invalid_argument);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 12;
    const Graph g = testing::random_graph(n, 0.4, rng);
    const auto x = random_scaling(n, rng);
    const auto s = alpha_Gx(g, x, Exec::serial), p = alpha_Gx(g, x, Exec::parallel);
    CHECK(s.value == p.value);
    CHECK(s.node == p.node);
    CHECK(s.value <= beta_Gx(g, x) + 1e-12);
    // Brute-force alpha over every neighbourhood subset.
    double brute = 0;
    for (int u = 0; u < n; ++u) {
      const auto& nb = g.neighbors(u);
      for (std::uint32_t m = 0; m < (1u << nb.size()); ++m) {
        std::vector<int> pick;
        double w = 0;
        for (std::size_t k = 0; k < nb.size(); ++k)
          if (m >> k & 1) {
            pick.push_back(nb[k]);
            w += x[nb[k]];
          }
        if (g.is_independent(pick)) brute = std::max(brute, w / x[u]);
      }
    }
    CHECK(s.value == doctest::Approx(brute).epsilon(1e-12));
  }
}

TEST_CASE("Perron vector") {
  auto p = perron_vector(complete_graph(3));
  CHECK(p.lambda_max == doctest::Approx(2).epsilon(1e-9));
  for (double v : p.x) CHECK(v == doctest::Approx(1));
  p = perron_vector(star_graph(4));
  CHECK(p.lambda_max == doctest::Approx(2).epsilon(1e-9));
  CHECK(p.x[0] / p.x[1] == doctest::Approx(2).epsilon(1e-6));
  CHECK(perron_vector(path_graph(2)).lambda_max == doctest::Approx(1).epsilon(1e-9));
  // Isolated nodes keep x = 1; components are normalised separately.
  const Graph g(5, {{0, 1}, {2, 3}});
  p = perron_vector(g);
  CHECK(p.x == std::vector<double>{1, 1, 1, 1, 1});
  p = perron_vector(cycle_graph(6));
  CHECK(p.lambda_max == doctest::Approx(2).epsilon(1e-9));
}

TEST_CASE("tightness instance reaches 1 + alpha") {
  const std::vector<std::pair<Graph, double>> cases{
      {star_graph(3), 4}, {complete_graph(3), 2}, {cycle_graph(5), 3}};
  for (const auto& [g, expected] : cases) {
    const auto x = testing::ones(g.num_nodes());
    const auto inst = tightness_instance(g, x);
    const auto c = inst.node_costs();
    const auto r = run_threshold_mechanism(ax_mechanism(g, x), inst);
    CHECK(r.feasible);
    CHECK(ratio_vs_opt(g, r, c) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(ratio_vs_opt(g, r, c) == doctest::Approx(1 + alpha_Gx(g, x).value).epsilon(1e-12));
  }
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + trial % 9;
    const Graph g = testing::random_graph(n, 0.5, rng);
    if (g.num_edges() == 0) continue;
    const auto x = random_scaling(n, rng);
    const auto inst = tightness_instance(g, x);
    const auto r = run_threshold_mechanism(ax_mechanism(g, x), inst);
    const auto a = alpha_Gx(g, x);
    CHECK(r.cost / x[a.node] == doctest::Approx(1 + a.value).epsilon(1e-9));
    CHECK(ratio_vs_opt(g, r, inst.node_costs()) <= 1 + a.value + 1e-9);
  }
}

TEST_CASE("A_x and B_x properties on random instances") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 2 + trial % 14;
    const Graph g = testing::random_graph(n, 0.15 + 0.05 * (trial % 12), rng);
    const auto x = trial % 4 == 0 ? perron_vector(g).x : random_scaling(n, rng);
    auto c = testing::random_costs(n, rng);
    if (trial % 5 == 0)
      for (auto& v : c) v = std::round(3 * v);
    const auto inst = singleton_instance(g, c);
    const auto ra = run_threshold_mechanism(ax_mechanism(g, x), inst);
    const auto rb = run_threshold_mechanism(bx_mechanism(g, x), inst);
    CHECK(ra.feasible);
    CHECK(rb.feasible);
    for (int u : ra.selected) CHECK(rb.contains(u));
    const double opt = min_vertex_cover_exact(g, c).cost;
    const double alpha = alpha_Gx(g, x).value;
    CHECK(ra.cost <= (alpha + 1) * opt * (1 + 1e-12) + 1e-12);
    double tsum = 0, cv = 0;
    for (int u = 0; u < n; ++u) {
      tsum += ra.thresholds[u];
      cv += c[u];
    }
    CHECK(ra.total_payment() <= tsum + 1e-12);
    CHECK(tsum <= beta_Gx(g, x) * cv * (1 + 1e-12) + 1e-12);
    // Individual rationality.
    for (int u : ra.selected) CHECK(ra.thresholds[u] >= c[u]);
  }
}

TEST_CASE("neighbor to edge conversion") {
  const Graph e = path_graph(2);
  auto conv = neighbor_to_edge_convert(bx_mechanism(e, testing::ones(2)), e);
  REQUIRE(conv.family.is_linear_edge());
  CHECK(conv.scale[0] == doctest::Approx(1).epsilon(1e-9));

  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 11;
    const Graph g = testing::random_graph(n, 0.4, rng);
    const auto x = random_scaling(n, rng);
    conv = neighbor_to_edge_convert(bx_mechanism(g, x), g);
    const auto& coef = conv.family.edge_coefficients();
    for (int k = 0; k < g.num_edges(); ++k) {
      const auto [a, b] = g.edges()[k];
      CHECK(coef[k][0] == doctest::Approx(x[a] / x[b]).epsilon(1e-8));
      CHECK(coef[k][1] == doctest::Approx(x[b] / x[a]).epsilon(1e-8));
    }
    const auto c = testing::random_costs(n, rng);
    const auto inst = singleton_instance(g, c);
    const auto r = run_threshold_mechanism(conv.family, inst);
    const auto ra = run_threshold_mechanism(ax_mechanism(g, x), inst);
    CHECK(r.feasible);
    CHECK(r.selected == ra.selected);
  }

  const auto half = ThresholdFamily::neighbor(e, [](int, std::span<const double>) { return 0.5; });
  CHECK_THROWS_AS(neighbor_to_edge_convert(half, e), UnboundedThreshold);
  const auto two = ThresholdFamily::neighbor(e, [](int, std::span<const double>) { return 2.0; });
  CHECK_THROWS_AS(neighbor_to_edge_convert(two, e), DegenerateThreshold);
  const auto bumpy = ThresholdFamily::neighbor(e, [](int u, std::span<const double> c) {
    const double v = c[1 - u];
    return v >= 1 && v < 3 ? 1.0 : v >= 4 ? 1.0 : 0.0;
  });
  CHECK_THROWS_AS(neighbor_to_edge_convert(bumpy, e), ContractViolation);
}

TEST_CASE("converted mechanisms stay feasible and within the log bound") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + trial % 10;
    const Graph g = testing::random_graph(n, 0.45, rng);
    if (g.num_edges() == 0) continue;
    const auto x = random_scaling(n, rng);
    const auto conv = neighbor_to_edge_convert(bx_mechanism(g, x), g);
    const double rho = alpha_Gx(g, x).value + 1;
    const double bound = rho * (std::log(std::max(1, g.max_degree())) + 2) * (1 + 1e-6);
    CHECK(max_independent_in_neighbors(g, conv.orientation) <= conv.orientation.max_in_degree());
    for (int rep = 0; rep < 5; ++rep) {
      const auto c = testing::random_costs(n, rng);
      const auto r = run_threshold_mechanism(conv.family, singleton_instance(g, c));
      CHECK(r.feasible);
      const double opt = min_vertex_cover_exact(g, c).cost;
      CHECK(r.cost <= bound * opt + 1e-12);
    }
  }
}

TEST_CASE("overlapping ownership wrapper") {
  const Graph single(1, {});
  const auto four = ThresholdFamily::general(1, [](int, std::span<const double>) { return 4.0; });
  VCInstance inst{single, Ownership{{{0}, {0}}}, {{3}, {5}}};
  auto r = nondisjoint_wrap(four, inst);
  CHECK(r.selected == std::vector<int>{0});
  CHECK(r.provider[0] == 0);
  CHECK(r.payments == std::vector<double>{4, 0});
  inst.costs = {{5}, {5}};
  r = nondisjoint_wrap(four, inst);
  CHECK(r.selected.empty());
  CHECK(r.total_payment() == 0);
  // Equal bids: the cap is the other bid, both meet it, the lower index wins.
  inst.costs = {{3}, {3}};
  r = nondisjoint_wrap(four, inst);
  CHECK(r.provider[0] == 0);
  CHECK(r.payments == std::vector<double>{3, 0});

  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 10;
    const auto vi = generate_random_vc_instance(n, 0.4, 1 + trial % 3, rng());
    const auto x = random_scaling(n, rng);
    const auto tf = bx_mechanism(vi.graph, x);
    if (vi.disjoint()) {
      bool ok = true;
      MechanismResult direct;
      try {
        direct = run_threshold_mechanism(tf, vi);
      } catch (const ContractViolation&) {
        ok = false;
      }
      if (ok) {
        const auto w = nondisjoint_wrap(tf, vi);
        CHECK(w.selected == direct.selected);
        CHECK(w.payments == direct.payments);
      }
    }
  }

  // Overlapping owners of independent nodes: selection equals the family's
  // output on the min-cost instance.
  const Graph p3 = path_graph(3);
  VCInstance ov{p3, Ownership{{{0, 2}, {0}, {1}}}, {{2, 1}, {0.5, }, {1}}};
  const auto tf = bx_mechanism(p3, testing::ones(3));
  r = nondisjoint_wrap(tf, ov);
  const auto chat = ov.node_costs();
  const auto direct = run_threshold_mechanism(tf, singleton_instance(p3, chat));
  CHECK(r.selected == direct.selected);
  CHECK(r.feasible);
}
