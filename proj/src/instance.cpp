#include "covermech/instance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace covermech {

int Ownership::dimension() const {
  std::size_t r = 0;
  for (const auto& s : sets) r = std::max(r, s.size());
  return static_cast<int>(r);
}

bool Ownership::disjoint(int num_nodes) const {
  std::vector<char> seen(num_nodes, 0);
  for (const auto& s : sets) {
    for (int u : s) {
      if (seen[u]) return false;
      seen[u] = 1;
    }
  }
  return true;
}

std::vector<std::vector<int>> Ownership::owners_by_node(int num_nodes) const {
  std::vector<std::vector<int>> out(num_nodes);
  for (int i = 0; i < num_agents(); ++i)
    for (int u : sets[i]) out[u].push_back(i);
  return out;
}

std::vector<int> Ownership::owner_of(int num_nodes) const {
  std::vector<int> out(num_nodes, -1);
  for (int i = 0; i < num_agents(); ++i)
    for (int u : sets[i]) out[u] = i;
  return out;
}

Ownership singleton_ownership(int num_nodes) {
  Ownership o;
  for (int u = 0; u < num_nodes; ++u) o.sets.push_back({u});
  return o;
}

std::vector<double> VCInstance::node_costs() const {
  std::vector<double> c(num_nodes(), std::numeric_limits<double>::infinity());
  std::vector<char> owned(num_nodes(), 0);
  for (int i = 0; i < num_agents(); ++i) {
    for (std::size_t k = 0; k < owners.sets[i].size(); ++k) {
      const int u = owners.sets[i][k];
      c[u] = std::min(c[u], costs[i][k]);
      owned[u] = 1;
    }
  }
  for (int u = 0; u < num_nodes(); ++u)
    if (!owned[u]) c[u] = 0.0;
  return c;
}

VCInstance VCInstance::with_node_costs(std::span<const double> node_cost) const {
  VCInstance out{graph, owners, {}};
  out.costs.resize(owners.sets.size());
  for (std::size_t i = 0; i < owners.sets.size(); ++i)
    for (int u : owners.sets[i]) out.costs[i].push_back(node_cost[u]);
  return out;
}

VCInstance attach_costs(const VCSkeleton& skeleton, std::span<const double> node_cost) {
  return VCInstance{skeleton.graph, skeleton.owners, {}}.with_node_costs(node_cost);
}

VCInstance singleton_instance(const Graph& g, std::span<const double> node_cost) {
  return VCInstance{g, singleton_ownership(g.num_nodes()), {}}.with_node_costs(node_cost);
}

ValidationReport validate_ownership(const Graph& g, const Ownership& owners) {
  ValidationReport rep;
  auto fail = [&](std::string why) {
    rep.ok = false;
    rep.reasons.push_back(std::move(why));
  };
  for (int i = 0; i < owners.num_agents(); ++i) {
    const auto& s = owners.sets[i];
    for (int u : s) {
      if (u < 0 || u >= g.num_nodes()) {
        fail("agent " + std::to_string(i) + " owns out-of-range node " + std::to_string(u));
        return rep;
      }
    }
    if (!std::is_sorted(s.begin(), s.end()) ||
        std::adjacent_find(s.begin(), s.end()) != s.end()) {
      fail("agent " + std::to_string(i) + " node list not strictly increasing");
      continue;
    }
    for (std::size_t a = 0; a < s.size(); ++a) {
      for (std::size_t b = a + 1; b < s.size(); ++b) {
        if (g.has_edge(s[a], s[b])) {
          fail("agent " + std::to_string(i) + " owns adjacent nodes " + std::to_string(s[a]) +
               " and " + std::to_string(s[b]) + " (not independent)");
        }
      }
    }
  }
  return rep;
}

ValidationReport validate_vc_instance(const VCInstance& inst) {
  ValidationReport rep = validate_ownership(inst.graph, inst.owners);
  auto fail = [&](std::string why) {
    rep.ok = false;
    rep.reasons.push_back(std::move(why));
  };
  if (inst.costs.size() != inst.owners.sets.size()) {
    fail("cost table has " + std::to_string(inst.costs.size()) + " agents, ownership has " +
         std::to_string(inst.owners.sets.size()));
    return rep;
  }
  for (int i = 0; i < inst.num_agents(); ++i) {
    if (inst.costs[i].size() != inst.owners.sets[i].size()) {
      fail("agent " + std::to_string(i) + " has " + std::to_string(inst.costs[i].size()) +
           " costs for " + std::to_string(inst.owners.sets[i].size()) + " owned nodes");
      continue;
    }
    for (double c : inst.costs[i]) {
      if (!std::isfinite(c) || c < 0) {
        fail("agent " + std::to_string(i) + " has a negative or non-finite cost");
        break;
      }
    }
  }
  return rep;
}

VCInstance generate_random_vc_instance(int n, double edge_prob, int r, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("random instance: n must be at least 2");
  if (r < 1) throw std::invalid_argument("random instance: r must be at least 1");
  if (!(edge_prob >= 0 && edge_prob <= 1))
    throw std::invalid_argument("random instance: edge probability outside [0,1]");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(edge_prob);
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (coin(rng)) edges.emplace_back(u, v);
  Graph g(n, std::move(edges));

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<char> assigned(n, 0);
  Ownership owners;
  for (int a = 0; a < n; ++a) {
    if (assigned[order[a]]) continue;
    std::vector<int> group{order[a]};
    assigned[order[a]] = 1;
    for (int b = a + 1; b < n && static_cast<int>(group.size()) < r; ++b) {
      const int w = order[b];
      if (assigned[w]) continue;
      if (std::none_of(group.begin(), group.end(), [&](int u) { return g.has_edge(u, w); })) {
        group.push_back(w);
        assigned[w] = 1;
      }
    }
    std::sort(group.begin(), group.end());
    owners.sets.push_back(std::move(group));
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  VCInstance inst{std::move(g), std::move(owners), {}};
  for (const auto& s : inst.owners.sets) {
    std::vector<double> c(s.size());
    for (double& x : c) x = unit(rng);
    inst.costs.push_back(std::move(c));
  }
  return inst;
}

VCSkeleton generate_gadget(int n) {
  if (n < 2) throw std::invalid_argument("gadget: n must be at least 2");
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) edges.emplace_back(i, n + j);
  VCSkeleton sk{Graph(2 * n, std::move(edges)), {}};
  for (int i = 0; i < n; ++i) sk.owners.sets.push_back({i, n + i});
  return sk;
}

int UFLInstance::num_agents() const {
  int a = 0;
  for (int i : facility_agent) a = std::max(a, i + 1);
  return a;
}

std::vector<std::vector<int>> UFLInstance::agent_facilities() const {
  std::vector<std::vector<int>> out(num_agents());
  for (int l = 0; l < num_facilities(); ++l) out[facility_agent[l]].push_back(l);
  return out;
}

ValidationReport validate_ufl_instance(const UFLInstance& inst) {
  ValidationReport rep;
  auto fail = [&](std::string why) {
    rep.ok = false;
    rep.reasons.push_back(std::move(why));
  };
  const int nf = inst.num_facilities();
  const int nd = inst.num_clients;
  if (nf == 0) fail("no facilities");
  if (nd < 0) fail("negative client count");
  if (inst.facility_agent.size() != inst.open_cost.size()) fail("facility agent/open cost length mismatch");
  if (static_cast<int>(inst.assign_cost.size()) != nf) fail("assign_cost must have one row per facility");
  if (!rep.ok) return rep;
  for (int l = 0; l < nf; ++l) {
    if (inst.facility_agent[l] < 0) fail("facility " + std::to_string(l) + " has negative agent id");
    if (!std::isfinite(inst.open_cost[l]) || inst.open_cost[l] < 0)
      fail("facility " + std::to_string(l) + " has a negative or non-finite opening cost");
    if (static_cast<int>(inst.assign_cost[l].size()) != nd) {
      fail("assign_cost row " + std::to_string(l) + " has wrong length");
      return rep;
    }
    for (double c : inst.assign_cost[l]) {
      if (!std::isfinite(c) || c < 0) {
        fail("assign_cost row " + std::to_string(l) + " has a negative or non-finite entry");
        break;
      }
    }
  }
  if (!rep.ok) return rep;
  const auto& c = inst.assign_cost;
  for (int l = 0; l < nf; ++l) {
    for (int l2 = 0; l2 < nf; ++l2) {
      for (int j = 0; j < nd; ++j) {
        for (int j2 = 0; j2 < nd; ++j2) {
          const double bound = c[l][j2] + c[l2][j2] + c[l2][j];
          if (c[l][j] > bound + 1e-9 * (1 + bound)) {
            std::ostringstream os;
            os << "assignment costs are not metric: c[" << l << "][" << j << "] exceeds the path via client "
               << j2 << " and facility " << l2;
            fail(os.str());
            return rep;
          }
        }
      }
    }
  }
  return rep;
}

UFLInstance generate_random_ufl(int facilities, int clients, int agents, std::uint64_t seed,
                                int dims, double max_open) {
  if (facilities < 1 || clients < 1 || agents < 1 || dims < 1)
    throw std::invalid_argument("random UFL: sizes must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto point = [&] {
    std::vector<double> p(dims);
    for (double& x : p) x = unit(rng);
    return p;
  };
  std::vector<std::vector<double>> fp(facilities), cp(clients);
  for (auto& p : fp) p = point();
  for (auto& p : cp) p = point();
  UFLInstance inst;
  inst.num_clients = clients;
  for (int l = 0; l < facilities; ++l) inst.open_cost.push_back(max_open * unit(rng));
  std::vector<int> order(facilities);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  inst.facility_agent.assign(facilities, 0);
  for (int k = 0; k < facilities; ++k) inst.facility_agent[order[k]] = k % agents;
  inst.assign_cost.assign(facilities, std::vector<double>(clients));
  for (int l = 0; l < facilities; ++l) {
    for (int j = 0; j < clients; ++j) {
      double s = 0;
      for (int d = 0; d < dims; ++d) s += (fp[l][d] - cp[j][d]) * (fp[l][d] - cp[j][d]);
      inst.assign_cost[l][j] = std::sqrt(s);
    }
  }
  return inst;
}

UFLInstance generate_bipartite_ufl(int facilities, int clients, int agents, std::uint64_t seed, int degree,
                                   double max_open) {
  if (facilities < 1 || clients < 1 || agents < 1)
    throw std::invalid_argument("bipartite UFL: sizes must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> open(0.5, max_open);
  UFLInstance inst;
  inst.num_clients = clients;
  for (int l = 0; l < facilities; ++l) inst.open_cost.push_back(open(rng));
  std::vector<int> order(facilities);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  inst.facility_agent.assign(facilities, 0);
  for (int k = 0; k < facilities; ++k) inst.facility_agent[order[k]] = k % agents;
  inst.assign_cost.assign(facilities, std::vector<double>(clients, 3.0));
  std::vector<int> fac(facilities);
  std::iota(fac.begin(), fac.end(), 0);
  for (int j = 0; j < clients; ++j) {
    std::shuffle(fac.begin(), fac.end(), rng);
    for (int k = 0; k < std::min(degree, facilities); ++k) inst.assign_cost[fac[k]][j] = 1.0;
  }
  return inst;
}

UFLSolution assign_nearest(const UFLInstance& inst, std::span<const char> open) {
  UFLSolution sol;
  sol.open.assign(open.begin(), open.end());
  sol.assign.assign(inst.num_clients, -1);
  for (int l = 0; l < inst.num_facilities(); ++l)
    if (open[l]) sol.facility_cost += inst.open_cost[l];
  for (int j = 0; j < inst.num_clients; ++j) {
    int best = -1;
    for (int l = 0; l < inst.num_facilities(); ++l) {
      if (open[l] && (best < 0 || inst.assign_cost[l][j] < inst.assign_cost[best][j])) best = l;
    }
    if (best < 0) throw std::invalid_argument("assign_nearest: no open facility");
    sol.assign[j] = best;
    sol.connection_cost += inst.assign_cost[best][j];
  }
  return sol;
}

}  // namespace covermech
