#ifndef COVERMECH_INSTANCE_HPP
#define COVERMECH_INSTANCE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "covermech/graph.hpp"

namespace covermech {

/// Agent i owns the sorted node list sets[i]. Sets may overlap.
struct Ownership {
  std::vector<std::vector<int>> sets;

  int num_agents() const { return static_cast<int>(sets.size()); }
  int dimension() const;  // max |T_i|
  bool disjoint(int num_nodes) const;
  /// owners[u] = agents owning u, ascending.
  std::vector<std::vector<int>> owners_by_node(int num_nodes) const;
  /// For disjoint ownership: the single owner of each node, -1 if unowned.
  std::vector<int> owner_of(int num_nodes) const;

  friend bool operator==(const Ownership&, const Ownership&) = default;
};

Ownership singleton_ownership(int num_nodes);

struct VCSkeleton {
  Graph graph;
  Ownership owners;
};

/// costs[i][k] is agent i's cost for node owners.sets[i][k].
struct VCInstance {
  Graph graph;
  Ownership owners;
  std::vector<std::vector<double>> costs;

  int num_nodes() const { return graph.num_nodes(); }
  int num_agents() const { return owners.num_agents(); }
  bool disjoint() const { return owners.disjoint(graph.num_nodes()); }
  /// Effective node cost: min over owners, 0 for nodes nobody owns.
  std::vector<double> node_costs() const;
  /// Same instance with costs read from a per-node vector (every owner of u
  /// reports node_cost[u]).
  VCInstance with_node_costs(std::span<const double> node_cost) const;

  friend bool operator==(const VCInstance&, const VCInstance&) = default;
};

VCInstance attach_costs(const VCSkeleton& skeleton, std::span<const double> node_cost);
VCInstance singleton_instance(const Graph& g, std::span<const double> node_cost);

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> reasons;
};

ValidationReport validate_vc_instance(const VCInstance& inst);
ValidationReport validate_ownership(const Graph& g, const Ownership& owners);

/// G(n,p) graph; agents formed from a random permutation by grouping up to r
/// mutually nonadjacent unassigned nodes; costs uniform on [0,1].
VCInstance generate_random_vc_instance(int n, double edge_prob, int r, std::uint64_t seed);

/// Nodes u_i = i and v_i = n + i, edges (u_i, v_j) for i != j, agent i owns
/// {u_i, v_i}.
VCSkeleton generate_gadget(int n);

struct UFLInstance {
  std::vector<int> facility_agent;
  std::vector<double> open_cost;
  int num_clients = 0;
  std::vector<std::vector<double>> assign_cost;  // [facility][client]

  int num_facilities() const { return static_cast<int>(open_cost.size()); }
  int num_agents() const;
  std::vector<std::vector<int>> agent_facilities() const;

  friend bool operator==(const UFLInstance&, const UFLInstance&) = default;
};

struct UFLSolution {
  std::vector<char> open;  // per facility
  std::vector<int> assign;  // client -> facility
  double facility_cost = 0;
  double connection_cost = 0;
  double cost() const { return facility_cost + connection_cost; }
};

ValidationReport validate_ufl_instance(const UFLInstance& inst);

/// Facilities and clients are random points in [0,1]^dims with Euclidean
/// distances; opening costs uniform on [0, max_open]; facilities are dealt to
/// `agents` owners round-robin after a shuffle.
UFLInstance generate_random_ufl(int facilities, int clients, int agents, std::uint64_t seed,
                                int dims = 1, double max_open = 1.0);

/// Each client is at distance 1 from `degree` random facilities and 3 from
/// the rest (always metric); opening costs uniform on [0.5, max_open]. Odd
/// cycles in the client-facility graph give fractional LP optima.
UFLInstance generate_bipartite_ufl(int facilities, int clients, int agents, std::uint64_t seed, int degree = 2,
                                   double max_open = 3.0);

/// Nearest-open assignment (ties to the lowest facility index) and its cost.
UFLSolution assign_nearest(const UFLInstance& inst, std::span<const char> open);

}  // namespace covermech

#endif  // COVERMECH_INSTANCE_HPP
