#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nca/field.hpp"

namespace nca::net {

struct Session {
  int source;
  int destination;
};

/// A validated three-session unicast network: a DAG with unit-capacity
/// directed edges, three disjoint (source, destination) pairs, and a prime
/// field size. Sources have no in-edges and destinations no out-edges.
/// Immutable after construction.
class Network {
 public:
  Network(std::vector<std::string> nodes,
          std::vector<std::pair<int, int>> edges,
          std::array<Session, 3> sessions, gf::Elem field_prime);

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::array<Session, 3>& sessions() const { return sessions_; }
  gf::Elem field_prime() const { return field_prime_; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  /// Nodes in a deterministic topological order (ties broken by node index).
  const std::vector<int>& topo_order() const { return topo_order_; }

  /// Edge ids entering / leaving a node, in edge-list order.
  const std::vector<int>& in_edges(int node) const { return in_edges_[node]; }
  const std::vector<int>& out_edges(int node) const { return out_edges_[node]; }

  /// Session number 1..3 if the node is that session's source/destination,
  /// else 0.
  int source_session(int node) const { return source_of_[node]; }
  int destination_session(int node) const { return dest_of_[node]; }

  int node_id(const std::string& name) const;

 private:
  std::vector<std::string> nodes_;
  std::vector<std::pair<int, int>> edges_;
  std::array<Session, 3> sessions_;
  gf::Elem field_prime_;

  std::vector<std::vector<int>> in_edges_;
  std::vector<std::vector<int>> out_edges_;
  std::vector<int> topo_order_;
  std::vector<int> source_of_;
  std::vector<int> dest_of_;

  void validate();
};

/// Parse the JSON network description. Throws ParseError for malformed text
/// and ValidationError for structural violations.
Network parse_network(const std::string& text);

/// Canonical serialization: schema keys only, sorted, no whitespace.
/// parse_network(serialize(net)) reproduces an identical network.
std::string serialize(const Network& net);

/// 16-hex-digit FNV-1a digest of the canonical serialization; pairs design
/// files with the network they were built for.
std::string content_digest(const Network& net);

/// Maximum number of edge-disjoint s->t paths in a unit-capacity digraph,
/// by augmenting-path max flow. Exposed separately for testing on raw graphs.
int edge_disjoint_paths(int node_count,
                        const std::vector<std::pair<int, int>>& edges, int s,
                        int t);

/// Min-cut of session 1..3, i.e. its max number of edge-disjoint paths.
int mincut(const Network& net, int session);

inline constexpr int kInjectSlot = -1;   // message enters at a source
inline constexpr int kCombineSlot = -2;  // output forms at a destination

/// One local coding coefficient: at `node`, the weight applied to input
/// slot `in_slot` when forming output slot `out_slot`. Slots are edge ids,
/// or the pseudo-slots above.
struct CoeffEntry {
  int node;
  int in_slot;
  int out_slot;

  bool operator==(const CoeffEntry&) const = default;
};

/// Deterministic enumeration of every coefficient in the network: nodes in
/// topological order, then in-slots, then out-slots, both in edge-list
/// order. The index of an entry is its position in entries().
class CoefficientIndex {
 public:
  explicit CoefficientIndex(const Network& net);

  std::size_t size() const { return entries_.size(); }
  const std::vector<CoeffEntry>& entries() const { return entries_; }
  const CoeffEntry& entry(std::size_t i) const { return entries_[i]; }

  /// First coefficient index of the (node, in_slot) group, laid out so that
  /// consecutive out-slots are adjacent.
  std::size_t index_of(int node, int in_slot, int out_slot) const;

 private:
  std::vector<CoeffEntry> entries_;
  // per node: base offset plus the slot lists used at enumeration time
  std::vector<std::size_t> node_base_;
  std::vector<std::vector<int>> node_in_slots_;
  std::vector<std::vector<int>> node_out_slots_;

  friend class Propagator;
  friend struct PropagationPlan;
};

CoefficientIndex coefficient_index(const Network& net);

/// Flattened propagation schedule shared by the transfer evaluator and the
/// simulator: for each node in topological order, the coefficient index of
/// every (in-slot, out-slot) pair.
struct PropagationPlan {
  struct NodeStep {
    int node;
    std::vector<int> in_slots;   // edge ids, or kInjectSlot
    std::vector<int> out_slots;  // edge ids, or kCombineSlot
    std::size_t coeff_base;      // entries are in-major, out-minor
  };
  std::vector<NodeStep> steps;
  std::size_t coeff_count = 0;

  PropagationPlan(const Network& net, const CoefficientIndex& index);
};

}  // namespace nca::net
