#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace umatch {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

struct Edge {
  NodeId u;
  NodeId v;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Immutable undirected multigraph in compressed sparse row form.
///
/// Self-loops are stored once in the edge list, appear once in the
/// owner's neighbor list and add 2 to its degree. Parallel edges are kept.
class Graph {
 public:
  Graph() = default;

  std::size_t num_nodes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const { return edges_.size(); }

  /// Edges in construction order, each normalized so that u <= v.
  std::span<const Edge> edges() const { return edges_; }

  /// Sorted neighbor multiset. Throws UsageError if u is out of range.
  std::span<const NodeId> neighbors(NodeId u) const;

  /// Unchecked access for hot loops.
  std::span<const NodeId> neighbors_unchecked(NodeId u) const {
    return {adjacency_.data() + offsets_[u], adjacency_.data() + offsets_[u + 1]};
  }

  std::uint32_t degree(NodeId u) const { return degrees_[u]; }
  std::span<const std::uint32_t> degrees() const { return degrees_; }
  std::uint32_t max_degree() const { return max_degree_; }

  bool contains(NodeId u) const { return u < num_nodes(); }

  /// Number of times v appears in neighbors(u).
  std::size_t multiplicity(NodeId u, NodeId v) const;

 private:
  friend Graph build_graph(std::size_t n, std::span<const Edge> edges);

  std::vector<Edge> edges_;
  std::vector<std::uint64_t> offsets_;
  std::vector<NodeId> adjacency_;
  std::vector<std::uint32_t> degrees_;
  std::uint32_t max_degree_ = 0;
};

/// Builds a graph on nodes [0, n). Throws UsageError naming the index of
/// the first edge that references a node >= n.
Graph build_graph(std::size_t n, std::span<const Edge> edges);

inline Graph build_graph(std::size_t n, std::initializer_list<Edge> edges) {
  return build_graph(n, std::span<const Edge>(edges.begin(), edges.size()));
}

struct Subgraph {
  Graph graph;
  /// old id -> new id, kNoNode for dropped nodes.
  std::vector<NodeId> remap;
  /// new id -> old id.
  std::vector<NodeId> original;
};

/// Keeps the nodes selected by `keep` (relabelled densely in ascending old-id
/// order) and every edge whose endpoints are both kept.
Subgraph induced_subgraph(const Graph& g, const std::function<bool(NodeId)>& keep);

/// Partial injective mapping between copy-1 and copy-2 nodes.
///
/// Pairs are kept in insertion order; lookups in both directions are O(1)
/// through dense index arrays sized on demand.
class LinkSet {
 public:
  struct Pair {
    NodeId left;
    NodeId right;
    friend bool operator==(const Pair&, const Pair&) = default;
    friend auto operator<=>(const Pair&, const Pair&) = default;
  };

  LinkSet() = default;

  /// Throws UsageError if the pairs are not injective in both directions.
  static LinkSet from_pairs(std::span<const Pair> pairs);
  static LinkSet from_pairs(std::initializer_list<Pair> pairs) {
    return from_pairs(std::span<const Pair>(pairs.begin(), pairs.size()));
  }

  /// Adds (left, right). Returns false and leaves the set unchanged when
  /// either endpoint is already linked.
  bool insert(NodeId left, NodeId right);

  bool contains(NodeId left, NodeId right) const { return right_of(left) == right && right != kNoNode; }
  NodeId right_of(NodeId left) const { return left < by_left_.size() ? by_left_[left] : kNoNode; }
  NodeId left_of(NodeId right) const { return right < by_right_.size() ? by_right_[right] : kNoNode; }
  bool left_linked(NodeId left) const { return right_of(left) != kNoNode; }
  bool right_linked(NodeId right) const { return left_of(right) != kNoNode; }

  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  std::span<const Pair> pairs() const { return pairs_; }

  /// Pairs sorted by (left, right).
  std::vector<Pair> sorted() const;

  /// Reverses the direction of every pair.
  LinkSet transposed() const;

  bool is_subset_of(const LinkSet& other) const;

  friend bool operator==(const LinkSet& a, const LinkSet& b) { return a.sorted() == b.sorted(); }

 private:
  std::vector<Pair> pairs_;
  std::vector<NodeId> by_left_;
  std::vector<NodeId> by_right_;
};

}  // namespace umatch
