#include "umatch/graph.hpp"

#include <algorithm>
#include <cassert>
#include <string>

#include "umatch/errors.hpp"

namespace umatch {

std::span<const NodeId> Graph::neighbors(NodeId u) const {
  if (!contains(u)) {
    throw UsageError("node " + std::to_string(u) + " out of range for graph with " +
                     std::to_string(num_nodes()) + " nodes");
  }
  return neighbors_unchecked(u);
}

std::size_t Graph::multiplicity(NodeId u, NodeId v) const {
  const auto nbrs = neighbors(u);
  const auto [lo, hi] = std::equal_range(nbrs.begin(), nbrs.end(), v);
  return static_cast<std::size_t>(hi - lo);
}

Graph build_graph(std::size_t n, std::span<const Edge> edges) {
  if (n > static_cast<std::size_t>(kNoNode)) {
    throw UsageError("node count " + std::to_string(n) + " exceeds 32-bit id space");
  }
  Graph g;
  g.edges_.reserve(edges.size());
  g.degrees_.assign(n, 0);
  std::vector<std::uint64_t> slots(n + 1, 0);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto [u, v] = edges[i];
    if (u >= n || v >= n) {
      throw UsageError("edge " + std::to_string(i) + " (" + std::to_string(u) + ", " + std::to_string(v) +
                       ") references a node outside [0, " + std::to_string(n) + ")");
    }
    if (u > v) std::swap(u, v);
    g.edges_.push_back({u, v});
    g.degrees_[u] += 1;
    g.degrees_[v] += 1;
    slots[u + 1] += 1;
    if (u != v) slots[v + 1] += 1;
  }
  for (std::size_t i = 0; i < n; ++i) slots[i + 1] += slots[i];
  g.offsets_ = slots;
  g.adjacency_.resize(slots[n]);
  for (const auto& [u, v] : g.edges_) {
    g.adjacency_[slots[u]++] = v;
    if (u != v) g.adjacency_[slots[v]++] = u;
  }
  for (std::size_t u = 0; u < n; ++u) {
    std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[u]),
              g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[u + 1]));
  }
  g.max_degree_ = g.degrees_.empty() ? 0 : *std::max_element(g.degrees_.begin(), g.degrees_.end());
#ifndef NDEBUG
  std::uint64_t total = 0;
  for (auto d : g.degrees_) total += d;
  assert(total == 2 * g.edges_.size());
#endif
  return g;
}

Subgraph induced_subgraph(const Graph& g, const std::function<bool(NodeId)>& keep) {
  Subgraph out;
  const auto n = g.num_nodes();
  out.remap.assign(n, kNoNode);
  for (std::size_t u = 0; u < n; ++u) {
    if (keep(static_cast<NodeId>(u))) {
      out.remap[u] = static_cast<NodeId>(out.original.size());
      out.original.push_back(static_cast<NodeId>(u));
    }
  }
  std::vector<Edge> kept;
  for (const auto& [u, v] : g.edges()) {
    if (out.remap[u] != kNoNode && out.remap[v] != kNoNode) kept.push_back({out.remap[u], out.remap[v]});
  }
  out.graph = build_graph(out.original.size(), kept);
  return out;
}

LinkSet LinkSet::from_pairs(std::span<const Pair> pairs) {
  LinkSet set;
  for (const auto& [left, right] : pairs) {
    if (left == kNoNode || right == kNoNode) throw UsageError("link references the reserved id");
    if (!set.insert(left, right)) {
      throw UsageError("link set is not injective at pair (" + std::to_string(left) + ", " +
                       std::to_string(right) + ")");
    }
  }
  return set;
}

bool LinkSet::insert(NodeId left, NodeId right) {
  if (left_linked(left) || right_linked(right)) return false;
  if (left >= by_left_.size()) by_left_.resize(std::max<std::size_t>(left + 1, by_left_.size() * 2), kNoNode);
  if (right >= by_right_.size()) by_right_.resize(std::max<std::size_t>(right + 1, by_right_.size() * 2), kNoNode);
  by_left_[left] = right;
  by_right_[right] = left;
  pairs_.push_back({left, right});
  return true;
}

std::vector<LinkSet::Pair> LinkSet::sorted() const {
  std::vector<Pair> out(pairs_.begin(), pairs_.end());
  std::sort(out.begin(), out.end());
  return out;
}

LinkSet LinkSet::transposed() const {
  LinkSet t;
  for (const auto& [left, right] : pairs_) t.insert(right, left);
  return t;
}

bool LinkSet::is_subset_of(const LinkSet& other) const {
  return std::all_of(pairs_.begin(), pairs_.end(),
                     [&](const Pair& p) { return other.contains(p.left, p.right); });
}

}  // namespace umatch
