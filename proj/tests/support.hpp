#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "umatch/generators.hpp"
#include "umatch/graph.hpp"
#include "umatch/rng.hpp"

namespace umatch::test {

// |observed - n p| <= 4 sqrt(n p (1 - p))
inline bool within_4_sigma(double observed, double trials, double p) {
  return std::abs(observed - trials * p) <= 4.0 * std::sqrt(trials * p * (1.0 - p));
}

// A random injective LinkSet pairing `count` random nodes of g1 with random
// nodes of g2.
inline LinkSet random_links(std::size_t n1, std::size_t n2, std::size_t count, Rng& rng) {
  std::vector<NodeId> left(n1);
  std::vector<NodeId> right(n2);
  std::iota(left.begin(), left.end(), 0);
  std::iota(right.begin(), right.end(), 0);
  for (std::size_t i = n1; i > 1; --i) std::swap(left[i - 1], left[rng.bounded(i)]);
  for (std::size_t i = n2; i > 1; --i) std::swap(right[i - 1], right[rng.bounded(i)]);
  LinkSet links;
  for (std::size_t i = 0; i < std::min({count, n1, n2}); ++i) links.insert(left[i], right[i]);
  return links;
}

// Relabels g by perm (old id -> new id).
inline Graph relabel(const Graph& g, const std::vector<NodeId>& perm) {
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) edges.push_back({perm[e.u], perm[e.v]});
  return build_graph(g.num_nodes(), edges);
}

inline std::vector<NodeId> random_permutation(std::size_t n, Rng& rng) {
  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.bounded(i)]);
  return perm;
}

}  // namespace umatch::test
