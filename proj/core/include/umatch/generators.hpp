#pragma once

#include <cstdint>
#include <vector>

#include "umatch/graph.hpp"
#include "umatch/rng.hpp"

namespace umatch {

/// Erdos-Renyi G(n, p): every unordered pair of distinct nodes is present
/// independently with probability p. Pairs are visited in lexicographic
/// order using geometric skips, so cost is O(n + |E|).
Graph gen_er(std::size_t n, double p, RngSeed seed);

/// Preferential attachment as an edge-by-edge process. Node 0 starts with m
/// self-loops. Each later node u adds m edges one at a time; with M the
/// current degree sum, the far endpoint is an existing node w with
/// probability deg(w)/(M+1) or u itself with probability (deg(u)+1)/(M+1).
/// Degrees are updated between the m draws.
Graph gen_pa(std::size_t n, std::size_t m, RngSeed seed);

struct RmatParams {
  unsigned scale = 16;
  std::size_t edge_factor = 16;
  double a = 0.57;
  double b = 0.19;
  double c = 0.19;
  double d = 0.05;
};

/// Recursive-matrix generator: 2^scale nodes, edge_factor * 2^scale edge
/// samples, each placed by `scale` quadrant descents. Duplicates and
/// self-loops are kept.
Graph gen_rmat(const RmatParams& params, RngSeed seed);

struct BipartiteAffiliation {
  std::size_t users = 0;
  std::size_t interests = 0;
  struct Membership {
    NodeId user;
    NodeId interest;
    friend bool operator==(const Membership&, const Membership&) = default;
  };
  /// Ordered by arrival: user-major, draw order within a user.
  std::vector<Membership> memberships;
};

/// Users arrive one at a time; each picks `per_user` distinct interests, each
/// with probability proportional to 1 + (memberships the interest held
/// before this user arrived).
BipartiteAffiliation gen_affiliation(std::size_t users, std::size_t interests, std::size_t per_user,
                                     RngSeed seed);

/// Simple graph on users: (u, v) present iff they share at least one interest.
Graph affiliation_to_graph(const BipartiteAffiliation& b);

/// Same, restricted to interests whose flag is set.
Graph affiliation_to_graph(const BipartiteAffiliation& b, const std::vector<bool>& interest_alive);

}  // namespace umatch
