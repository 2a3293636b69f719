#include "umatch/generators.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "umatch/errors.hpp"

namespace umatch {
namespace {

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ParameterError(std::string(name) + " must lie in [0, 1], got " + std::to_string(p));
  }
}

}  // namespace

Graph gen_er(std::size_t n, double p, RngSeed seed) {
  check_probability(p, "p");
  std::vector<Edge> edges;
  if (n < 2 || p == 0.0) return build_graph(n, edges);
  Rng rng(seed);
  if (p == 1.0) {
    for (std::size_t v = 1; v < n; ++v)
      for (std::size_t w = 0; w < v; ++w) edges.push_back({static_cast<NodeId>(w), static_cast<NodeId>(v)});
    return build_graph(n, edges);
  }
  // Batagelj-Brandes: walk the strictly lower triangle (v, w), w < v, row by row.
  const double log_q = std::log1p(-p);
  std::int64_t v = 1;
  std::int64_t w = -1;
  const auto nn = static_cast<std::int64_t>(n);
  while (v < nn) {
    const double r = rng.uniform01();
    w += 1 + static_cast<std::int64_t>(std::floor(std::log1p(-r) / log_q));
    while (w >= v && v < nn) {
      w -= v;
      ++v;
    }
    if (v < nn) edges.push_back({static_cast<NodeId>(w), static_cast<NodeId>(v)});
  }
  return build_graph(n, edges);
}

Graph gen_pa(std::size_t n, std::size_t m, RngSeed seed) {
  if (n < 1) throw ParameterError("PA needs n >= 1");
  if (m < 1) throw ParameterError("PA needs m >= 1");
  Rng rng(seed);
  std::vector<Edge> edges;
  edges.reserve(n * m);
  // Every edge contributes both endpoints, so a uniform slot in `ends`
  // selects a node with probability deg/M.
  std::vector<NodeId> ends;
  ends.reserve(2 * n * m);
  for (std::size_t i = 0; i < m; ++i) {
    edges.push_back({0, 0});
    ends.push_back(0);
    ends.push_back(0);
  }
  for (std::size_t u = 1; u < n; ++u) {
    const auto self = static_cast<NodeId>(u);
    for (std::size_t i = 0; i < m; ++i) {
      const std::uint64_t total = ends.size();  // M_i
      assert(total == 2 * edges.size());
      const std::uint64_t slot = rng.bounded(total + 1);
      // The extra slot is u's +1; its current degree is already in `ends`.
      const NodeId target = slot == total ? self : ends[slot];
      edges.push_back({self, target});
      ends.push_back(self);
      ends.push_back(target);
    }
  }
  return build_graph(n, edges);
}

Graph gen_rmat(const RmatParams& params, RngSeed seed) {
  for (double q : {params.a, params.b, params.c, params.d}) check_probability(q, "quadrant probability");
  const double sum = params.a + params.b + params.c + params.d;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ParameterError("quadrant probabilities must sum to 1, got " + std::to_string(sum));
  }
  if (params.scale > 32) throw ParameterError("scale must be <= 32");
  const std::uint64_t n = std::uint64_t{1} << params.scale;
  if (n > kNoNode) throw ParameterError("scale 32 exceeds the 32-bit node id space");
  const std::uint64_t count = params.edge_factor * n;
  Rng rng(seed);
  const double ab = params.a + params.b;
  const double abc = ab + params.c;
  std::vector<Edge> edges;
  edges.reserve(count);
  for (std::uint64_t e = 0; e < count; ++e) {
    std::uint64_t row = 0;
    std::uint64_t col = 0;
    for (unsigned level = 0; level < params.scale; ++level) {
      const double r = rng.uniform01();
      row <<= 1;
      col <<= 1;
      if (r < params.a) {
      } else if (r < ab) {
        col |= 1;
      } else if (r < abc) {
        row |= 1;
      } else {
        row |= 1;
        col |= 1;
      }
    }
    edges.push_back({static_cast<NodeId>(row), static_cast<NodeId>(col)});
  }
  return build_graph(n, edges);
}

BipartiteAffiliation gen_affiliation(std::size_t users, std::size_t interests, std::size_t per_user,
                                     RngSeed seed) {
  if (users < 1 || interests < 1 || per_user < 1) throw ParameterError("affiliation counts must be >= 1");
  if (per_user > interests) {
    throw ParameterError("memberships per user (" + std::to_string(per_user) + ") exceeds interest count (" +
                         std::to_string(interests) + ")");
  }
  Rng rng(seed);
  BipartiteAffiliation b{users, interests, {}};
  b.memberships.reserve(users * per_user);
  // Weight of interest i is 1 + size(i): slot r < interests picks interest r,
  // otherwise the interest of membership (r - interests).
  std::vector<NodeId> chosen;
  for (std::size_t u = 0; u < users; ++u) {
    const std::uint64_t total = interests + b.memberships.size();
    chosen.clear();
    while (chosen.size() < per_user) {
      const std::uint64_t r = rng.bounded(total);
      const NodeId interest = r < interests ? static_cast<NodeId>(r) : b.memberships[r - interests].interest;
      // Rejecting repeats samples the remaining interests proportionally.
      if (std::find(chosen.begin(), chosen.end(), interest) == chosen.end()) chosen.push_back(interest);
    }
    for (NodeId interest : chosen) b.memberships.push_back({static_cast<NodeId>(u), interest});
  }
  return b;
}

Graph affiliation_to_graph(const BipartiteAffiliation& b) {
  return affiliation_to_graph(b, std::vector<bool>(b.interests, true));
}

Graph affiliation_to_graph(const BipartiteAffiliation& b, const std::vector<bool>& interest_alive) {
  std::vector<std::vector<NodeId>> members(b.interests);
  for (const auto& [user, interest] : b.memberships) {
    if (interest_alive.at(interest)) members[interest].push_back(user);
  }
  std::vector<std::uint64_t> keys;
  for (const auto& group : members) {
    for (std::size_t i = 0; i < group.size(); ++i) {
      for (std::size_t j = i + 1; j < group.size(); ++j) {
        const NodeId lo = std::min(group[i], group[j]);
        const NodeId hi = std::max(group[i], group[j]);
        keys.push_back((std::uint64_t{lo} << 32) | hi);
      }
    }
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  std::vector<Edge> edges;
  edges.reserve(keys.size());
  for (auto key : keys) edges.push_back({static_cast<NodeId>(key >> 32), static_cast<NodeId>(key)});
  return build_graph(b.users, edges);
}

}  // namespace umatch
