#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "umatch/generators.hpp"
#include "umatch/graph.hpp"
#include "umatch/rng.hpp"

namespace umatch {

/// Two observed copies of one underlying graph and their latent
/// correspondence (copy-1 id -> copy-2 id).
struct CopyPair {
  Graph g1;
  Graph g2;
  std::vector<LinkSet::Pair> truth;
  /// Free-form provenance: model name, parameters, seeds.
  std::map<std::string, std::string> meta;
};

/// Sybil marks for one copy: victim[u] is the node a sybil imitates, or
/// kNoNode for ordinary nodes.
struct SybilAnnotation {
  std::vector<NodeId> victim;

  bool contains(NodeId u) const { return u < victim.size() && victim[u] != kNoNode; }
  NodeId victim_of(NodeId u) const { return u < victim.size() ? victim[u] : kNoNode; }
  std::vector<NodeId> ids() const;
};

/// Each edge survives in copy 1 with probability s1 and, independently, in
/// copy 2 with probability s2. Both copies keep all n nodes. With `permute`
/// copy-2 ids are shuffled by a uniform permutation.
CopyPair copy_independent(const Graph& g, double s1, double s2, bool permute, RngSeed seed);

struct CascadeCopy {
  Subgraph copy;
  /// Activated node ids of the underlying graph, ascending.
  std::vector<NodeId> activated;
};

/// Independent cascade from `start`: every activation tries each neighbor
/// once with probability p; an inactive neighbor can be retried by later
/// activations. Returns the subgraph induced on the activated nodes.
CascadeCopy copy_cascade(const Graph& g, double p, NodeId start, RngSeed seed);

/// Pairs two cascade copies: truth links the local ids of nodes activated in both.
CopyPair pair_cascades(const CascadeCopy& first, const CascadeCopy& second);

/// Drops every interest independently with probability q and rebuilds the
/// user graph from the surviving memberships.
Graph copy_affiliation_correlated(const BipartiteAffiliation& b, double q, RngSeed seed);

struct SybilGraph {
  Graph graph;
  SybilAnnotation annotation;
};

/// For every node v adds a sybil w_v = v + n and, for every u in N(v), the
/// edge (u, w_v) with probability attach_prob.
SybilGraph inject_sybils(const Graph& g, double attach_prob, RngSeed seed);

/// Relabels copy-2 nodes by a uniform random permutation and rewrites truth.
void permute_copy2(CopyPair& cp, RngSeed seed);

/// Links each truth pair whose endpoints have degree >= 1 in their copies
/// independently with probability l.
LinkSet sample_seeds(const CopyPair& cp, double l, RngSeed seed);

/// Truth pairs with degree >= min_degree on both sides.
std::vector<LinkSet::Pair> eligible_pairs(const Graph& g1, const Graph& g2, std::span<const LinkSet::Pair> truth,
                                          std::uint32_t min_degree = 1);

}  // namespace umatch

namespace umatch {

/// Writes both annotations in the `<copy> <sybil id> <victim id>` format.
void write_sybils(const std::filesystem::path& path, const SybilAnnotation& copy1, const SybilAnnotation& copy2);

/// Rebuilds an annotation for a copy with `num_nodes` nodes.
SybilAnnotation annotation_from(std::span<const std::pair<NodeId, NodeId>> sybils, std::size_t num_nodes);

}  // namespace umatch
