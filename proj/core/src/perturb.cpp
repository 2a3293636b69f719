#include "umatch/perturb.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <numeric>
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

std::vector<NodeId> SybilAnnotation::ids() const {
  std::vector<NodeId> out;
  for (std::size_t u = 0; u < victim.size(); ++u)
    if (victim[u] != kNoNode) out.push_back(static_cast<NodeId>(u));
  return out;
}

CopyPair copy_independent(const Graph& g, double s1, double s2, bool permute, RngSeed seed) {
  check_probability(s1, "s1");
  check_probability(s2, "s2");
  Rng rng(seed);
  const auto n = g.num_nodes();
  std::vector<NodeId> label(n);
  std::iota(label.begin(), label.end(), NodeId{0});
  if (permute) {
    for (std::size_t i = n; i > 1; --i) std::swap(label[i - 1], label[rng.bounded(i)]);
  }
  std::vector<Edge> e1;
  std::vector<Edge> e2;
  for (const auto& [u, v] : g.edges()) {
    const bool in1 = rng.bernoulli(s1);
    const bool in2 = rng.bernoulli(s2);
    if (in1) e1.push_back({u, v});
    if (in2) e2.push_back({label[u], label[v]});
  }
  CopyPair cp;
  cp.g1 = build_graph(n, e1);
  cp.g2 = build_graph(n, e2);
  cp.truth.reserve(n);
  for (std::size_t u = 0; u < n; ++u) cp.truth.push_back({static_cast<NodeId>(u), label[u]});
  cp.meta = {{"model", "independent"},
             {"s1", std::to_string(s1)},
             {"s2", std::to_string(s2)},
             {"permute", permute ? "true" : "false"},
             {"seed", std::to_string(seed.value)}};
  return cp;
}

CascadeCopy copy_cascade(const Graph& g, double p, NodeId start, RngSeed seed) {
  check_probability(p, "p");
  if (!g.contains(start)) throw UsageError("cascade start " + std::to_string(start) + " out of range");
  Rng rng(seed);
  std::vector<bool> active(g.num_nodes(), false);
  std::deque<NodeId> frontier{start};
  active[start] = true;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop_front();
    NodeId previous = kNoNode;
    for (NodeId w : g.neighbors_unchecked(u)) {
      // One trial per distinct neighbor.
      if (w == previous) continue;
      previous = w;
      if (active[w]) continue;
      if (rng.bernoulli(p)) {
        active[w] = true;
        frontier.push_back(w);
      }
    }
  }
  CascadeCopy out;
  out.copy = induced_subgraph(g, [&](NodeId u) { return active[u]; });
  out.activated = out.copy.original;
  return out;
}

CopyPair pair_cascades(const CascadeCopy& first, const CascadeCopy& second) {
  CopyPair cp;
  cp.g1 = first.copy.graph;
  cp.g2 = second.copy.graph;
  for (std::size_t local = 0; local < first.copy.original.size(); ++local) {
    const NodeId original = first.copy.original[local];
    const NodeId other = original < second.copy.remap.size() ? second.copy.remap[original] : kNoNode;
    if (other != kNoNode) cp.truth.push_back({static_cast<NodeId>(local), other});
  }
  cp.meta = {{"model", "cascade"}};
  return cp;
}

Graph copy_affiliation_correlated(const BipartiteAffiliation& b, double q, RngSeed seed) {
  check_probability(q, "q");
  Rng rng(seed);
  std::vector<bool> alive(b.interests);
  for (std::size_t i = 0; i < b.interests; ++i) alive[i] = !rng.bernoulli(q);
  return affiliation_to_graph(b, alive);
}

SybilGraph inject_sybils(const Graph& g, double attach_prob, RngSeed seed) {
  check_probability(attach_prob, "attach_prob");
  Rng rng(seed);
  const auto n = g.num_nodes();
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  for (std::size_t v = 0; v < n; ++v) {
    const auto sybil = static_cast<NodeId>(n + v);
    for (NodeId u : g.neighbors_unchecked(static_cast<NodeId>(v))) {
      if (rng.bernoulli(attach_prob)) edges.push_back({u, sybil});
    }
  }
  SybilGraph out;
  out.graph = build_graph(2 * n, edges);
  out.annotation.victim.assign(2 * n, kNoNode);
  for (std::size_t v = 0; v < n; ++v) out.annotation.victim[n + v] = static_cast<NodeId>(v);
  return out;
}

void permute_copy2(CopyPair& cp, RngSeed seed) {
  Rng rng(seed);
  const auto n = cp.g2.num_nodes();
  std::vector<NodeId> label(n);
  std::iota(label.begin(), label.end(), NodeId{0});
  for (std::size_t i = n; i > 1; --i) std::swap(label[i - 1], label[rng.bounded(i)]);
  std::vector<Edge> edges;
  edges.reserve(cp.g2.num_edges());
  for (const auto& [u, v] : cp.g2.edges()) edges.push_back({label[u], label[v]});
  cp.g2 = build_graph(n, edges);
  for (auto& pair : cp.truth) pair.right = label[pair.right];
}

LinkSet sample_seeds(const CopyPair& cp, double l, RngSeed seed) {
  check_probability(l, "l");
  Rng rng(seed);
  LinkSet seeds;
  for (const auto& pair : eligible_pairs(cp.g1, cp.g2, cp.truth)) {
    if (rng.bernoulli(l)) seeds.insert(pair.left, pair.right);
  }
  return seeds;
}

std::vector<LinkSet::Pair> eligible_pairs(const Graph& g1, const Graph& g2, std::span<const LinkSet::Pair> truth,
                                          std::uint32_t min_degree) {
  std::vector<LinkSet::Pair> out;
  for (const auto& pair : truth) {
    if (g1.contains(pair.left) && g2.contains(pair.right) && g1.degree(pair.left) >= min_degree &&
        g2.degree(pair.right) >= min_degree) {
      out.push_back(pair);
    }
  }
  return out;
}

}  // namespace umatch

namespace umatch {

void write_sybils(const std::filesystem::path& path, const SybilAnnotation& copy1, const SybilAnnotation& copy2) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  for (auto id : copy1.ids()) out << 1 << ' ' << id << ' ' << copy1.victim[id] << '\n';
  for (auto id : copy2.ids()) out << 2 << ' ' << id << ' ' << copy2.victim[id] << '\n';
}

SybilAnnotation annotation_from(std::span<const std::pair<NodeId, NodeId>> sybils, std::size_t num_nodes) {
  SybilAnnotation a;
  a.victim.assign(num_nodes, kNoNode);
  for (const auto& [id, victim] : sybils) {
    if (id >= num_nodes) throw UsageError("sybil id " + std::to_string(id) + " out of range");
    a.victim[id] = victim;
  }
  return a;
}

}  // namespace umatch
