#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "support.hpp"
#include "umatch/errors.hpp"
#include "umatch/generators.hpp"
#include "umatch/graph_io.hpp"
#include "umatch/perturb.hpp"

using namespace umatch;

namespace {

using EdgeCount = std::map<std::pair<NodeId, NodeId>, std::size_t>;

EdgeCount edge_multiset(const Graph& g) {
  EdgeCount out;
  for (const auto& e : g.edges()) ++out[{e.u, e.v}];
  return out;
}

// Copy edges mapped back through truth must be a sub-multiset of g.
bool is_submultiset(const Graph& copy, const Graph& g, const std::vector<NodeId>& to_original) {
  auto budget = edge_multiset(g);
  for (const auto& e : copy.edges()) {
    NodeId a = to_original[e.u];
    NodeId b = to_original[e.v];
    if (a > b) std::swap(a, b);
    auto it = budget.find({a, b});
    if (it == budget.end() || it->second == 0) return false;
    --it->second;
  }
  return true;
}

std::vector<NodeId> identity(std::size_t n) {
  std::vector<NodeId> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<NodeId>(i);
  return v;
}

Graph star(std::size_t leaves) {
  std::vector<Edge> edges;
  for (std::size_t i = 1; i <= leaves; ++i) edges.push_back({0, static_cast<NodeId>(i)});
  return build_graph(leaves + 1, edges);
}

Graph cycle(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>((i + 1) % n)});
  return build_graph(n, edges);
}

}  // namespace

TEST(CopyIndependent, FullSurvivalNoPermute) {
  const auto g = gen_pa(200, 3, RngSeed{1});
  const auto cp = copy_independent(g, 1.0, 1.0, false, RngSeed{2});
  EXPECT_EQ(edge_multiset(cp.g1), edge_multiset(g));
  EXPECT_EQ(edge_multiset(cp.g2), edge_multiset(g));
  ASSERT_EQ(cp.truth.size(), 200u);
  for (NodeId u = 0; u < 200; ++u) EXPECT_EQ(cp.truth[u], (LinkSet::Pair{u, u}));
}

TEST(CopyIndependent, ZeroSurvival) {
  const auto g = gen_pa(100, 3, RngSeed{1});
  const auto cp = copy_independent(g, 0.0, 1.0, true, RngSeed{2});
  EXPECT_EQ(cp.g1.num_edges(), 0u);
  EXPECT_EQ(cp.g1.num_nodes(), 100u);
  EXPECT_EQ(cp.g2.num_edges(), g.num_edges());
}

TEST(CopyIndependent, BinomialSurvival) {
  const auto g = gen_er(2000, 20000.0 / (2000.0 * 1999.0 / 2.0), RngSeed{3});
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto cp = copy_independent(g, 0.5, 0.3, true, RngSeed{seed});
    EXPECT_TRUE(test::within_4_sigma(cp.g1.num_edges(), g.num_edges(), 0.5));
    EXPECT_TRUE(test::within_4_sigma(cp.g2.num_edges(), g.num_edges(), 0.3));
  }
}

TEST(CopyIndependent, CopiesAreSubgraphsAndTruthIsBijection) {
  const auto g = gen_pa(500, 4, RngSeed{5});
  const auto cp = copy_independent(g, 0.6, 0.6, true, RngSeed{6});
  std::vector<NodeId> back2(cp.g2.num_nodes(), kNoNode);
  for (const auto& [l, r] : cp.truth) back2[r] = l;
  EXPECT_EQ(std::count(back2.begin(), back2.end(), kNoNode), 0);
  EXPECT_NO_THROW(LinkSet::from_pairs(cp.truth));
  EXPECT_TRUE(is_submultiset(cp.g1, g, identity(500)));
  EXPECT_TRUE(is_submultiset(cp.g2, g, back2));
}

TEST(CopyIndependent, PermutationActuallyShuffles) {
  const auto g = gen_pa(500, 4, RngSeed{5});
  const auto cp = copy_independent(g, 1.0, 1.0, true, RngSeed{6});
  std::size_t fixed = 0;
  for (const auto& [l, r] : cp.truth) fixed += l == r;
  EXPECT_LT(fixed, 10u);
}

TEST(CopyIndependent, Validation) {
  const auto g = gen_pa(10, 2, RngSeed{5});
  EXPECT_THROW(copy_independent(g, 1.1, 0.5, false, RngSeed{1}), ParameterError);
  EXPECT_THROW(copy_independent(g, 0.5, -0.5, false, RngSeed{1}), ParameterError);
}

TEST(CopyIndependent, Deterministic) {
  const auto g = gen_pa(300, 4, RngSeed{5});
  const auto a = copy_independent(g, 0.5, 0.5, true, RngSeed{8});
  const auto b = copy_independent(g, 0.5, 0.5, true, RngSeed{8});
  EXPECT_EQ(edge_multiset(a.g1), edge_multiset(b.g1));
  EXPECT_EQ(edge_multiset(a.g2), edge_multiset(b.g2));
  EXPECT_EQ(a.truth, b.truth);
}

TEST(CopyCascade, ZeroProbability) {
  const auto g = gen_pa(100, 3, RngSeed{1});
  const auto c = copy_cascade(g, 0.0, 7, RngSeed{1});
  EXPECT_EQ(c.activated, std::vector<NodeId>{7});
  EXPECT_EQ(c.copy.graph.num_nodes(), 1u);
  EXPECT_EQ(c.copy.graph.num_edges(), 0u);
}

TEST(CopyCascade, FullProbabilityReachesComponent) {
  // Two components: a path 0-1-2 and an edge 3-4.
  const auto g = build_graph(6, {{0, 1}, {1, 2}, {3, 4}});
  const auto c = copy_cascade(g, 1.0, 1, RngSeed{1});
  EXPECT_EQ(c.activated, (std::vector<NodeId>{0, 1, 2}));
  EXPECT_EQ(c.copy.graph.num_edges(), 2u);
}

TEST(CopyCascade, StarLeavesAreBinomial) {
  const auto g = star(1000);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto c = copy_cascade(g, 0.05, 0, RngSeed{seed});
    EXPECT_TRUE(test::within_4_sigma(c.activated.size() - 1.0, 1000, 0.05)) << c.activated.size();
  }
}

TEST(CopyCascade, InducedSubgraph) {
  const auto g = gen_pa(2000, 5, RngSeed{2});
  const auto c = copy_cascade(g, 0.2, 0, RngSeed{3});
  std::set<NodeId> active(c.activated.begin(), c.activated.end());
  std::size_t induced = 0;
  for (const auto& e : g.edges()) induced += active.count(e.u) && active.count(e.v);
  EXPECT_EQ(c.copy.graph.num_edges(), induced);
  EXPECT_TRUE(is_submultiset(c.copy.graph, g, c.copy.original));
}

TEST(CopyCascade, BadStart) {
  const auto g = gen_pa(10, 2, RngSeed{2});
  EXPECT_THROW(copy_cascade(g, 0.5, 10, RngSeed{1}), UsageError);
}

TEST(PairCascades, TruthIsIntersection) {
  const auto g = gen_pa(2000, 5, RngSeed{2});
  const auto a = copy_cascade(g, 0.3, 0, RngSeed{3});
  const auto b = copy_cascade(g, 0.3, 1, RngSeed{4});
  const auto cp = pair_cascades(a, b);
  std::vector<NodeId> common;
  std::set_intersection(a.activated.begin(), a.activated.end(), b.activated.begin(), b.activated.end(),
                        std::back_inserter(common));
  ASSERT_EQ(cp.truth.size(), common.size());
  for (const auto& [l, r] : cp.truth) EXPECT_EQ(a.copy.original[l], b.copy.original[r]);
}

TEST(CopyAffiliation, Extremes) {
  const auto b = gen_affiliation(300, 40, 3, RngSeed{1});
  const auto full = affiliation_to_graph(b);
  EXPECT_EQ(edge_multiset(copy_affiliation_correlated(b, 0.0, RngSeed{2})), edge_multiset(full));
  const auto none = copy_affiliation_correlated(b, 1.0, RngSeed{2});
  EXPECT_EQ(none.num_edges(), 0u);
  EXPECT_EQ(none.num_nodes(), 300u);
}

TEST(CopyAffiliation, TriangleSurvivesWithOneMinusQ) {
  BipartiteAffiliation b{3, 1, {{0, 0}, {1, 0}, {2, 0}}};
  int triangles = 0;
  const int runs = 10000;
  for (int s = 0; s < runs; ++s) {
    const auto g = copy_affiliation_correlated(b, 0.25, RngSeed{static_cast<std::uint64_t>(s)});
    ASSERT_TRUE(g.num_edges() == 0 || g.num_edges() == 3);
    triangles += g.num_edges() == 3;
  }
  EXPECT_TRUE(test::within_4_sigma(triangles, runs, 0.75)) << triangles;
}

TEST(InjectSybils, ZeroAttach) {
  const auto g = gen_pa(100, 3, RngSeed{1});
  const auto s = inject_sybils(g, 0.0, RngSeed{1});
  EXPECT_EQ(s.graph.num_nodes(), 200u);
  EXPECT_EQ(s.graph.num_edges(), g.num_edges());
  for (NodeId w = 100; w < 200; ++w) {
    EXPECT_EQ(s.graph.degree(w), 0u);
    EXPECT_EQ(s.annotation.victim_of(w), w - 100);
  }
  for (NodeId u = 0; u < 100; ++u) EXPECT_FALSE(s.annotation.contains(u));
  EXPECT_EQ(s.annotation.ids().size(), 100u);
}

TEST(InjectSybils, FullAttachCopiesNeighborhood) {
  const auto g = gen_er(200, 0.05, RngSeed{1});
  const auto s = inject_sybils(g, 1.0, RngSeed{1});
  for (NodeId v = 0; v < 200; ++v) {
    const auto orig = g.neighbors(v);
    const auto twin = s.graph.neighbors(200 + v);
    EXPECT_TRUE(std::equal(orig.begin(), orig.end(), twin.begin(), twin.end()));
  }
}

TEST(InjectSybils, CycleEdgeCountIsBinomial) {
  const auto g = cycle(1000);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto s = inject_sybils(g, 0.5, RngSeed{seed});
    EXPECT_TRUE(test::within_4_sigma(s.graph.num_edges() - 1000.0, 2000, 0.5));
  }
}

TEST(SybilFile, RoundTripsAnnotation) {
  const auto g = gen_pa(50, 2, RngSeed{1});
  const auto s1 = inject_sybils(g, 0.5, RngSeed{1});
  const auto s2 = inject_sybils(g, 0.5, RngSeed{2});
  const auto path = std::filesystem::temp_directory_path() / "umatch_sybils_rt.ids";
  write_sybils(path, s1.annotation, s2.annotation);
  const auto f = read_sybils(path);
  EXPECT_EQ(annotation_from(f.copy1, 100).victim, s1.annotation.victim);
  EXPECT_EQ(annotation_from(f.copy2, 100).victim, s2.annotation.victim);
  EXPECT_THROW(annotation_from(f.copy1, 50), UsageError);
}

TEST(SampleSeeds, Extremes) {
  auto cp = copy_independent(gen_pa(500, 2, RngSeed{1}), 0.5, 0.5, true, RngSeed{2});
  EXPECT_TRUE(sample_seeds(cp, 0.0, RngSeed{3}).empty());
  const auto all = sample_seeds(cp, 1.0, RngSeed{3});
  EXPECT_EQ(all.size(), eligible_pairs(cp.g1, cp.g2, cp.truth).size());
  EXPECT_LT(all.size(), 500u);  // some nodes lose every edge in one copy
}

TEST(SampleSeeds, SubsetOfTruthAndEligible) {
  auto cp = copy_independent(gen_pa(3000, 4, RngSeed{1}), 0.5, 0.5, true, RngSeed{2});
  const auto truth = LinkSet::from_pairs(cp.truth);
  const auto seeds = sample_seeds(cp, 0.3, RngSeed{4});
  EXPECT_TRUE(seeds.is_subset_of(truth));
  for (const auto& [l, r] : seeds.pairs()) {
    EXPECT_GE(cp.g1.degree(l), 1u);
    EXPECT_GE(cp.g2.degree(r), 1u);
  }
}

TEST(SampleSeeds, BinomialCount) {
  // 10,000 eligible pairs: a perfect matching in both copies.
  std::vector<Edge> edges;
  for (NodeId i = 0; i < 10000; i += 2) edges.push_back({i, i + 1});
  CopyPair cp;
  cp.g1 = build_graph(10000, edges);
  cp.g2 = build_graph(10000, edges);
  for (NodeId i = 0; i < 10000; ++i) cp.truth.push_back({i, i});
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    EXPECT_TRUE(test::within_4_sigma(sample_seeds(cp, 0.1, RngSeed{seed}).size(), 10000, 0.1));
  }
}

TEST(PermuteCopy2, PreservesStructure) {
  auto cp = copy_independent(gen_pa(400, 3, RngSeed{1}), 0.7, 0.7, false, RngSeed{2});
  const auto before = cp;
  permute_copy2(cp, RngSeed{9});
  EXPECT_EQ(edge_multiset(cp.g1), edge_multiset(before.g1));
  EXPECT_EQ(cp.g2.num_edges(), before.g2.num_edges());
  ASSERT_EQ(cp.truth.size(), before.truth.size());
  for (std::size_t i = 0; i < cp.truth.size(); ++i) {
    EXPECT_EQ(cp.truth[i].left, before.truth[i].left);
    EXPECT_EQ(cp.g2.degree(cp.truth[i].right), before.g2.degree(before.truth[i].right));
  }
}
