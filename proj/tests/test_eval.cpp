#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"
#include "umatch/errors.hpp"
#include "umatch/eval.hpp"
#include "umatch/generators.hpp"
#include "umatch/perturb.hpp"
#include "umatch/reconcile.hpp"

using namespace umatch;

namespace {

// Four nodes, every one of degree >= 1: edges 0-1, 2-3, 1-2.
Graph small() { return build_graph(4, {{0, 1}, {2, 3}, {1, 2}}); }

std::vector<LinkSet::Pair> identity_truth(NodeId n) {
  std::vector<LinkSet::Pair> t;
  for (NodeId u = 0; u < n; ++u) t.push_back({u, u});
  return t;
}

}  // namespace

TEST(Evaluate, OutputEqualsSeeds) {
  const auto seeds = LinkSet::from_pairs({{0, 0}, {1, 1}});
  const auto m = evaluate(seeds, identity_truth(4), seeds, small(), small());
  EXPECT_EQ(m.good, 0u);
  EXPECT_EQ(m.bad, 0u);
  EXPECT_EQ(m.seeds_echoed, 2u);
  EXPECT_FALSE(m.precision.has_value());
  EXPECT_DOUBLE_EQ(*m.recall_all, 0.5);
  EXPECT_DOUBLE_EQ(*m.recall_new, 0.0);
}

TEST(Evaluate, PerfectOutput) {
  const auto truth = identity_truth(4);
  const auto m = evaluate(LinkSet::from_pairs(truth), truth, {}, small(), small());
  EXPECT_DOUBLE_EQ(*m.precision, 1.0);
  EXPECT_DOUBLE_EQ(*m.recall_all, 1.0);
  EXPECT_EQ(m.good, 4u);
}

TEST(Evaluate, HandCount) {
  const std::vector<LinkSet::Pair> truth{{1, 1}, {2, 2}};
  const auto m = evaluate(LinkSet::from_pairs({{1, 1}, {2, 3}}), truth, {}, small(), small());
  EXPECT_EQ(m.good, 1u);
  EXPECT_EQ(m.bad, 1u);
  EXPECT_DOUBLE_EQ(*m.precision, 0.5);
}

TEST(Evaluate, UndefinedRatios) {
  const auto empty = build_graph(3, {});
  const auto m = evaluate({}, identity_truth(3), {}, empty, empty);
  EXPECT_EQ(m.eligible, 0u);
  EXPECT_FALSE(m.precision);
  EXPECT_FALSE(m.recall_all);
  EXPECT_FALSE(m.recall_new);
  std::ostringstream out;
  m.write_key_values(out);
  EXPECT_NE(out.str().find("precision=undefined\n"), std::string::npos);
  EXPECT_EQ(format_ratio(std::nullopt), "undefined");
}

TEST(Evaluate, OutOfRange) {
  EXPECT_THROW(evaluate(LinkSet::from_pairs({{9, 0}}), identity_truth(4), {}, small(), small()), UsageError);
}

TEST(Evaluate, OrderDoesNotMatter) {
  const std::vector<LinkSet::Pair> truth{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  const std::vector<LinkSet::Pair> reversed(truth.rbegin(), truth.rend());
  const auto a = LinkSet::from_pairs({{0, 0}, {1, 2}, {3, 3}});
  const auto b = LinkSet::from_pairs({{3, 3}, {1, 2}, {0, 0}});
  EXPECT_EQ(evaluate(a, truth, {}, small(), small()), evaluate(b, reversed, {}, small(), small()));
}

TEST(Evaluate, SybilLinks) {
  // Copy graphs: 4 ordinary nodes then sybils 4..7 imitating 0..3.
  const auto g = build_graph(8, {{0, 1}, {2, 3}, {1, 2}, {1, 4}, {2, 5}, {0, 6}, {1, 7}});
  SybilAnnotation s;
  s.victim = {kNoNode, kNoNode, kNoNode, kNoNode, 0, 1, 2, 3};
  const auto truth = identity_truth(4);
  // (4,4): twin of truth pair (0,0); (5,6): sybils of different victims;
  // (1,4): sybil vs ordinary; (2,2): good.
  const auto out = LinkSet::from_pairs({{4, 4}, {5, 6}, {1, 5}, {2, 2}});
  const auto m = evaluate(out, truth, {}, g, g, {&s, &s});
  EXPECT_EQ(m.sybil_twins, 1u);
  EXPECT_EQ(m.bad, 2u);
  EXPECT_EQ(m.good, 1u);
  EXPECT_EQ(m.good + m.bad + m.sybil_twins + m.seeds_echoed, m.output);
  EXPECT_DOUBLE_EQ(*m.precision, 1.0 / 3.0);
  const auto bd = degree_breakdown(out, truth, g, g, {}, {&s, &s});
  std::uint64_t good = 0;
  std::uint64_t bad = 0;
  for (const auto& b : bd.buckets) {
    good += b.good;
    bad += b.bad;
  }
  EXPECT_EQ(good, m.good);
  EXPECT_EQ(bad, m.bad);
}

TEST(Evaluate, DegreeAboveFiveCohort) {
  const auto g = gen_pa(500, 4, RngSeed{1});
  const auto truth = identity_truth(500);
  const auto m = evaluate(LinkSet::from_pairs(truth), truth, {}, g, g);
  std::uint64_t high = 0;
  for (NodeId u = 0; u < 500; ++u) high += g.degree(u) > 5;
  EXPECT_EQ(m.eligible_deg_gt5, high);
  EXPECT_EQ(m.identified_deg_gt5, high);
  EXPECT_DOUBLE_EQ(*m.recall_deg_gt5, 1.0);
}

TEST(DegreeBreakdown, StarExample) {
  const auto star = build_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  const auto bd = degree_breakdown(LinkSet::from_pairs({{0, 0}}), identity_truth(5), star, star);
  ASSERT_EQ(bd.buckets.size(), 3u);
  EXPECT_EQ(bd.buckets[0], (DegreeBucket{1, 4, 0, 0, 0}));
  EXPECT_EQ(bd.buckets[1], (DegreeBucket{2, 0, 0, 0, 0}));
  EXPECT_EQ(bd.buckets[2], (DegreeBucket{4, 1, 1, 1, 0}));
}

TEST(DegreeBreakdown, SingleBucketMatchesGlobal) {
  // A cycle: every node has degree 2.
  std::vector<Edge> edges;
  for (NodeId u = 0; u < 10; ++u) edges.push_back({u, static_cast<NodeId>((u + 1) % 10)});
  const auto g = build_graph(10, edges);
  const auto truth = identity_truth(10);
  const auto out = LinkSet::from_pairs({{0, 0}, {1, 1}, {2, 3}});
  const auto m = evaluate(out, truth, {}, g, g);
  const auto bd = degree_breakdown(out, truth, g, g);
  ASSERT_EQ(bd.buckets.size(), 2u);
  EXPECT_EQ(bd.buckets[1].eligible, m.eligible);
  EXPECT_EQ(bd.buckets[1].good, m.good);
  EXPECT_EQ(bd.buckets[1].bad, m.bad);
  EXPECT_EQ(bd.buckets[1].identified, 3u);
}

TEST(DegreeBreakdown, EmptyOutput) {
  const auto g = gen_pa(300, 3, RngSeed{2});
  for (const auto& b : degree_breakdown({}, identity_truth(300), g, g).buckets) EXPECT_EQ(b.identified, 0u);
}

TEST(DegreeBreakdown, BucketSumsEqualGlobals) {
  SplitMix64 s(17);
  const auto g = gen_pa(3000, 5, RngSeed{s.next()});
  const auto cp = copy_independent(g, 0.5, 0.5, true, RngSeed{s.next()});
  const auto seeds = sample_seeds(cp, 0.1, RngSeed{s.next()});
  MatchConfig cfg;
  cfg.threshold = 2;
  cfg.iterations = 2;
  const auto out = user_matching(cp.g1, cp.g2, seeds, cfg);
  const auto m = evaluate(out, cp.truth, seeds, cp.g1, cp.g2);
  EXPECT_EQ(m.good + m.bad + m.seeds_echoed, out.size());
  const auto bd = degree_breakdown(out, cp.truth, cp.g1, cp.g2, seeds);
  std::uint64_t eligible = 0, good = 0, bad = 0;
  for (const auto& b : bd.buckets) {
    eligible += b.eligible;
    good += b.good;
    bad += b.bad;
    EXPECT_LE(b.identified, b.eligible);
  }
  EXPECT_EQ(eligible, m.eligible);
  EXPECT_EQ(good, m.good);
  EXPECT_EQ(bad, m.bad);
  std::ostringstream csv;
  bd.write_csv(csv);
  EXPECT_EQ(csv.str().rfind("bucket_min_degree,eligible,identified,good,bad\n", 0), 0u);
}

TEST(Evaluate, RelabelingInvariance) {
  SplitMix64 s(23);
  const auto g = gen_pa(2000, 5, RngSeed{s.next()});
  const auto cp = copy_independent(g, 0.5, 0.5, false, RngSeed{s.next()});
  const auto seeds = sample_seeds(cp, 0.1, RngSeed{s.next()});
  MatchConfig cfg;
  cfg.threshold = 2;
  cfg.iterations = 2;
  const auto out = user_matching(cp.g1, cp.g2, seeds, cfg);
  const auto base = evaluate(out, cp.truth, seeds, cp.g1, cp.g2);

  // Same permutation applied to both copies.
  Rng rng(RngSeed{5});
  const auto perm = test::random_permutation(2000, rng);
  const auto g1 = test::relabel(cp.g1, perm);
  const auto g2 = test::relabel(cp.g2, perm);
  std::vector<LinkSet::Pair> truth;
  for (const auto& [l, r] : cp.truth) truth.push_back({perm[l], perm[r]});
  LinkSet moved_seeds;
  for (const auto& [l, r] : seeds.pairs()) moved_seeds.insert(perm[l], perm[r]);
  const auto moved_out = user_matching(g1, g2, moved_seeds, cfg);
  EXPECT_EQ(evaluate(moved_out, truth, moved_seeds, g1, g2), base);
}

TEST(Evaluate, PermutedCopyGivesSameMetrics) {
  // Running on shuffled copy-2 ids gives the same metrics as unshuffled.
  SplitMix64 s(29);
  const auto g = gen_pa(2000, 5, RngSeed{s.next()});
  auto cp = copy_independent(g, 0.5, 0.5, false, RngSeed{s.next()});
  const auto seeds = sample_seeds(cp, 0.1, RngSeed{s.next()});
  MatchConfig cfg;
  cfg.threshold = 2;
  cfg.iterations = 2;
  const auto plain = evaluate(user_matching(cp.g1, cp.g2, seeds, cfg), cp.truth, seeds, cp.g1, cp.g2);

  const auto before = cp.truth;
  permute_copy2(cp, RngSeed{31});
  LinkSet moved;
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (seeds.contains(before[i].left, before[i].right)) moved.insert(cp.truth[i].left, cp.truth[i].right);
  }
  const auto shuffled = evaluate(user_matching(cp.g1, cp.g2, moved, cfg), cp.truth, moved, cp.g1, cp.g2);
  EXPECT_EQ(shuffled, plain);
}
