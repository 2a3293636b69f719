#include "umatch/eval.hpp"

#include <algorithm>
#include <bit>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "umatch/errors.hpp"

namespace umatch {
namespace {

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

LinkSet truth_index(std::span<const LinkSet::Pair> truth) { return LinkSet::from_pairs(truth); }

void check_output(const LinkSet& output, const Graph& g1, const Graph& g2) {
  for (const auto& [l, r] : output.pairs()) {
    if (!g1.contains(l) || !g2.contains(r)) {
      throw UsageError("output link (" + std::to_string(l) + ", " + std::to_string(r) + ") is out of range");
    }
  }
}

std::size_t bucket_of(std::uint32_t degree) {
  return degree <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(degree) - 1);
}

NodeId victim1_of(NodeId l, SybilMarks sybils) { return sybils.copy1 ? sybils.copy1->victim_of(l) : kNoNode; }
NodeId victim2_of(NodeId r, SybilMarks sybils) { return sybils.copy2 ? sybils.copy2->victim_of(r) : kNoNode; }

bool touches_sybil(NodeId l, NodeId r, SybilMarks sybils) {
  return victim1_of(l, sybils) != kNoNode || victim2_of(r, sybils) != kNoNode;
}

// Both endpoints imitate the two copies of one truth pair.
bool is_twin(NodeId l, NodeId r, const LinkSet& truth_links, SybilMarks sybils) {
  const NodeId v1 = victim1_of(l, sybils);
  const NodeId v2 = victim2_of(r, sybils);
  return v1 != kNoNode && v2 != kNoNode && truth_links.contains(v1, v2);
}

}  // namespace

std::string format_ratio(const std::optional<double>& value) {
  if (!value) return "undefined";
  std::ostringstream s;
  s << std::setprecision(6) << *value;
  return s.str();
}

void Metrics::write_key_values(std::ostream& out) const {
  out << "good=" << good << '\n'
      << "bad=" << bad << '\n'
      << "seeds_echoed=" << seeds_echoed << '\n'
      << "sybil_twins=" << sybil_twins << '\n'
      << "output=" << output << '\n'
      << "seeds=" << seeds << '\n'
      << "eligible=" << eligible << '\n'
      << "eligible_rule=degree>=1 in both copies\n"
      << "precision=" << format_ratio(precision) << '\n'
      << "recall_all=" << format_ratio(recall_all) << '\n'
      << "recall_new=" << format_ratio(recall_new) << '\n'
      << "eligible_deg_gt5=" << eligible_deg_gt5 << '\n'
      << "identified_deg_gt5=" << identified_deg_gt5 << '\n'
      << "recall_deg_gt5=" << format_ratio(recall_deg_gt5) << '\n';
}

Metrics evaluate(const LinkSet& output, std::span<const LinkSet::Pair> truth, const LinkSet& seeds,
                 const Graph& g1, const Graph& g2, SybilMarks sybils) {
  check_output(output, g1, g2);
  const LinkSet truth_links = truth_index(truth);
  Metrics m;
  m.output = output.size();
  m.seeds = seeds.size();
  for (const auto& [l, r] : output.pairs()) {
    if (seeds.contains(l, r)) {
      ++m.seeds_echoed;
      continue;
    }
    if (is_twin(l, r, truth_links, sybils)) {
      ++m.sybil_twins;
      continue;
    }
    if (!touches_sybil(l, r, sybils) && truth_links.contains(l, r)) {
      ++m.good;
    } else {
      ++m.bad;
    }
  }
  for (const auto& pair : eligible_pairs(g1, g2, truth)) {
    ++m.eligible;
    if (g1.degree(pair.left) > 5 && g2.degree(pair.right) > 5) {
      ++m.eligible_deg_gt5;
      if (output.contains(pair.left, pair.right)) ++m.identified_deg_gt5;
    }
  }
  m.precision = ratio(m.good, m.good + m.bad);
  m.recall_all = ratio(m.good + m.seeds_echoed, m.eligible);
  m.recall_new = ratio(m.good, m.eligible >= m.seeds ? m.eligible - m.seeds : 0);
  m.recall_deg_gt5 = ratio(m.identified_deg_gt5, m.eligible_deg_gt5);
  return m;
}

DegreeBreakdown degree_breakdown(const LinkSet& output, std::span<const LinkSet::Pair> truth, const Graph& g1,
                                 const Graph& g2, const LinkSet& seeds, SybilMarks sybils) {
  check_output(output, g1, g2);
  const LinkSet truth_links = truth_index(truth);
  std::vector<DegreeBucket> buckets;
  auto at = [&](std::uint32_t degree) -> DegreeBucket& {
    const auto j = bucket_of(degree);
    while (buckets.size() <= j) buckets.push_back({std::uint32_t{1} << buckets.size(), 0, 0, 0, 0});
    return buckets[j];
  };
  for (const auto& pair : eligible_pairs(g1, g2, truth)) {
    auto& bucket = at(std::min(g1.degree(pair.left), g2.degree(pair.right)));
    ++bucket.eligible;
    if (output.left_linked(pair.left)) ++bucket.identified;
  }
  for (const auto& [l, r] : output.pairs()) {
    if (seeds.contains(l, r) || is_twin(l, r, truth_links, sybils)) continue;
    if (truth_links.contains(l, r) && !touches_sybil(l, r, sybils)) {
      ++at(std::min(g1.degree(l), g2.degree(r))).good;
    } else {
      ++at(std::min(g1.degree(l), g2.degree(r))).bad;
    }
  }
  return {std::move(buckets)};
}

void DegreeBreakdown::write_csv(std::ostream& out) const {
  out << "bucket_min_degree,eligible,identified,good,bad\n";
  for (const auto& b : buckets) {
    out << b.min_degree << ',' << b.eligible << ',' << b.identified << ',' << b.good << ',' << b.bad << '\n';
  }
}

}  // namespace umatch
