#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "umatch/graph.hpp"
#include "umatch/perturb.hpp"

namespace umatch {

/// Classification of a matcher output against ground truth. Ratios with a
/// zero denominator are left empty and printed as `undefined`.
struct Metrics {
  /// Non-seed output links equal to a truth pair.
  std::uint64_t good = 0;
  /// Non-seed output links that are not truth pairs, including links that
  /// pair a sybil with an ordinary node or with a sybil of another victim.
  std::uint64_t bad = 0;
  /// Links pairing the copy-1 and copy-2 sybils of the same victim. These
  /// are neither good nor bad and are left out of precision.
  std::uint64_t sybil_twins = 0;
  /// Seed links repeated in the output.
  std::uint64_t seeds_echoed = 0;
  std::uint64_t output = 0;
  std::uint64_t seeds = 0;
  /// Truth pairs with degree >= 1 in both copies.
  std::uint64_t eligible = 0;
  /// Truth pairs with degree > 5 in both copies, and how many of them the
  /// output links correctly.
  std::uint64_t eligible_deg_gt5 = 0;
  std::uint64_t identified_deg_gt5 = 0;

  std::optional<double> precision;
  std::optional<double> recall_all;
  std::optional<double> recall_new;
  std::optional<double> recall_deg_gt5;

  void write_key_values(std::ostream& out) const;
  friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct SybilMarks {
  const SybilAnnotation* copy1 = nullptr;
  const SybilAnnotation* copy2 = nullptr;
};

/// Throws UsageError if an output link references a node outside g1/g2 or
/// if truth is not injective.
Metrics evaluate(const LinkSet& output, std::span<const LinkSet::Pair> truth, const LinkSet& seeds,
                 const Graph& g1, const Graph& g2, SybilMarks sybils = {});

struct DegreeBucket {
  std::uint32_t min_degree = 0;  // 2^j
  std::uint64_t eligible = 0;
  /// Eligible truth pairs whose copy-1 node is linked to anything.
  std::uint64_t identified = 0;
  std::uint64_t good = 0;
  std::uint64_t bad = 0;
  friend bool operator==(const DegreeBucket&, const DegreeBucket&) = default;
};

/// Buckets are [2^j, 2^(j+1)) on the smaller of the two degrees. Eligible
/// pairs and good links are bucketed through their truth pair; bad links
/// through their own endpoints. Seed links are excluded from good and bad,
/// as are sybil twins, so the bucket sums of eligible, good and bad equal
/// those of `evaluate`.
struct DegreeBreakdown {
  std::vector<DegreeBucket> buckets;

  void write_csv(std::ostream& out) const;
};

DegreeBreakdown degree_breakdown(const LinkSet& output, std::span<const LinkSet::Pair> truth, const Graph& g1,
                                 const Graph& g2, const LinkSet& seeds = {}, SybilMarks sybils = {});

/// "undefined" for an empty ratio.
std::string format_ratio(const std::optional<double>& value);

}  // namespace umatch
