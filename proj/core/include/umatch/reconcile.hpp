#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "umatch/graph.hpp"

namespace umatch {

/// How candidate scores are produced inside user_matching.
enum class ScoringRoute {
  /// Row-wise accumulation with per-row and per-column maxima; O(n) memory.
  kFused,
  /// Materialize the ScoreTable with count_witnesses, then select_matches.
  kTable,
};

struct MatchConfig {
  /// Minimum matching score.
  std::uint32_t threshold = 3;
  /// Outer iterations.
  std::uint32_t iterations = 1;
  /// Degree cap for bucketing; 0 resolves to max(max_degree(g1), max_degree(g2)).
  std::uint32_t degree_cap = 0;
  /// Require score > threshold instead of score >= threshold.
  bool strict_threshold = false;
  /// false keeps the same number of passes per iteration but drops the
  /// degree filter (every pass uses minimum degree 1).
  bool bucketing = true;
  unsigned workers = 1;
  /// Linked nodes keep their rows and columns in the maxima, so an unlinked
  /// candidate that scores higher against a linked node is blocked.
  bool compete_with_linked = false;
  ScoringRoute route = ScoringRoute::kFused;
};

/// Throws ParameterError unless threshold >= 1 and iterations >= 1.
void validate(const MatchConfig& cfg);

/// Sparse witness counts. Entries are sorted by (left, right) and every
/// stored count is >= 1.
class ScoreTable {
 public:
  struct Entry {
    NodeId left;
    NodeId right;
    std::uint32_t count;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  ScoreTable() = default;
  /// Entries must already be sorted, unique and non-zero.
  explicit ScoreTable(std::vector<Entry> entries);

  std::uint32_t score(NodeId left, NodeId right) const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }

  ScoreTable transposed() const;
  /// Keeps entries whose endpoints satisfy both degree bounds.
  ScoreTable filtered(const Graph& g1, const Graph& g2, std::uint32_t min_degree) const;

  friend bool operator==(const ScoreTable&, const ScoreTable&) = default;

 private:
  std::vector<Entry> entries_;
};

/// Counts similarity witnesses: for every (u, v) with deg1(u) >= min_degree
/// and deg2(v) >= min_degree, the number of links (a, b) with a adjacent to u
/// in g1 and b adjacent to v in g2. Parallel edges count once. Work is
/// proportional to the sum over links of deg1(a) * deg2(b); workers produce
/// sorted partial tables that are merged by summation.
ScoreTable count_witnesses(const Graph& g1, const Graph& g2, const LinkSet& links, std::uint32_t min_degree,
                           unsigned workers = 1);

/// Witness counts straight from the definition, over all node pairs and all
/// links. Meant as a test oracle for small graphs.
ScoreTable brute_force_scores(const Graph& g1, const Graph& g2, const LinkSet& links);

/// Mutual-best selection among pairs whose endpoints are both unmatched in
/// `already`: (u, v) is chosen when its score clears the threshold and is
/// strictly larger than every other entry in u's row and in v's column.
/// Ties select nothing. Output is sorted by left id. With
/// `compete_with_linked`, entries touching linked nodes still count toward
/// the row and column maxima but are never selected.
std::vector<LinkSet::Pair> select_matches(const ScoreTable& scores, std::uint32_t threshold, const LinkSet& already,
                                          bool strict_threshold = false, bool compete_with_linked = false);

struct PassStats {
  std::uint32_t iteration = 0;
  /// Bucket exponent j; 0 for unbucketed passes.
  std::uint32_t bucket = 0;
  std::uint32_t min_degree = 0;
  std::uint64_t candidates = 0;
  std::uint64_t additions = 0;
  std::uint64_t links_after = 0;
  double seconds = 0.0;
};

struct MatchReport {
  std::uint32_t threshold = 0;
  bool strict_threshold = false;
  std::uint32_t iterations = 0;
  std::uint32_t degree_cap = 0;
  bool bucketing = true;
  std::uint64_t seeds = 0;
  std::uint64_t output = 0;
  std::vector<PassStats> passes;
  double seconds = 0.0;

  std::uint64_t peak_candidates() const;
  /// One key=value per line.
  void write_key_values(std::ostream& out) const;
  std::string to_json() const;
};

/// Seed-expansion matcher. Starting from the seeds, runs `iterations` rounds;
/// each round walks degree buckets 2^j for j = floor(log2 D) down to 1,
/// scoring candidates against the links known at the start of the pass and
/// adding mutual-best pairs. Links are never removed and matched nodes take
/// no further part in scoring.
LinkSet user_matching(const Graph& g1, const Graph& g2, const LinkSet& seeds, const MatchConfig& cfg,
                      MatchReport* report = nullptr);

/// Passes per iteration of user_matching: floor(log2 D) for degree cap D.
std::uint32_t passes_per_iteration(std::uint32_t degree_cap);

/// The same expansion without degree buckets: each iteration runs as many
/// passes as user_matching would, all over nodes of degree >= 1 (at least
/// one pass per iteration).
LinkSet baseline_match(const Graph& g1, const Graph& g2, const LinkSet& seeds, std::uint32_t threshold,
                       std::uint32_t iterations, unsigned workers = 1, MatchReport* report = nullptr);

}  // namespace umatch
