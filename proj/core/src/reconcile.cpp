#include "umatch/reconcile.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "umatch/errors.hpp"
#include "umatch/parallel.hpp"

namespace umatch {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Running maximum with multiplicity. `arg` is meaningful only when count == 1.
struct Best {
  std::uint32_t score = 0;
  std::uint32_t count = 0;
  NodeId arg = kNoNode;

  void offer(std::uint32_t s, NodeId who) { merge({s, 1, who}); }

  void merge(const Best& other) {
    if (other.score > score) {
      *this = other;
    } else if (other.score == score && other.score > 0) {
      count += other.count;
    }
  }

  bool unique() const { return count == 1; }
};

bool clears(std::uint32_t score, std::uint32_t threshold, bool strict) {
  return strict ? score > threshold : score >= threshold;
}

void check_links_in_range(const Graph& g1, const Graph& g2, const LinkSet& links) {
  for (const auto& [a, b] : links.pairs()) {
    if (!g1.contains(a) || !g2.contains(b)) {
      throw UsageError("link (" + std::to_string(a) + ", " + std::to_string(b) + ") references a node outside the graphs");
    }
  }
}

bool adjacent(const Graph& g, NodeId u, NodeId v) {
  const auto nbrs = g.neighbors_unchecked(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::uint64_t pack(NodeId left, NodeId right) { return (std::uint64_t{left} << 32) | right; }

struct PassOutcome {
  std::vector<LinkSet::Pair> additions;
  std::uint64_t candidates = 0;
};

// Scratch space for the fused route, reused across passes.
class FusedWorkspace {
 public:
  FusedWorkspace(const Graph& g1, const Graph& g2, unsigned workers)
      : row_best_(g1.num_nodes()), eligible_right_(g2.num_nodes()), workers_(workers) {
    const auto n2 = g2.num_nodes();
    // Deduplicated neighbors of g2, highest degree first, so a pass can stop at its degree floor.
    offsets_.assign(n2 + 1, 0);
    for (std::size_t b = 0; b < n2; ++b) {
      NodeId previous = kNoNode;
      for (NodeId v : g2.neighbors_unchecked(static_cast<NodeId>(b))) {
        if (v != previous) sorted_.push_back(v);
        previous = v;
      }
      const auto first = sorted_.begin() + static_cast<std::ptrdiff_t>(offsets_[b]);
      std::sort(first, sorted_.end(), [&](NodeId x, NodeId y) {
        const auto dx = g2.degree(x), dy = g2.degree(y);
        return dx != dy ? dx > dy : x < y;
      });
      offsets_[b + 1] = sorted_.size();
    }
    for (unsigned w = 0; w < workers; ++w) {
      accumulators_.emplace_back(n2, 0);
      touched_.emplace_back();
      column_best_.emplace_back(n2);
    }
    candidates_.assign(workers, 0);
  }

  PassOutcome run(const Graph& g1, const Graph& g2, const LinkSet& links, std::uint32_t min_degree,
                  std::uint32_t threshold, bool strict, bool compete) {
    const auto n1 = g1.num_nodes();
    const auto n2 = g2.num_nodes();
    for (std::size_t v = 0; v < n2; ++v) {
      eligible_right_[v] = (compete || !links.right_linked(static_cast<NodeId>(v))) &&
                           g2.degree(static_cast<NodeId>(v)) >= min_degree;
    }
    rows_.clear();
    for (std::size_t u = 0; u < n1; ++u) {
      if ((compete || !links.left_linked(static_cast<NodeId>(u))) && g1.degree(static_cast<NodeId>(u)) >= min_degree) {
        rows_.push_back(static_cast<NodeId>(u));
      }
    }
    for (auto& column : column_best_) std::fill(column.begin(), column.end(), Best{});
    std::fill(candidates_.begin(), candidates_.end(), 0);

    parallel_for(rows_.size(), workers_, 64, [&](unsigned worker, std::size_t begin, std::size_t end) {
      auto& acc = accumulators_[worker];
      auto& touched = touched_[worker];
      auto& columns = column_best_[worker];
      for (std::size_t idx = begin; idx < end; ++idx) {
        const NodeId u = rows_[idx];
        NodeId previous_a = kNoNode;
        for (NodeId a : g1.neighbors_unchecked(u)) {
          if (a == previous_a) continue;
          previous_a = a;
          const NodeId b = links.right_of(a);
          if (b == kNoNode) continue;
          for (std::size_t k = offsets_[b]; k < offsets_[b + 1]; ++k) {
            const NodeId v = sorted_[k];
            if (g2.degree(v) < min_degree) break;
            if (!eligible_right_[v]) continue;
            if (acc[v]++ == 0) touched.push_back(v);
          }
        }
        Best row;
        for (NodeId v : touched) {
          row.offer(acc[v], v);
          columns[v].offer(acc[v], u);
          acc[v] = 0;
        }
        candidates_[worker] += touched.size();
        touched.clear();
        row_best_[u] = row;
      }
    });

    auto& columns = column_best_[0];
    for (unsigned w = 1; w < workers_; ++w) {
      for (std::size_t v = 0; v < n2; ++v) columns[v].merge(column_best_[w][v]);
    }
    PassOutcome outcome;
    for (auto c : candidates_) outcome.candidates += c;
    for (NodeId u : rows_) {
      const Best& row = row_best_[u];
      if (links.left_linked(u) || (row.arg != kNoNode && links.right_linked(row.arg))) continue;
      if (!row.unique() || !clears(row.score, threshold, strict)) continue;
      const Best& column = columns[row.arg];
      if (column.unique() && column.score == row.score) outcome.additions.push_back({u, row.arg});
    }

    return outcome;
  }

 private:
  std::vector<Best> row_best_;
  std::vector<char> eligible_right_;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> sorted_;
  std::vector<NodeId> rows_;
  unsigned workers_;
  std::vector<std::vector<std::uint32_t>> accumulators_;
  std::vector<std::vector<NodeId>> touched_;
  std::vector<std::vector<Best>> column_best_;
  std::vector<std::uint64_t> candidates_;
};

}  // namespace

void validate(const MatchConfig& cfg) {
  if (cfg.threshold < 1) throw ParameterError("threshold must be >= 1");
  if (cfg.iterations < 1) throw ParameterError("iterations must be >= 1");
}

ScoreTable::ScoreTable(std::vector<Entry> entries) : entries_(std::move(entries)) {}

std::uint32_t ScoreTable::score(NodeId left, NodeId right) const {
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), pack(left, right),
                                   [](const Entry& e, std::uint64_t key) { return pack(e.left, e.right) < key; });
  return it != entries_.end() && it->left == left && it->right == right ? it->count : 0;
}

ScoreTable ScoreTable::transposed() const {
  std::vector<Entry> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back({e.right, e.left, e.count});
  std::sort(out.begin(), out.end(),
            [](const Entry& x, const Entry& y) { return pack(x.left, x.right) < pack(y.left, y.right); });
  return ScoreTable(std::move(out));
}

ScoreTable ScoreTable::filtered(const Graph& g1, const Graph& g2, std::uint32_t min_degree) const {
  std::vector<Entry> out;
  for (const auto& e : entries_) {
    if (g1.degree(e.left) >= min_degree && g2.degree(e.right) >= min_degree) out.push_back(e);
  }
  return ScoreTable(std::move(out));
}

ScoreTable count_witnesses(const Graph& g1, const Graph& g2, const LinkSet& links, std::uint32_t min_degree,
                           unsigned workers) {
  if (min_degree < 1) throw ParameterError("min_degree must be >= 1");
  check_links_in_range(g1, g2, links);
  workers = resolve_workers(workers);
  const auto pairs = links.pairs();
  std::vector<std::vector<std::uint64_t>> partial_keys(workers);
  parallel_for(pairs.size(), workers, 16, [&](unsigned worker, std::size_t begin, std::size_t end) {
    auto& keys = partial_keys[worker];
    for (std::size_t i = begin; i < end; ++i) {
      const auto [a, b] = pairs[i];
      NodeId previous_u = kNoNode;
      for (NodeId u : g1.neighbors_unchecked(a)) {
        if (u == previous_u) continue;
        previous_u = u;
        if (g1.degree(u) < min_degree) continue;
        NodeId previous_v = kNoNode;
        for (NodeId v : g2.neighbors_unchecked(b)) {
          if (v == previous_v) continue;
          previous_v = v;
          if (g2.degree(v) < min_degree) continue;
          keys.push_back(pack(u, v));
        }
      }
    }
  });

  // Each worker reduces its own keys; the final merge is a sort over
  // (key, count) runs, so the result does not depend on chunk assignment.
  std::vector<std::pair<std::uint64_t, std::uint32_t>> runs;
  for (auto& keys : partial_keys) {
    std::sort(keys.begin(), keys.end());
    for (std::size_t i = 0; i < keys.size();) {
      std::size_t j = i;
      while (j < keys.size() && keys[j] == keys[i]) ++j;
      runs.emplace_back(keys[i], static_cast<std::uint32_t>(j - i));
      i = j;
    }
    std::vector<std::uint64_t>().swap(keys);
  }
  std::sort(runs.begin(), runs.end());
  std::vector<ScoreTable::Entry> entries;
  for (std::size_t i = 0; i < runs.size();) {
    std::uint32_t total = 0;
    std::size_t j = i;
    while (j < runs.size() && runs[j].first == runs[i].first) total += runs[j++].second;
    entries.push_back({static_cast<NodeId>(runs[i].first >> 32), static_cast<NodeId>(runs[i].first), total});
    i = j;
  }
  return ScoreTable(std::move(entries));
}

ScoreTable brute_force_scores(const Graph& g1, const Graph& g2, const LinkSet& links) {
  check_links_in_range(g1, g2, links);
  std::vector<ScoreTable::Entry> entries;
  for (std::size_t u = 0; u < g1.num_nodes(); ++u) {
    for (std::size_t v = 0; v < g2.num_nodes(); ++v) {
      std::uint32_t count = 0;
      for (const auto& [a, b] : links.pairs()) {
        if (adjacent(g1, static_cast<NodeId>(u), a) && adjacent(g2, static_cast<NodeId>(v), b)) ++count;
      }
      if (count > 0) entries.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), count});
    }
  }
  return ScoreTable(std::move(entries));
}

std::vector<LinkSet::Pair> select_matches(const ScoreTable& scores, std::uint32_t threshold, const LinkSet& already,
                                          bool strict_threshold, bool compete_with_linked) {
  if (threshold < 1) throw ParameterError("threshold must be >= 1");
  std::size_t rows = 0;
  std::size_t cols = 0;
  for (const auto& e : scores.entries()) {
    rows = std::max<std::size_t>(rows, e.left + std::size_t{1});
    cols = std::max<std::size_t>(cols, e.right + std::size_t{1});
  }
  auto open = [&](const ScoreTable::Entry& e) { return !already.left_linked(e.left) && !already.right_linked(e.right); };
  std::vector<Best> row_best(rows);
  std::vector<Best> col_best(cols);
  for (const auto& e : scores.entries()) {
    if (!compete_with_linked && !open(e)) continue;
    row_best[e.left].offer(e.count, e.right);
    col_best[e.right].offer(e.count, e.left);
  }
  std::vector<LinkSet::Pair> out;
  for (const auto& e : scores.entries()) {
    if (!open(e) || !clears(e.count, threshold, strict_threshold)) continue;
    const Best& row = row_best[e.left];
    const Best& col = col_best[e.right];
    if (row.unique() && row.arg == e.right && col.unique() && col.arg == e.left) out.push_back({e.left, e.right});
  }
  return out;
}

std::uint64_t MatchReport::peak_candidates() const {
  std::uint64_t peak = 0;
  for (const auto& pass : passes) peak = std::max(peak, pass.candidates);
  return peak;
}

void MatchReport::write_key_values(std::ostream& out) const {
  out << "threshold=" << threshold << '\n'
      << "comparison=" << (strict_threshold ? ">" : ">=") << '\n'
      << "iterations=" << iterations << '\n'
      << "degree_cap=" << degree_cap << '\n'
      << "bucketing=" << (bucketing ? "true" : "false") << '\n'
      << "seeds=" << seeds << '\n'
      << "output=" << output << '\n'
      << "peak_candidates=" << peak_candidates() << '\n'
      << "seconds=" << seconds << '\n'
      << "passes=" << passes.size() << '\n';
  for (std::size_t i = 0; i < passes.size(); ++i) {
    const auto& p = passes[i];
    const std::string prefix = "pass." + std::to_string(i) + ".";
    out << prefix << "iteration=" << p.iteration << '\n'
        << prefix << "bucket=" << p.bucket << '\n'
        << prefix << "min_degree=" << p.min_degree << '\n'
        << prefix << "candidates=" << p.candidates << '\n'
        << prefix << "additions=" << p.additions << '\n'
        << prefix << "links_after=" << p.links_after << '\n'
        << prefix << "seconds=" << p.seconds << '\n';
  }
}

std::string MatchReport::to_json() const {
  nlohmann::json j;
  j["threshold"] = threshold;
  j["comparison"] = strict_threshold ? ">" : ">=";
  j["iterations"] = iterations;
  j["degree_cap"] = degree_cap;
  j["bucketing"] = bucketing;
  j["seeds"] = seeds;
  j["output"] = output;
  j["peak_candidates"] = peak_candidates();
  j["seconds"] = seconds;
  j["passes"] = nlohmann::json::array();
  for (const auto& p : passes) {
    j["passes"].push_back({{"iteration", p.iteration},
                           {"bucket", p.bucket},
                           {"min_degree", p.min_degree},
                           {"candidates", p.candidates},
                           {"additions", p.additions},
                           {"links_after", p.links_after},
                           {"seconds", p.seconds}});
  }
  return j.dump(2);
}

std::uint32_t passes_per_iteration(std::uint32_t degree_cap) {
  return degree_cap >= 2 ? static_cast<std::uint32_t>(std::bit_width(degree_cap) - 1) : 0u;
}

LinkSet user_matching(const Graph& g1, const Graph& g2, const LinkSet& seeds, const MatchConfig& cfg,
                      MatchReport* report) {
  validate(cfg);
  check_links_in_range(g1, g2, seeds);
  const auto start = Clock::now();
  const unsigned workers = resolve_workers(cfg.workers);
  const std::uint32_t cap = cfg.degree_cap != 0 ? cfg.degree_cap : std::max(g1.max_degree(), g2.max_degree());

  // (bucket exponent, minimum degree) for each pass of one iteration.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> schedule;
  const std::uint32_t top = passes_per_iteration(cap);
  if (cfg.bucketing) {
    for (std::uint32_t j = top; j >= 1; --j) schedule.emplace_back(j, std::uint32_t{1} << j);
  } else {
    schedule.assign(std::max(top, 1u), {0, 1});
  }

  MatchReport local;
  local.threshold = cfg.threshold;
  local.strict_threshold = cfg.strict_threshold;
  local.iterations = cfg.iterations;
  local.degree_cap = cap;
  local.bucketing = cfg.bucketing;
  local.seeds = seeds.size();

  LinkSet links = seeds;
  std::optional<FusedWorkspace> workspace;
  if (cfg.route == ScoringRoute::kFused) workspace.emplace(g1, g2, workers);

  for (std::uint32_t i = 1; i <= cfg.iterations; ++i) {
    for (const auto& [bucket, min_degree] : schedule) {
      const auto pass_start = Clock::now();
      PassOutcome outcome;
      if (workspace) {
        outcome = workspace->run(g1, g2, links, min_degree, cfg.threshold, cfg.strict_threshold, cfg.compete_with_linked);
      } else {
        const auto table = count_witnesses(g1, g2, links, min_degree, workers);
        outcome.candidates = table.size();
        outcome.additions =
            select_matches(table, cfg.threshold, links, cfg.strict_threshold, cfg.compete_with_linked);
      }
      for (const auto& [left, right] : outcome.additions) {
        if (!links.insert(left, right)) {
          throw std::logic_error("selection produced a non-injective addition (" + std::to_string(left) + ", " +
                                 std::to_string(right) + ")");
        }
      }
      local.passes.push_back({i, bucket, min_degree, outcome.candidates, outcome.additions.size(), links.size(),
                              seconds_since(pass_start)});
    }
  }
  local.output = links.size();
  local.seconds = seconds_since(start);
  if (report) *report = std::move(local);
  return links;
}

LinkSet baseline_match(const Graph& g1, const Graph& g2, const LinkSet& seeds, std::uint32_t threshold,
                       std::uint32_t iterations, unsigned workers, MatchReport* report) {
  MatchConfig cfg;
  cfg.threshold = threshold;
  cfg.iterations = iterations;
  cfg.bucketing = false;
  cfg.workers = workers;
  return user_matching(g1, g2, seeds, cfg, report);
}

}  // namespace umatch
