// umatch command line: generate, perturb, seed-links, reconcile, evaluate,
// experiment, bench, intern.

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "umatch/errors.hpp"
#include "umatch/eval.hpp"
#include "umatch/experiment.hpp"
#include "umatch/generators.hpp"
#include "umatch/graph.hpp"
#include "umatch/graph_io.hpp"
#include "umatch/perturb.hpp"
#include "umatch/reconcile.hpp"
#include "umatch/rng.hpp"

namespace fs = std::filesystem;
using namespace umatch;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct GenerateArgs {
  std::string model;
  std::uint64_t seed = 1;
  std::size_t n = 1000;
  std::size_t m = 20;
  double p = 0.01;
  RmatParams rmat;
  std::size_t users = 10000;
  std::size_t interests = 1000;
  std::size_t per_user = 4;
  std::string out;
  std::string memberships;
};

struct PerturbArgs {
  std::string input;
  std::string memberships;
  std::string model = "independent";
  std::uint64_t seed = 1;
  double s1 = 0.5;
  double s2 = 0.5;
  bool no_permute = false;
  double p = 0.05;
  std::optional<NodeId> start;
  std::size_t min_activated = 1;
  std::size_t max_attempts = 100;
  double q = 0.25;
  std::optional<double> sybil_attach;
  std::string out_dir = ".";
};

struct SeedArgs {
  std::string g1, g2, truth, out = "seeds.pairs";
  double l = 0.1;
  std::uint64_t seed = 1;
};

struct ReconcileArgs {
  std::string g1, g2, seeds, out;
  std::uint32_t threshold = 3;
  std::uint32_t iterations = 1;
  bool no_bucketing = false;
  std::uint32_t degree_cap = 0;
  bool strict = false;
  bool compete = false;
  bool table_route = false;
  unsigned workers = 1;
  std::string report;
  std::string summary;
};

struct EvaluateArgs {
  std::string output, truth, seeds, g1, g2, sybils;
  std::string breakdown = "breakdown.csv";
};

struct ExperimentArgs {
  std::string config, out;
  std::optional<unsigned> workers;
};

struct BenchArgs {
  std::string model = "rmat";
  std::vector<unsigned> scales{16, 18, 20};
  std::size_t edge_factor = 16;
  double survival = 0.5;
  double l = 0.1;
  std::uint32_t threshold = 3;
  std::uint32_t iterations = 1;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string out;
};

struct InternArgs {
  std::string input, out, labels;
};

// `# users=<u> interests=<i>` header followed by `user interest` lines.
void write_memberships(const fs::path& path, const BipartiteAffiliation& b) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "# users=" << b.users << " interests=" << b.interests << '\n';
  for (const auto& mb : b.memberships) out << mb.user << ' ' << mb.interest << '\n';
}

BipartiteAffiliation read_memberships(const fs::path& path) {
  BipartiteAffiliation b;
  {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot read " + path.string());
    std::string line;
    while (std::getline(in, line)) {
      if (line.rfind("# users=", 0) != 0) continue;
      std::istringstream fields(line.substr(2));
      std::string token;
      while (fields >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const auto value = std::stoull(token.substr(eq + 1));
        if (token.substr(0, eq) == "users") b.users = value;
        if (token.substr(0, eq) == "interests") b.interests = value;
      }
      break;
    }
  }
  for (const auto& [user, interest] : read_pairs(path)) {
    b.memberships.push_back({user, interest});
    b.users = std::max<std::size_t>(b.users, std::size_t{user} + 1);
    b.interests = std::max<std::size_t>(b.interests, std::size_t{interest} + 1);
  }
  return b;
}

int run_generate(const GenerateArgs& a) {
  const RngSeed seed{a.seed};
  Graph g;
  if (a.model == "er") {
    g = gen_er(a.n, a.p, seed);
  } else if (a.model == "pa") {
    g = gen_pa(a.n, a.m, seed);
  } else if (a.model == "rmat") {
    g = gen_rmat(a.rmat, seed);
  } else {
    const auto b = gen_affiliation(a.users, a.interests, a.per_user, seed);
    write_memberships(a.memberships.empty() ? fs::path(a.out).replace_extension(".members") : fs::path(a.memberships),
                      b);
    g = affiliation_to_graph(b);
  }
  write_edge_list(fs::path(a.out), g);
  std::cout << "nodes=" << g.num_nodes() << "\nedges=" << g.num_edges() << '\n';
  return 0;
}

CascadeCopy grow(const Graph& g, const PerturbArgs& a, SplitMix64& seeds, Rng& starts) {
  for (std::size_t attempt = 0; attempt < a.max_attempts; ++attempt) {
    const NodeId start = a.start ? *a.start : static_cast<NodeId>(starts.bounded(g.num_nodes()));
    auto copy = copy_cascade(g, a.p, start, RngSeed{seeds.next()});
    if (copy.activated.size() >= a.min_activated) return copy;
  }
  throw std::runtime_error("cascade did not reach " + std::to_string(a.min_activated) + " nodes in " +
                           std::to_string(a.max_attempts) + " attempts");
}

int run_perturb(const PerturbArgs& a) {
  SplitMix64 stages(a.seed);
  const std::uint64_t copy1 = stages.next();
  const std::uint64_t copy2 = stages.next();
  const std::uint64_t sybil1 = stages.next();
  const std::uint64_t sybil2 = stages.next();
  const std::uint64_t starts_seed = stages.next();
  const std::uint64_t permutation = stages.next();

  CopyPair cp;
  if (a.model == "independent") {
    cp = copy_independent(read_edge_list(fs::path(a.input)), a.s1, a.s2, !a.no_permute, RngSeed{copy1});
  } else if (a.model == "cascade") {
    const Graph g = read_edge_list(fs::path(a.input));
    if (g.num_nodes() == 0) throw ParameterError("cascade needs a non-empty graph");
    Rng starts(RngSeed{starts_seed});
    SplitMix64 s1(copy1);
    SplitMix64 s2(copy2);
    const auto first = grow(g, a, s1, starts);
    const auto second = grow(g, a, s2, starts);
    cp = pair_cascades(first, second);
    if (!a.no_permute) permute_copy2(cp, RngSeed{permutation});
  } else {
    if (a.memberships.empty()) throw UsageError("--memberships is required for the affiliation model");
    const auto b = read_memberships(a.memberships);
    cp.g1 = copy_affiliation_correlated(b, a.q, RngSeed{copy1});
    cp.g2 = copy_affiliation_correlated(b, a.q, RngSeed{copy2});
    for (std::size_t u = 0; u < b.users; ++u) cp.truth.push_back({static_cast<NodeId>(u), static_cast<NodeId>(u)});
    if (!a.no_permute) permute_copy2(cp, RngSeed{permutation});
  }

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  if (a.sybil_attach) {
    auto s1 = inject_sybils(cp.g1, *a.sybil_attach, RngSeed{sybil1});
    auto s2 = inject_sybils(cp.g2, *a.sybil_attach, RngSeed{sybil2});
    cp.g1 = std::move(s1.graph);
    cp.g2 = std::move(s2.graph);
    write_sybils(dir / "sybils.ids", s1.annotation, s2.annotation);
  }
  write_edge_list(dir / "g1.edges", cp.g1);
  write_edge_list(dir / "g2.edges", cp.g2);
  write_pairs(dir / "truth.pairs", cp.truth);
  std::cout << "g1_edges=" << cp.g1.num_edges() << "\ng2_edges=" << cp.g2.num_edges()
            << "\ntruth=" << cp.truth.size() << '\n';
  return 0;
}

int run_seed_links(const SeedArgs& a) {
  CopyPair cp;
  cp.g1 = read_edge_list(fs::path(a.g1));
  cp.g2 = read_edge_list(fs::path(a.g2));
  cp.truth = read_pairs(a.truth);
  const auto seeds = sample_seeds(cp, a.l, RngSeed{a.seed});
  write_pairs(a.out, seeds.sorted());
  std::cout << "seeds=" << seeds.size() << '\n';
  return 0;
}

int run_reconcile(const ReconcileArgs& a) {
  const Graph g1 = read_edge_list(fs::path(a.g1));
  const Graph g2 = read_edge_list(fs::path(a.g2));
  const auto seeds = LinkSet::from_pairs(read_pairs(a.seeds));
  MatchConfig cfg;
  cfg.threshold = a.threshold;
  cfg.iterations = a.iterations;
  cfg.degree_cap = a.degree_cap;
  cfg.strict_threshold = a.strict;
  cfg.bucketing = !a.no_bucketing;
  cfg.workers = a.workers;
  cfg.compete_with_linked = a.compete;
  cfg.route = a.table_route ? ScoringRoute::kTable : ScoringRoute::kFused;
  MatchReport report;
  const auto out = user_matching(g1, g2, seeds, cfg, &report);
  write_pairs(a.out, out.sorted());

  const fs::path base(a.out);
  const fs::path report_path = a.summary.empty() ? fs::path(base).replace_extension(".summary") : fs::path(a.summary);
  const fs::path json_path = a.report.empty() ? fs::path(base).replace_extension(".report.json") : fs::path(a.report);
  {
    std::ofstream kv(report_path);
    if (!kv) throw FormatError("cannot write " + report_path.string());
    report.write_key_values(kv);
  }
  {
    std::ofstream js(json_path);
    if (!js) throw FormatError("cannot write " + json_path.string());
    js << report.to_json() << '\n';
  }
  std::cout << "seeds=" << report.seeds << "\noutput=" << report.output << "\npasses=" << report.passes.size()
            << "\nseconds=" << report.seconds << '\n';
  return 0;
}

int run_evaluate(const EvaluateArgs& a) {
  const Graph g1 = read_edge_list(fs::path(a.g1));
  const Graph g2 = read_edge_list(fs::path(a.g2));
  const auto output = LinkSet::from_pairs(read_pairs(a.output));
  const auto truth = read_pairs(a.truth);
  const auto seeds = LinkSet::from_pairs(read_pairs(a.seeds));

  SybilAnnotation s1;
  SybilAnnotation s2;
  SybilMarks marks;
  if (!a.sybils.empty()) {
    const auto file = read_sybils(a.sybils);
    s1 = annotation_from(file.copy1, g1.num_nodes());
    s2 = annotation_from(file.copy2, g2.num_nodes());
    marks = {&s1, &s2};
  }
  const auto metrics = evaluate(output, truth, seeds, g1, g2, marks);
  metrics.write_key_values(std::cout);

  const auto breakdown = degree_breakdown(output, truth, g1, g2, seeds, marks);
  std::ofstream csv(a.breakdown);
  if (!csv) throw FormatError("cannot write " + a.breakdown);
  breakdown.write_csv(csv);
  return 0;
}

int run_experiment_cmd(const ExperimentArgs& a) {
  auto cfg = load_experiment_config(a.config);
  if (!a.out.empty()) cfg.output_dir = a.out;
  if (a.workers) cfg.workers = *a.workers;
  if (cfg.output_dir.empty()) throw UsageError("no output directory: pass --out or set output_dir");
  const auto report = run_experiment(cfg);
  std::size_t failed = 0;
  for (const auto& row : report.rows) {
    if (!row.error.empty()) {
      ++failed;
      std::cerr << "repetition " << row.repetition << " failed: " << row.error << '\n';
    }
  }
  std::cout << "rows=" << report.rows.size() << "\nfailed_rows=" << failed << "\nreport="
            << (fs::path(cfg.output_dir) / "report.csv").string() << '\n';
  return report.any_failed() ? kExitFailure : 0;
}

int run_bench_cmd(const BenchArgs& a) {
  if (a.model != "rmat") throw UsageError("bench supports --model rmat only");
  BenchConfig cfg;
  cfg.scales = a.scales;
  cfg.rmat.edge_factor = a.edge_factor;
  cfg.survival = a.survival;
  cfg.seed_link_prob = a.l;
  cfg.threshold = a.threshold;
  cfg.iterations = a.iterations;
  cfg.master_seed = a.seed;
  cfg.workers = a.workers;
  const auto rows = run_bench(cfg);
  write_bench_csv(std::cout, rows);
  if (!a.out.empty()) {
    std::ofstream out(a.out);
    if (!out) throw FormatError("cannot write " + a.out);
    write_bench_csv(out, rows);
  }
  return 0;
}

int run_intern(const InternArgs& a) {
  LabelDictionary dict;
  const Graph g = read_labeled_edge_list(a.input, dict);
  write_edge_list(fs::path(a.out), g);
  dict.save(a.labels.empty() ? fs::path(a.out).replace_extension(".labels") : fs::path(a.labels));
  std::cout << "nodes=" << g.num_nodes() << "\nedges=" << g.num_edges() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"umatch: reconcile two partial copies of a network from seed links"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic graph as an edge list");
  generate->add_option("--model", gen.model)->required()->check(CLI::IsMember({"er", "pa", "rmat", "affiliation"}));
  generate->add_option("--seed", gen.seed, "RNG seed");
  generate->add_option("--n", gen.n, "nodes (er, pa)");
  generate->add_option("--m", gen.m, "edges per arrival (pa)");
  generate->add_option("--p", gen.p, "edge probability (er)");
  generate->add_option("--scale", gen.rmat.scale, "log2 nodes (rmat)");
  generate->add_option("--edge-factor", gen.rmat.edge_factor, "edges per node (rmat)");
  generate->add_option("--a", gen.rmat.a);
  generate->add_option("--b", gen.rmat.b);
  generate->add_option("--c", gen.rmat.c);
  generate->add_option("--d", gen.rmat.d);
  generate->add_option("--users", gen.users, "users (affiliation)");
  generate->add_option("--interests", gen.interests, "interests (affiliation)");
  generate->add_option("--per-user", gen.per_user, "memberships per user (affiliation)");
  generate->add_option("--out", gen.out, "edge list path")->required();
  generate->add_option("--memberships", gen.memberships, "membership file (affiliation; default <out>.members)");

  PerturbArgs per;
  auto* perturb = app.add_subcommand("perturb", "Derive two copies and their ground truth");
  perturb->add_option("--model", per.model)->check(CLI::IsMember({"independent", "cascade", "affiliation"}));
  perturb->add_option("--graph,--in", per.input, "underlying edge list (independent, cascade)");
  perturb->add_option("--memberships", per.memberships, "membership file (affiliation)");
  perturb->add_option("--seed", per.seed);
  perturb->add_option("--s1", per.s1, "edge survival in copy 1");
  perturb->add_option("--s2", per.s2, "edge survival in copy 2");
  perturb->add_flag("--no-permute", per.no_permute, "keep copy-2 ids equal to the underlying ids");
  perturb->add_option("--p", per.p, "cascade activation probability");
  perturb->add_option("--start", per.start, "cascade start node (default: random)");
  perturb->add_option("--min-activated", per.min_activated, "resample starts until a cascade reaches this size");
  perturb->add_option("--max-start-attempts", per.max_attempts);
  perturb->add_option("--q", per.q, "interest deletion probability (affiliation)");
  perturb->add_option("--sybil-attach", per.sybil_attach, "inject one sybil per node with this attach probability");
  perturb->add_option("--out-dir", per.out_dir);

  SeedArgs sd;
  auto* seed_links = app.add_subcommand("seed-links", "Sample seed links from the ground truth");
  seed_links->add_option("--g1", sd.g1)->required();
  seed_links->add_option("--g2", sd.g2)->required();
  seed_links->add_option("--truth", sd.truth)->required();
  seed_links->add_option("--l", sd.l, "seed link probability")->required();
  seed_links->add_option("--seed", sd.seed);
  seed_links->add_option("--out", sd.out);

  ReconcileArgs rc;
  auto* reconcile = app.add_subcommand("reconcile", "Run User-Matching");
  reconcile->add_option("--g1", rc.g1)->required();
  reconcile->add_option("--g2", rc.g2)->required();
  reconcile->add_option("--seeds", rc.seeds)->required();
  reconcile->add_option("--T", rc.threshold, "minimum witness count")->required();
  reconcile->add_option("--k", rc.iterations, "iterations")->required();
  reconcile->add_flag("--no-bucketing", rc.no_bucketing, "one degree class per pass");
  reconcile->add_option("--D", rc.degree_cap, "degree cap (default: max degree of both copies)");
  reconcile->add_flag("--strict-threshold", rc.strict, "require score > T instead of >= T");
  reconcile->add_flag("--compete-with-linked", rc.compete, "linked nodes still compete for the row/column best");
  reconcile->add_flag("--table-route", rc.table_route, "score through materialized witness tables");
  reconcile->add_option("--workers", rc.workers, "0 = hardware concurrency");
  reconcile->add_option("--out", rc.out)->required();
  reconcile->add_option("--summary", rc.summary, "key=value summary (default <out>.summary)");
  reconcile->add_option("--report", rc.report, "JSON run report with per-pass stats (default <out>.report.json)");

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score an output against ground truth");
  evaluate_cmd->add_option("--output", ev.output)->required();
  evaluate_cmd->add_option("--truth", ev.truth)->required();
  evaluate_cmd->add_option("--seeds", ev.seeds)->required();
  evaluate_cmd->add_option("--g1", ev.g1)->required();
  evaluate_cmd->add_option("--g2", ev.g2)->required();
  evaluate_cmd->add_option("--sybils", ev.sybils);
  evaluate_cmd->add_option("--breakdown", ev.breakdown);

  ExperimentArgs ex;
  auto* experiment = app.add_subcommand("experiment", "Run a configured experiment");
  experiment->add_option("--config", ex.config)->required();
  experiment->add_option("--out", ex.out);
  experiment->add_option("--workers", ex.workers);

  BenchArgs bn;
  auto* bench = app.add_subcommand("bench", "Time the pipeline on RMAT graphs of growing scale");
  bench->add_option("--model", bn.model);
  bench->add_option("--scales", bn.scales)->delimiter(',');
  bench->add_option("--edge-factor", bn.edge_factor);
  bench->add_option("--s", bn.survival, "edge survival in both copies");
  bench->add_option("--l", bn.l);
  bench->add_option("--T", bn.threshold);
  bench->add_option("--k", bn.iterations);
  bench->add_option("--seed", bn.seed);
  bench->add_option("--workers", bn.workers);
  bench->add_option("--out", bn.out, "also write the CSV here");

  InternArgs in;
  auto* intern = app.add_subcommand("intern", "Convert a string-labeled edge list to integer ids");
  intern->add_option("--in", in.input)->required();
  intern->add_option("--out", in.out)->required();
  intern->add_option("--labels", in.labels, "label sidecar (default <out>.labels)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) return run_generate(gen);
    if (*perturb) return run_perturb(per);
    if (*seed_links) return run_seed_links(sd);
    if (*reconcile) return run_reconcile(rc);
    if (*evaluate_cmd) return run_evaluate(ev);
    if (*experiment) return run_experiment_cmd(ex);
    if (*bench) return run_bench_cmd(bn);
    if (*intern) return run_intern(in);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
