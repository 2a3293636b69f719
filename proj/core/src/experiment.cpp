#include "umatch/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <new>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "umatch/errors.hpp"
#include "umatch/graph_io.hpp"
#include "umatch/parallel.hpp"
#include "umatch/perturb.hpp"

namespace umatch {
namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_probability(double p, const std::string& name) {
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError(name + " must lie in [0, 1], got " + std::to_string(p));
}

// Stage seeds for one repetition, in draw order.
struct StageSeeds {
  std::uint64_t generator, copy1, copy2, sybil1, sybil2, links, starts, permutation;

  explicit StageSeeds(std::uint64_t repetition_seed) {
    SplitMix64 s(repetition_seed);
    generator = s.next();
    copy1 = s.next();
    copy2 = s.next();
    sybil1 = s.next();
    sybil2 = s.next();
    links = s.next();
    starts = s.next();
    permutation = s.next();
  }
};

struct Instance {
  CopyPair pair;
  SybilAnnotation sybils1;
  SybilAnnotation sybils2;
  bool has_sybils = false;
};

CascadeCopy grow_cascade(const Graph& g, const PerturbationSpec& spec, std::uint64_t copy_seed, Rng& starts) {
  if (g.num_nodes() == 0) throw ParameterError("cascade needs a non-empty underlying graph");
  SplitMix64 attempts(copy_seed);
  for (std::size_t attempt = 0; attempt < spec.max_start_attempts; ++attempt) {
    const NodeId start = spec.start ? *spec.start : static_cast<NodeId>(starts.bounded(g.num_nodes()));
    auto copy = copy_cascade(g, spec.p, start, RngSeed{attempts.next()});
    if (copy.activated.size() >= spec.min_activated) return copy;
  }
  throw std::runtime_error("cascade did not reach " + std::to_string(spec.min_activated) + " nodes in " +
                           std::to_string(spec.max_start_attempts) + " attempts");
}

Instance build_instance(const ExperimentConfig& cfg, const StageSeeds& seeds, PhaseTimes& times) {
  const auto& gen = cfg.generator;
  const auto& per = cfg.perturbation;
  auto t0 = Clock::now();
  Graph underlying;
  BipartiteAffiliation affiliation;
  if (gen.model == "er") {
    underlying = gen_er(gen.n, gen.p, RngSeed{seeds.generator});
  } else if (gen.model == "pa") {
    underlying = gen_pa(gen.n, gen.m, RngSeed{seeds.generator});
  } else if (gen.model == "rmat") {
    underlying = gen_rmat(gen.rmat, RngSeed{seeds.generator});
  } else if (gen.model == "file") {
    underlying = read_edge_list(std::filesystem::path(gen.path));
  } else {
    affiliation = gen_affiliation(gen.users, gen.interests, gen.per_user, RngSeed{seeds.generator});
    if (per.model != "affiliation") underlying = affiliation_to_graph(affiliation);
  }
  times.generate = seconds_since(t0);

  t0 = Clock::now();
  Instance inst;
  if (per.model == "independent") {
    inst.pair = copy_independent(underlying, per.s1, per.s2, per.permute, RngSeed{seeds.copy1});
  } else if (per.model == "cascade") {
    Rng starts(RngSeed{seeds.starts});
    const auto first = grow_cascade(underlying, per, seeds.copy1, starts);
    const auto second = grow_cascade(underlying, per, seeds.copy2, starts);
    inst.pair = pair_cascades(first, second);
    if (per.permute) permute_copy2(inst.pair, RngSeed{seeds.permutation});
  } else {
    inst.pair.g1 = copy_affiliation_correlated(affiliation, per.q, RngSeed{seeds.copy1});
    inst.pair.g2 = copy_affiliation_correlated(affiliation, per.q, RngSeed{seeds.copy2});
    for (std::size_t u = 0; u < affiliation.users; ++u) {
      inst.pair.truth.push_back({static_cast<NodeId>(u), static_cast<NodeId>(u)});
    }
    inst.pair.meta = {{"model", "affiliation"}};
    if (per.permute) permute_copy2(inst.pair, RngSeed{seeds.permutation});
  }
  if (per.sybil_attach_prob) {
    auto s1 = inject_sybils(inst.pair.g1, *per.sybil_attach_prob, RngSeed{seeds.sybil1});
    auto s2 = inject_sybils(inst.pair.g2, *per.sybil_attach_prob, RngSeed{seeds.sybil2});
    inst.pair.g1 = std::move(s1.graph);
    inst.pair.g2 = std::move(s2.graph);
    inst.sybils1 = std::move(s1.annotation);
    inst.sybils2 = std::move(s2.annotation);
    inst.has_sybils = true;
  }
  times.perturb = seconds_since(t0);
  return inst;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known, const std::string& where) {
  if (!obj.is_object()) throw FormatError(where + " must be an object");
  for (const auto& item : obj.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw FormatError("unknown config key '" + item.key() + "' in " + where);
    }
  }
}

std::string csv_ratio(const std::optional<double>& value) { return format_ratio(value); }

}  // namespace

void validate(const ExperimentConfig& cfg) {
  if (cfg.schema_version != kConfigSchemaVersion) {
    throw ParameterError("unsupported schema_version " + std::to_string(cfg.schema_version));
  }
  const auto& gen = cfg.generator;
  const auto& per = cfg.perturbation;
  if (gen.model != "er" && gen.model != "pa" && gen.model != "rmat" && gen.model != "affiliation" &&
      gen.model != "file") {
    throw ParameterError("unknown generator model '" + gen.model + "'");
  }
  if (per.model != "independent" && per.model != "cascade" && per.model != "affiliation") {
    throw ParameterError("unknown perturbation model '" + per.model + "'");
  }
  if (per.model == "affiliation" && gen.model != "affiliation") {
    throw ParameterError("affiliation perturbation needs the affiliation generator");
  }
  if (gen.model == "er") check_probability(gen.p, "generator.p");
  check_probability(per.s1, "perturbation.s1");
  check_probability(per.s2, "perturbation.s2");
  check_probability(per.p, "perturbation.p");
  check_probability(per.q, "perturbation.q");
  if (per.sybil_attach_prob) check_probability(*per.sybil_attach_prob, "perturbation.sybil_attach_prob");
  check_probability(cfg.seed_link_prob, "seed_link_prob");
  if (cfg.repetitions < 1) throw ParameterError("repetitions must be >= 1");
  if (cfg.thresholds.empty()) throw ParameterError("at least one threshold is required");
  for (auto t : cfg.thresholds) {
    if (t < 1) throw ParameterError("thresholds must be >= 1");
  }
  if (cfg.iterations < 1) throw ParameterError("iterations must be >= 1");
}

std::string to_json(const ExperimentConfig& cfg) {
  const auto& g = cfg.generator;
  const auto& p = cfg.perturbation;
  json j;
  j["schema_version"] = cfg.schema_version;
  j["generator"] = {{"model", g.model},
                    {"n", g.n},
                    {"m", g.m},
                    {"p", g.p},
                    {"rmat",
                     {{"scale", g.rmat.scale},
                      {"edge_factor", g.rmat.edge_factor},
                      {"a", g.rmat.a},
                      {"b", g.rmat.b},
                      {"c", g.rmat.c},
                      {"d", g.rmat.d}}},
                    {"users", g.users},
                    {"interests", g.interests},
                    {"per_user", g.per_user},
                    {"path", g.path}};
  j["perturbation"] = {{"model", p.model},         {"s1", p.s1},
                       {"s2", p.s2},               {"permute", p.permute},
                       {"p", p.p},                 {"min_activated", p.min_activated},
                       {"max_start_attempts", p.max_start_attempts},
                       {"q", p.q}};
  j["perturbation"]["start"] = p.start ? json(*p.start) : json(nullptr);
  j["perturbation"]["sybil_attach_prob"] = p.sybil_attach_prob ? json(*p.sybil_attach_prob) : json(nullptr);
  j["seed_link_prob"] = cfg.seed_link_prob;
  j["match"] = {{"thresholds", cfg.thresholds},
                {"iterations", cfg.iterations},
                {"degree_cap", cfg.degree_cap},
                {"strict_threshold", cfg.strict_threshold}};
  j["ablation"] = cfg.ablation;
  j["repetitions"] = cfg.repetitions;
  j["master_seed"] = cfg.master_seed;
  j["workers"] = cfg.workers;
  j["parallel_repetitions"] = cfg.parallel_repetitions;
  j["output_dir"] = cfg.output_dir;
  return j.dump(2);
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("config is not valid JSON: ") + e.what());
  }
  if (j.contains("config") && j["config"].is_object()) j = j["config"];
  ExperimentConfig cfg;
  reject_unknown(j,
                 {"schema_version", "generator", "perturbation", "seed_link_prob", "match", "ablation", "repetitions",
                  "master_seed", "workers", "parallel_repetitions", "output_dir"},
                 "config");
  if (j.contains("generator")) {
    reject_unknown(j["generator"], {"model", "n", "m", "p", "rmat", "users", "interests", "per_user", "path"},
                   "generator");
    if (j["generator"].contains("rmat")) {
      reject_unknown(j["generator"]["rmat"], {"scale", "edge_factor", "a", "b", "c", "d"}, "generator.rmat");
    }
  }
  if (j.contains("perturbation")) {
    reject_unknown(j["perturbation"],
                   {"model", "s1", "s2", "permute", "p", "min_activated", "max_start_attempts", "start", "q",
                    "sybil_attach_prob"},
                   "perturbation");
  }
  if (j.contains("match")) {
    reject_unknown(j["match"], {"thresholds", "iterations", "degree_cap", "strict_threshold"}, "match");
  }
  try {
    cfg.schema_version = j.value("schema_version", 0);
    if (j.contains("generator")) {
      const auto& g = j["generator"];
      auto& out = cfg.generator;
      out.model = g.value("model", out.model);
      out.n = g.value("n", out.n);
      out.m = g.value("m", out.m);
      out.p = g.value("p", out.p);
      if (g.contains("rmat")) {
        const auto& r = g["rmat"];
        out.rmat.scale = r.value("scale", out.rmat.scale);
        out.rmat.edge_factor = r.value("edge_factor", out.rmat.edge_factor);
        out.rmat.a = r.value("a", out.rmat.a);
        out.rmat.b = r.value("b", out.rmat.b);
        out.rmat.c = r.value("c", out.rmat.c);
        out.rmat.d = r.value("d", out.rmat.d);
      }
      out.users = g.value("users", out.users);
      out.interests = g.value("interests", out.interests);
      out.per_user = g.value("per_user", out.per_user);
      out.path = g.value("path", out.path);
    }
    if (j.contains("perturbation")) {
      const auto& p = j["perturbation"];
      auto& out = cfg.perturbation;
      out.model = p.value("model", out.model);
      out.s1 = p.value("s1", out.s1);
      out.s2 = p.value("s2", out.s2);
      out.permute = p.value("permute", out.permute);
      out.p = p.value("p", out.p);
      out.min_activated = p.value("min_activated", out.min_activated);
      out.max_start_attempts = p.value("max_start_attempts", out.max_start_attempts);
      out.q = p.value("q", out.q);
      if (p.contains("start") && !p["start"].is_null()) out.start = p["start"].get<NodeId>();
      if (p.contains("sybil_attach_prob") && !p["sybil_attach_prob"].is_null()) {
        out.sybil_attach_prob = p["sybil_attach_prob"].get<double>();
      }
    }
    cfg.seed_link_prob = j.value("seed_link_prob", cfg.seed_link_prob);
    if (j.contains("match")) {
      const auto& m = j["match"];
      cfg.thresholds = m.value("thresholds", cfg.thresholds);
      cfg.iterations = m.value("iterations", cfg.iterations);
      cfg.degree_cap = m.value("degree_cap", cfg.degree_cap);
      cfg.strict_threshold = m.value("strict_threshold", cfg.strict_threshold);
    }
    cfg.ablation = j.value("ablation", cfg.ablation);
    cfg.repetitions = j.value("repetitions", cfg.repetitions);
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.parallel_repetitions = j.value("parallel_repetitions", cfg.parallel_repetitions);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
  } catch (const json::exception& e) {
    throw FormatError(std::string("config field has the wrong type: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str());
}

std::vector<std::uint64_t> repetition_seeds(std::uint64_t master_seed, std::size_t repetitions) {
  SplitMix64 stream(master_seed);
  std::vector<std::uint64_t> out(repetitions);
  for (auto& s : out) s = stream.next();
  return out;
}

bool ExperimentReport::any_failed() const {
  return std::any_of(rows.begin(), rows.end(), [](const ReportRow& r) { return !r.error.empty(); });
}

void ExperimentReport::write_csv(std::ostream& out) const {
  out << "repetition,repetition_seed,algorithm,threshold,iterations,good,bad,seeds_echoed,sybil_twins,output,seeds,eligible,"
         "precision,recall_all,recall_new,recall_deg_gt5,peak_candidates,t_generate,t_perturb,t_seeds,"
         "t_reconcile,t_evaluate,breakdown_file,error\n";
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    std::string error = r.error;
    std::replace(error.begin(), error.end(), ',', ';');
    std::replace(error.begin(), error.end(), '\n', ' ');
    out << r.repetition << ',' << r.repetition_seed << ',' << r.algorithm << ',' << r.threshold << ','
        << r.iterations << ',' << m.good << ',' << m.bad << ',' << m.seeds_echoed << ',' << m.sybil_twins << ',' << m.output << ','
        << m.seeds << ',' << m.eligible << ',' << csv_ratio(m.precision) << ',' << csv_ratio(m.recall_all) << ','
        << csv_ratio(m.recall_new) << ',' << csv_ratio(m.recall_deg_gt5) << ',' << r.peak_candidates << ','
        << r.times.generate << ',' << r.times.perturb << ',' << r.times.seeds << ',' << r.times.reconcile << ','
        << r.times.evaluate << ',' << r.breakdown_file << ',' << error << '\n';
  }
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const std::filesystem::path out_dir = cfg.output_dir;
  const bool write = !cfg.output_dir.empty();
  if (write) std::filesystem::create_directories(out_dir);

  ExperimentReport report;
  report.repetition_seeds = repetition_seeds(cfg.master_seed, cfg.repetitions);
  std::vector<std::vector<ReportRow>> rows(cfg.repetitions);
  std::vector<std::vector<std::string>> files(cfg.repetitions);

  auto run_one = [&](std::size_t rep) {
    const std::uint64_t rep_seed = report.repetition_seeds[rep];
    auto& rep_rows = rows[rep];
    auto& rep_files = files[rep];
    auto blank_rows = [&] {
      rep_rows.clear();
      for (auto t : cfg.thresholds) {
        rep_rows.push_back({rep, rep_seed, "bucketed", t, cfg.iterations, {}, {}, {}, {}, 0, {}});
        if (cfg.ablation) rep_rows.push_back({rep, rep_seed, "baseline", t, cfg.iterations, {}, {}, {}, {}, 0, {}});
      }
    };
    blank_rows();
    try {
      const StageSeeds seeds(rep_seed);
      PhaseTimes shared;
      Instance inst = build_instance(cfg, seeds, shared);
      auto t0 = Clock::now();
      const LinkSet links = sample_seeds(inst.pair, cfg.seed_link_prob, RngSeed{seeds.links});
      shared.seeds = seconds_since(t0);

      std::filesystem::path rep_dir;
      std::string rep_name;
      if (write) {
        std::ostringstream name;
        name << "rep_" << std::setw(3) << std::setfill('0') << rep;
        rep_name = name.str();
        rep_dir = out_dir / rep_name;
        std::filesystem::create_directories(rep_dir);
        write_edge_list(rep_dir / "g1.edges", inst.pair.g1);
        write_edge_list(rep_dir / "g2.edges", inst.pair.g2);
        write_pairs(rep_dir / "truth.pairs", inst.pair.truth);
        const auto seed_pairs = links.sorted();
        write_pairs(rep_dir / "seeds.pairs", seed_pairs);
        rep_files = {rep_name + "/g1.edges", rep_name + "/g2.edges", rep_name + "/truth.pairs",
                     rep_name + "/seeds.pairs"};
        if (inst.has_sybils) {
          write_sybils(rep_dir / "sybils.ids", inst.sybils1, inst.sybils2);
          rep_files.push_back(rep_name + "/sybils.ids");
        }
      }

      const SybilMarks marks = inst.has_sybils ? SybilMarks{&inst.sybils1, &inst.sybils2} : SybilMarks{};
      for (auto& row : rep_rows) {
        row.times = shared;
        MatchConfig mc;
        mc.threshold = row.threshold;
        mc.iterations = cfg.iterations;
        mc.degree_cap = cfg.degree_cap;
        mc.strict_threshold = cfg.strict_threshold;
        mc.bucketing = row.algorithm == "bucketed";
        mc.workers = cfg.workers;
        MatchReport match_report;
        t0 = Clock::now();
        const LinkSet output = user_matching(inst.pair.g1, inst.pair.g2, links, mc, &match_report);
        row.times.reconcile = seconds_since(t0);
        row.peak_candidates = match_report.peak_candidates();
        t0 = Clock::now();
        row.metrics = evaluate(output, inst.pair.truth, links, inst.pair.g1, inst.pair.g2, marks);
        row.breakdown = degree_breakdown(output, inst.pair.truth, inst.pair.g1, inst.pair.g2, links, marks);
        row.times.evaluate = seconds_since(t0);
        if (write) {
          const std::string stem = "T" + std::to_string(row.threshold) + "_" + row.algorithm;
          const auto sorted = output.sorted();
          write_pairs(rep_dir / (stem + ".pairs"), sorted);
          std::ostringstream summary;
          row.metrics.write_key_values(summary);
          match_report.write_key_values(summary);
          write_text(rep_dir / (stem + ".summary"), summary.str());
          write_text(rep_dir / (stem + ".report.json"), match_report.to_json());
          std::ostringstream csv;
          row.breakdown.write_csv(csv);
          write_text(rep_dir / (stem + ".breakdown.csv"), csv.str());
          row.breakdown_file = rep_name + "/" + stem + ".breakdown.csv";
          for (const char* ext : {".pairs", ".summary", ".report.json", ".breakdown.csv"}) {
            rep_files.push_back(rep_name + "/" + stem + ext);
          }
        }
      }
    } catch (const std::exception& e) {
      const std::string message = e.what();
      blank_rows();
      for (auto& row : rep_rows) row.error = message.empty() ? "unknown error" : message;
    }
  };

  parallel_for(cfg.repetitions, cfg.parallel_repetitions, 1,
               [&](unsigned, std::size_t begin, std::size_t end) {
                 for (std::size_t rep = begin; rep < end; ++rep) run_one(rep);
               });

  for (auto& rep_rows : rows) {
    for (auto& row : rep_rows) report.rows.push_back(std::move(row));
  }


  if (write) {
    std::ostringstream csv;
    report.write_csv(csv);
    write_text(out_dir / "report.csv", csv.str());
    json manifest;
    manifest["schema_version"] = kConfigSchemaVersion;
    manifest["config"] = json::parse(to_json(cfg));
    manifest["report"] = "report.csv";
    manifest["repetitions"] = json::array();
    for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
      const StageSeeds s(report.repetition_seeds[rep]);
      manifest["repetitions"].push_back({{"index", rep},
                                         {"seed", report.repetition_seeds[rep]},
                                         {"stage_seeds",
                                          {{"generator", s.generator},
                                           {"copy1", s.copy1},
                                           {"copy2", s.copy2},
                                           {"sybil1", s.sybil1},
                                           {"sybil2", s.sybil2},
                                           {"links", s.links},
                                           {"starts", s.starts},
                                           {"permutation", s.permutation}}},
                                         {"files", files[rep]}});
    }
    write_text(out_dir / "manifest.json", manifest.dump(2));
  }
  return report;
}

std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
  if (cfg.scales.size() < 2) throw ParameterError("bench needs at least two scale entries");
  std::vector<BenchRow> rows;
  const auto seeds = repetition_seeds(cfg.master_seed, cfg.scales.size());
  for (std::size_t i = 0; i < cfg.scales.size(); ++i) {
    const unsigned scale = cfg.scales[i];
    try {
      const StageSeeds s(seeds[i]);
      BenchRow row;
      row.scale = scale;
      RmatParams params = cfg.rmat;
      params.scale = scale;
      const auto start = Clock::now();
      auto t0 = Clock::now();
      const Graph g = gen_rmat(params, RngSeed{s.generator});
      row.times.generate = seconds_since(t0);
      row.nodes = g.num_nodes();
      row.edges = g.num_edges();
      t0 = Clock::now();
      const CopyPair cp = copy_independent(g, cfg.survival, cfg.survival, true, RngSeed{s.copy1});
      row.times.perturb = seconds_since(t0);
      t0 = Clock::now();
      const LinkSet links = sample_seeds(cp, cfg.seed_link_prob, RngSeed{s.links});
      row.times.seeds = seconds_since(t0);
      MatchConfig mc;
      mc.threshold = cfg.threshold;
      mc.iterations = cfg.iterations;
      mc.workers = cfg.workers;
      t0 = Clock::now();
      const LinkSet output = user_matching(cp.g1, cp.g2, links, mc);
      row.times.reconcile = seconds_since(t0);
      t0 = Clock::now();
      (void)evaluate(output, cp.truth, links, cp.g1, cp.g2);
      row.times.evaluate = seconds_since(t0);
      row.seconds = seconds_since(start);
      row.output = output.size();
      rows.push_back(row);
    } catch (const std::bad_alloc&) {
      throw BenchError("out of memory at scale " + std::to_string(scale));
    }
  }
  for (auto& row : rows) row.relative = row.seconds / rows.front().seconds;
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "scale,nodes,edges,t_generate,t_perturb,t_seeds,t_reconcile,t_evaluate,seconds,relative,output\n";
  for (const auto& r : rows) {
    out << r.scale << ',' << r.nodes << ',' << r.edges << ',' << r.times.generate << ',' << r.times.perturb << ','
        << r.times.seeds << ',' << r.times.reconcile << ',' << r.times.evaluate << ',' << r.seconds << ','
        << r.relative << ',' << r.output << '\n';
  }
}

}  // namespace umatch
