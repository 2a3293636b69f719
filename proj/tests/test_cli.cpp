#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "umatch/graph_io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run cli(const std::string& args, const fs::path& cwd) {
  const auto capture = cwd / "stdout.txt";
  const std::string cmd = "cd '" + cwd.string() + "' && '" UMATCH_CLI_PATH "' " + args + " > '" + capture.string() +
                          "' 2> '" + (cwd / "stderr.txt").string() + "'";
  const int status = std::system(cmd.c_str());
  std::ifstream in(capture);
  std::ostringstream s;
  s << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, s.str()};
}

fs::path workdir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "umatch_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Cli, Pipeline) {
  const auto dir = workdir("pipeline");
  ASSERT_EQ(cli("generate --model pa --n 1500 --m 8 --seed 3 --out g.edges", dir).code, 0);
  ASSERT_EQ(cli("perturb --model independent --in g.edges --s1 0.6 --s2 0.6 --seed 4 --sybil-attach 0.5", dir).code,
            0);
  for (const char* f : {"g1.edges", "g2.edges", "truth.pairs", "sybils.ids"}) EXPECT_TRUE(fs::exists(dir / f)) << f;
  ASSERT_EQ(cli("seed-links --g1 g1.edges --g2 g2.edges --truth truth.pairs --l 0.1 --seed 5", dir).code, 0);
  ASSERT_EQ(cli("reconcile --g1 g1.edges --g2 g2.edges --seeds seeds.pairs --T 2 --k 2 --out out.pairs", dir).code, 0);
  for (const char* f : {"out.pairs", "out.summary", "out.report.json"}) EXPECT_TRUE(fs::exists(dir / f)) << f;
  const auto eval = cli(
      "evaluate --output out.pairs --truth truth.pairs --seeds seeds.pairs --g1 g1.edges --g2 g2.edges "
      "--sybils sybils.ids",
      dir);
  ASSERT_EQ(eval.code, 0);
  EXPECT_NE(eval.out.find("good="), std::string::npos);
  EXPECT_NE(eval.out.find("sybil_twins="), std::string::npos);
  EXPECT_NE(eval.out.find("precision="), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "breakdown.csv"));

  // Same seeds give the same files.
  ASSERT_EQ(cli("reconcile --g1 g1.edges --g2 g2.edges --seeds seeds.pairs --T 2 --k 2 --workers 4 "
                "--out again.pairs",
                dir)
                .code,
            0);
  EXPECT_EQ(umatch::read_pairs(dir / "out.pairs"), umatch::read_pairs(dir / "again.pairs"));
}

TEST(Cli, GenerateModels) {
  const auto dir = workdir("generate");
  EXPECT_EQ(cli("generate --model er --n 300 --p 0.05 --out er.edges", dir).code, 0);
  EXPECT_EQ(cli("generate --model rmat --scale 8 --edge-factor 4 --out rmat.edges", dir).code, 0);
  EXPECT_EQ(umatch::read_edge_list(dir / "rmat.edges").num_edges(), 1024u);
  EXPECT_EQ(cli("generate --model affiliation --users 200 --interests 30 --per-user 3 --out aff.edges", dir).code, 0);
  EXPECT_TRUE(fs::exists(dir / "aff.members"));
  EXPECT_EQ(cli("perturb --model affiliation --memberships aff.members --q 0.25 --out-dir aff", dir).code, 0);
  EXPECT_EQ(umatch::read_pairs(dir / "aff" / "truth.pairs").size(), 200u);
  EXPECT_EQ(cli("perturb --model cascade --in er.edges --p 0.3 --min-activated 20 --out-dir casc", dir).code, 0);
  EXPECT_TRUE(fs::exists(dir / "casc" / "truth.pairs"));
}

TEST(Cli, Intern) {
  const auto dir = workdir("intern");
  {
    std::ofstream out(dir / "named.txt");
    out << "ann bo\nbo cy\n";
  }
  const auto r = cli("intern --in named.txt --out named.edges", dir);
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(umatch::read_edge_list(dir / "named.edges").num_edges(), 2u);
  EXPECT_TRUE(fs::exists(dir / "named.labels"));
}

TEST(Cli, ExitCodes) {
  const auto dir = workdir("codes");
  EXPECT_EQ(cli("", dir).code, 106);  // CLI11: subcommand required
  EXPECT_NE(cli("generate --model er --out x.edges --p 2", dir).code, 0);
  EXPECT_EQ(cli("generate --model er --out x.edges --p 2", dir).code, 2);
  EXPECT_EQ(cli("bench --scales 10", dir).code, 2);
  EXPECT_EQ(cli("reconcile --g1 none --g2 none --seeds none --T 1 --k 1 --out o", dir).code, 1);
}

TEST(Cli, ExperimentExitCode) {
  const auto dir = workdir("experiment");
  {
    std::ofstream ok(dir / "ok.json");
    ok << R"({"schema_version": 1, "generator": {"model": "pa", "n": 800, "m": 6},
             "match": {"thresholds": [2]}, "repetitions": 2})";
    std::ofstream bad(dir / "bad.json");
    bad << R"({"schema_version": 1, "generator": {"model": "file", "path": "/nonexistent.edges"}})";
  }
  EXPECT_EQ(cli("experiment --config ok.json --out run", dir).code, 0);
  EXPECT_TRUE(fs::exists(dir / "run" / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir / "run" / "rep_001" / "T2_bucketed.pairs"));
  EXPECT_EQ(cli("experiment --config bad.json --out badrun", dir).code, 1);
  EXPECT_TRUE(fs::exists(dir / "badrun" / "report.csv"));
}

TEST(Cli, Bench) {
  const auto dir = workdir("bench");
  const auto r = cli("bench --model rmat --scales 10,11 --out bench.csv", dir);
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("relative"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "bench.csv"));
}
