#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "bppc/branch_and_price.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(BPPC_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf;
  while (std::fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / "bppc_cli_test";
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }
  static std::string path(const std::string& name) { return (dir_ / name).string(); }
  static inline fs::path dir_;
};

}  // namespace

TEST_F(Cli, HelpForEverySubcommand) {
  for (const char* sub : {"gen", "train", "solve", "bench"}) {
    const auto r = run(std::string(sub) + " --help");
    EXPECT_EQ(r.code, 0) << sub;
    EXPECT_NE(r.out.find("--"), std::string::npos);
  }
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("solve --bogus").code, 2);
}

TEST_F(Cli, GenIsDeterministicAndParseable) {
  ASSERT_EQ(run("gen --items 120 --cap 1000 --weights uniform:20:100 --density 0.5 --seed 1 --out " + path("g1")).code, 0);
  ASSERT_EQ(run("gen --items 120 --cap 1000 --weights uniform:20:100 --density 0.5 --seed 1 --out " + path("g2")).code, 0);
  EXPECT_EQ(slurp(path("g1/inst_000.txt")), slurp(path("g2/inst_000.txt")));
  EXPECT_EQ(slurp(path("g1/inst_000.conflicts")), slurp(path("g2/inst_000.conflicts")));
  std::ifstream a(path("g1/inst_000.txt")), b(path("g1/inst_000.conflicts"));
  const auto inst = bppc::parse_instance(a, &b);
  EXPECT_EQ(inst.n_items(), 120);
  EXPECT_EQ(inst.capacity, 1000);
  EXPECT_GT(inst.conflicts.edge_count(), 0u);
  EXPECT_EQ(run("gen --weights normal:1:2 --out " + path("bad")).code, 2);
}

TEST_F(Cli, GenCountUsesDistinctSeeds) {
  ASSERT_EQ(run("gen --items 30 --cap 150 --count 20 --seed 4 --out " + path("many")).code, 0);
  std::set<std::string> contents;
  for (int k = 0; k < 20; ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "many/inst_%03d.txt", k);
    contents.insert(slurp(path(name)));
  }
  EXPECT_EQ(contents.size(), 20u);
}

TEST_F(Cli, TrainSolveAndStrategyIndependence) {
  const auto tr = run("train --count 2 --items 50 --seed 3 --out " + path("m1.txt") + " --dump-data " + path("d.csv"));
  ASSERT_EQ(tr.code, 0) << tr.out;
  EXPECT_NE(tr.out.find("examples 500"), std::string::npos) << tr.out;
  EXPECT_NE(tr.out.find("training accuracy"), std::string::npos);
  ASSERT_EQ(run("train --count 2 --items 50 --seed 3 --out " + path("m2.txt")).code, 0);
  EXPECT_EQ(slurp(path("m1.txt")), slurp(path("m2.txt")));
  std::istringstream csv(slurp(path("d.csv")));
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "f1,f2,f3,f4,fc,fr,label,tag");

  ASSERT_EQ(run("gen --items 40 --cap 150 --seed 9 --out " + path("s")).code, 0);
  const std::string inst = path("s/inst_000.txt"), conf = path("s/inst_000.conflicts");
  const auto exact = run("solve --mode lp --pricing exact --instance " + inst + " --conflicts " + conf + " --out " +
                         path("exact.json") + " --iter-log " + path("it.csv") + " --lp-dump " + path("lp.txt"));
  ASSERT_EQ(exact.code, 0) << exact.out;
  const auto ml = run("solve --mode lp --pricing mlaco --model " + path("m1.txt") + " --instance " + inst +
                      " --conflicts " + conf + " --out " + path("ml.json"));
  ASSERT_EQ(ml.code, 0) << ml.out;
  const auto je = json::parse(slurp(path("exact.json")));
  const auto jm = json::parse(slurp(path("ml.json")));
  EXPECT_EQ(je["result"]["status"], "Optimal");
  EXPECT_EQ(jm["result"]["status"], "Optimal");
  EXPECT_NEAR(je["result"]["lp_objective"].get<double>(), jm["result"]["lp_objective"].get<double>(), 1e-6);
  EXPECT_EQ(jm["config"]["pricing"], "mlaco");
  EXPECT_EQ(slurp(path("it.csv")).rfind("iteration,lp_objective,columns_added,min_reduced_cost,elapsed_seconds", 0), 0u);
  EXPECT_EQ(slurp(path("lp.txt")).rfind("rmp 40 ", 0), 0u);
}

TEST_F(Cli, MissingModelIsAUsageError) {
  ASSERT_EQ(run("gen --items 10 --cap 150 --out " + path("mm")).code, 0);
  const auto r = run("solve --pricing mlph --instance " + path("mm/inst_000.txt"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("--model"), std::string::npos);
  EXPECT_EQ(run("solve --instance " + path("nope.txt")).code, 1);
}

TEST_F(Cli, IpModeMatchesBruteForce) {
  ASSERT_EQ(run("gen --items 8 --cap 100 --weights uniform:20:45 --density 0.4 --seed 5 --out " + path("ip")).code, 0);
  const auto r = run("solve --mode ip --instance " + path("ip/inst_000.txt") + " --conflicts " +
                     path("ip/inst_000.conflicts") + " --node-log " + path("nodes.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = json::parse(r.out);
  std::ifstream a(path("ip/inst_000.txt")), b(path("ip/inst_000.conflicts"));
  const auto inst = bppc::parse_instance(a, &b);
  EXPECT_EQ(j["result"]["status"], "Optimal");
  EXPECT_EQ(j["result"]["incumbent"].get<int>(), bppc::brute_force_ip(inst));
  EXPECT_EQ(j["result"]["gap_percent"].get<double>(), 0.0);
  EXPECT_EQ(slurp(path("nodes.csv")).rfind("node_id,depth,lp_bound,status,incumbent,gap,elapsed", 0), 0u);
}

TEST_F(Cli, ConflictDensityGeneratesGraph) {
  ASSERT_EQ(run("gen --items 20 --cap 150 --density 0 --out " + path("cd")).code, 0);
  const auto r = run("solve --instance " + path("cd/inst_000.txt") + " --conflict-density 1 --seed 2");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["config"]["conflict_edges"].get<int>(), 190);
  EXPECT_NEAR(j["result"]["lp_objective"].get<double>(), 20.0, 1e-9);
}

TEST_F(Cli, TimeLimitIsHonored) {
  ASSERT_EQ(run("gen --items 120 --cap 150 --multiplier 5 --seed 1 --out " + path("hard")).code, 0);
  const auto r = run("solve --time-limit 0.2 --instance " + path("hard/inst_000.txt") + " --conflicts " +
                     path("hard/inst_000.conflicts"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["result"]["status"], "TimeLimit");
  EXPECT_GT(j["result"]["iterations"].get<int>(), 0);
}

TEST_F(Cli, BenchWritesCsvAndSummary) {
  const auto r = run("bench --sizes 15 --multipliers 1,2 --seeds 1,2 --strategies exact,aco --time-limit 20 --out " +
                     path("bench"));
  ASSERT_EQ(r.code, 0) << r.out;
  std::istringstream csv(slurp(path("bench/results.csv")));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "instance,strategy,multiplier,status,lp_objective,wall_s,iters,cols,fallbacks");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 8);
  EXPECT_NE(slurp(path("bench/summary.txt")).find("mean_wall_s"), std::string::npos);
  EXPECT_EQ(run("bench --sizes 15 --strategies mlaco --out " + path("b2")).code, 2);
}
