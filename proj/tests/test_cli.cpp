#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "json.hpp"

#include "thermofrac/output.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = THERMOFRAC_CLI;
const std::string kFixtures = THERMOFRAC_FIXTURES;

struct Result {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("thermofrac_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Result cli(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = "\"" + kCli + "\" " + args + " >\"" + out.string() + "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, thermofrac::kCsvHeader);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream fields(line);
    for (std::string f; std::getline(fields, f, ',');) row.push_back(std::stod(f));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST(Cli, MeshInfo) {
  const auto dir = scratch("info");
  const Result r = cli("mesh-info \"" + kFixtures + "/triangle.msh\"", dir);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("nodes: 3\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("elements: 1\n"), std::string::npos) << r.out;
}

TEST(Cli, MissingConfigExitsOne) {
  const auto dir = scratch("missing");
  const Result r = cli("run \"" + (dir / "missing.json").string() + "\"", dir);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("missing.json"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("file not found"), std::string::npos) << r.err;
}

TEST(Cli, UnknownExampleListsNames) {
  const auto dir = scratch("unknown");
  const Result r = cli("example sentt", dir);
  EXPECT_EQ(r.code, 1);
  for (const char* name : {"cruciform-mech", "cruciform-thermal", "cruciform-combined", "sent", "bimaterial",
                           "quench-680", "quench-880"})
    EXPECT_NE(r.err.find(name), std::string::npos) << name << " in: " << r.err;
}

TEST(Cli, UsageErrorsExitOne) {
  const auto dir = scratch("usage");
  EXPECT_EQ(cli("", dir).code, 1);
  EXPECT_EQ(cli("frobnicate", dir).code, 1);
}

TEST(Cli, RunWritesOutputsDeterministically) {
  const auto dir = scratch("determinism");
  const std::string cfg = "run \"" + kFixtures + "/minimal.json\" -q --set output.vtk_every=1 --set load.tMax=3 --out ";
  const Result a = cli(cfg + "\"" + (dir / "a").string() + "\"", dir);
  ASSERT_EQ(a.code, 0) << a.err;
  const Result b = cli(cfg + "\"" + (dir / "b").string() + "\"", dir);
  ASSERT_EQ(b.code, 0) << b.err;
  for (const char* f : {"manifest.json", "records.csv", "fields_00000.vtk", "fields_00003.vtk"}) {
    EXPECT_TRUE(fs::exists(dir / "a" / f)) << f;
  }
  const std::string csv = slurp(dir / "a" / "records.csv");
  EXPECT_EQ(csv, slurp(dir / "b" / "records.csv"));
  EXPECT_EQ(read_csv(dir / "a" / "records.csv").size(), 4u);
}

TEST(Cli, OverridesAreValidated) {
  const auto dir = scratch("override");
  const Result r = cli("run \"" + kFixtures + "/minimal.json\" -q --set staggered.inner_max=0 --out \"" +
                           (dir / "o").string() + "\"",
                       dir);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("staggered.inner_max"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "o" / "records.csv"));
}

TEST(Cli, PrintConfigRoundTrips) {
  const auto dir = scratch("print");
  const Result r = cli("example quench-880 --scale 0.5 --print-config", dir);
  ASSERT_EQ(r.code, 0) << r.err;
  auto config = nlohmann::json::parse(r.out);
  EXPECT_EQ(config["load"]["TAppMax"], 880);
  config["load"]["tMax"] = config["load"]["delt"];
  std::ofstream(dir / "q.json") << config.dump(2);
  const Result again = cli("run \"" + (dir / "q.json").string() + "\" -q --out \"" +
                               (dir / "q").string() + "\"",
                           dir);
  EXPECT_EQ(again.code, 0) << again.err;
}

// Coarse single-edge-notched tension run: the load curve must peak and then
// lose at least half of the peak.
TEST(Cli, SentPeakThenDrop) {
  const auto dir = scratch("sent");
  const Result r = cli("example sent --scale 0.25 -q --out \"" + (dir / "run").string() + "\"", dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_csv(dir / "run" / "records.csv");
  ASSERT_GT(rows.size(), 10u);
  std::size_t peak = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i][4] > rows[peak][4]) peak = i;
  ASSERT_GT(rows[peak][4], 0);
  ASSERT_LT(peak + 1, rows.size());
  double after = rows[peak][4];
  for (std::size_t i = peak + 1; i < rows.size(); ++i) after = std::min(after, rows[i][4]);
  EXPECT_LE(after, 0.5 * rows[peak][4]) << "peak " << rows[peak][4] << " at row " << peak;
}
