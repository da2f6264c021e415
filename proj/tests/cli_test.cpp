#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

const fs::path kBinary = QPROPSIM_PATH;
const fs::path kSamples = QPROP_SAMPLES_DIR;

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("qpropsim_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args, const fs::path& out) {
  const std::string cmd = kBinary.string() + " " + args + " --out " + out.string() + " 2>" +
                          (scratch() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

struct Command {
  std::string name;
  std::string args;
};

const std::vector<Command> kCommands = {
    {"matrices", "matrices --config " + (kSamples / "matrices_nine_param.json").string()},
    {"sweep_dep", "sweep-depolarizing --verify --seed 11"},
    {"sweep_t1", "sweep-theorem1"},
    {"constraint", "constraint"},
    {"bounds", "bounds"},
    {"evolve", "evolve --config " + (kSamples / "evolve_h2.json").string()},
};

}  // namespace

TEST(Cli, DeterministicAcrossRunsAndWorkers) {
  for (const auto& c : kCommands) {
    const fs::path a = scratch() / (c.name + "_a.out");
    const fs::path b = scratch() / (c.name + "_b.out");
    const fs::path w = scratch() / (c.name + "_w.out");
    ASSERT_EQ(run(c.args + " --jobs 1", a), 0) << c.args << "\n" << slurp(scratch() / "stderr.txt");
    ASSERT_EQ(run(c.args + " --jobs 1", b), 0) << c.args;
    ASSERT_EQ(run(c.args + " --jobs 8", w), 0) << c.args;
    const std::string first = slurp(a);
    EXPECT_FALSE(first.empty()) << c.name;
    EXPECT_EQ(first, slurp(b)) << c.name;
    EXPECT_EQ(first, slurp(w)) << c.name;
  }
}

TEST(Cli, CsvHasHeaderAndMetadata) {
  const fs::path out = scratch() / "meta.csv";
  ASSERT_EQ(run("constraint --seed 5", out), 0);
  const std::string text = slurp(out);
  EXPECT_EQ(text.rfind("N,delta,p_max\n", 0), 0u);
  EXPECT_NE(text.find("# config-hash="), std::string::npos);
  EXPECT_NE(text.find(", seed=5, version="), std::string::npos);
}

TEST(Cli, SweepDepolarizingKnownRows) {
  const fs::path cfg = write_config("dep.json", R"({"grid": {"N": [1, 3], "p": [0.0, 0.5, 1.0]}})");
  const fs::path out = scratch() / "dep.csv";
  ASSERT_EQ(run("sweep-depolarizing --config " + cfg.string(), out), 0);
  const auto rows = csv_rows(slurp(out));
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[1], (std::vector<std::string>{"1", "0", "0"}));
  EXPECT_EQ(rows[2], (std::vector<std::string>{"1", "0.5", "1"}));
  EXPECT_EQ(rows[3], (std::vector<std::string>{"1", "1", "inf"}));
}

TEST(Cli, SweepDepolarizingVerifyAgrees) {
  const fs::path cfg = write_config("depv.json", R"({"grid": {"N": [2, 5, 9], "p": [0.001, 0.01, 0.05, 0.2]}})");
  const fs::path out = scratch() / "depv.csv";
  ASSERT_EQ(run("sweep-depolarizing --verify --config " + cfg.string(), out), 0);
  const auto rows = csv_rows(slurp(out));
  ASSERT_EQ(rows[0].size(), 5u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(std::stod(rows[i][4]), 1e-9) << rows[i][0];
}

TEST(Cli, BoundSeriesStopAtPmax) {
  const fs::path out = scratch() / "t1.csv";
  ASSERT_EQ(run("sweep-theorem1", out), 0);
  const auto rows = csv_rows(slurp(out));
  std::map<std::string, double> last;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][1] == "0") EXPECT_EQ(rows[i][2], "0");
    last[rows[i][0]] = std::stod(rows[i][1]);
  }
  const std::map<std::string, double> reported = {{"5", 0.032}, {"6", 0.036}, {"10", 0.052}, {"12", 0.068}, {"14", 0.129}};
  for (const auto& [n, v] : reported) EXPECT_NEAR(last.at(n), v, 0.005) << n;
}

TEST(Cli, BoundSeriesInvalidWhenDeltaTooLarge) {
  const fs::path cfg = write_config("t1bad.json", R"({"grid": {"N": [5, 20]}})");
  const fs::path out = scratch() / "t1bad.csv";
  ASSERT_EQ(run("sweep-theorem1 --config " + cfg.string(), out), 0);
  const std::string text = slurp(out);
  EXPECT_NE(text.find("\n20,invalid,invalid\n"), std::string::npos);
  EXPECT_NE(text.find("# warning: delta=0.04 too large for N=20"), std::string::npos);
}

TEST(Cli, MatricesDepolarizingScaling) {
  const fs::path clean = scratch() / "m0.json";
  const fs::path noisy = scratch() / "m1.json";
  const fs::path c0 = write_config("m0cfg.json", R"({"ansatz": "nine_param", "noise": {"type": "depolarizing", "p": 0.0}})");
  const fs::path c1 = write_config("m1cfg.json", R"({"ansatz": "nine_param", "noise": {"type": "depolarizing", "p": 0.1}})");
  ASSERT_EQ(run("matrices --config " + c0.string(), clean), 0);
  ASSERT_EQ(run("matrices --config " + c1.string(), noisy), 0);
  // Crude extraction of the first M entry: "M": [ [ value,
  auto first_m = [](const std::string& t) {
    const auto pos = t.find("\"M\"");
    const auto start = t.find_first_of("-0123456789", t.find('[', t.find('[', pos) + 1));
    return std::stod(t.substr(start));
  };
  EXPECT_NEAR(first_m(slurp(noisy)), std::pow(0.9, 18) * first_m(slurp(clean)), 1e-12);
}

TEST(Cli, NoiselessEqualsZeroProbability) {
  const fs::path a = scratch() / "none.json";
  const fs::path b = scratch() / "zero.json";
  const fs::path ca = write_config("nonecfg.json", R"({"ansatz": "nine_param"})");
  const fs::path cb = write_config("zerocfg.json", R"({"ansatz": "nine_param", "noise": {"type": "depolarizing", "p": 0.0}})");
  ASSERT_EQ(run("matrices --config " + ca.string(), a), 0);
  ASSERT_EQ(run("matrices --config " + cb.string(), b), 0);
  auto body = [](const std::string& t) { return t.substr(t.find("\"M\""), t.find("\"metadata\"") - t.find("\"M\"")); };
  // Keys are sorted, so M, V, Y and cond_M come before metadata.
  EXPECT_EQ(body(slurp(a)), body(slurp(b)));
}

TEST(Cli, EvolveReachesGroundEnergy) {
  const fs::path out = scratch() / "ev.csv";
  ASSERT_EQ(run("evolve --config " + (kSamples / "evolve_h2.json").string(), out), 0);
  const auto rows = csv_rows(slurp(out));
  const auto& header = rows[0];
  const auto col = std::find(header.begin(), header.end(), "energy") - header.begin();
  EXPECT_NEAR(std::stod(rows.back()[col]), -1.145599124123644, 1e-3);
}

TEST(Cli, EvolveFullDepolarizingIsFlat) {
  const fs::path cfg = write_config("evp1.json", R"({"ansatz": "nine_param", "noise": {"type": "depolarizing", "p": 1.0},
    "evolution": {"total_time": 0.2, "dtau": 0.05}})");
  const fs::path out = scratch() / "evp1.csv";
  ASSERT_EQ(run("evolve --config " + cfg.string(), out), 0);
  EXPECT_NE(slurp(out).find("# diagnostic: M vanishes"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  const fs::path out = scratch() / "err.out";
  EXPECT_EQ(run("matrices --config /does/not/exist.json", out), 2);
  EXPECT_EQ(run("matrices --config " + write_config("bad.json", "{ not json").string(), out), 2);
  EXPECT_EQ(run("matrices --config " + write_config("badnoise.json", R"({"noise": {"type": "amplitude", "p": 0.1}})").string(), out), 2);
  EXPECT_EQ(run("matrices --config " + write_config("badtheta.json", R"({"theta": [0.1, 0.2]})").string(), out), 2);
  EXPECT_EQ(run("bounds --norm max", out), 2);
  EXPECT_EQ(run("nosuchcommand", out), 2);
  // The 5-parameter preset has a singular M.
  EXPECT_EQ(run("sweep-theorem1 --config " + write_config("singular.json", R"({"system": "from_ansatz"})").string(), out), 3);
}
