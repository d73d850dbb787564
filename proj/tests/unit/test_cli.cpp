#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "dbf/cli/commands.hpp"
#include "dbf/cli/config.hpp"
#include "dbf/cli/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace dbf::cli {
namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dbf_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Runs the installed binary; returns its exit code and keeps stderr.
  int tool(const std::string& args, const std::string& env = "") {
    const std::string err = path("stderr.txt");
    const std::string cmd = env + " " + DBF_TOOL_PATH + " " + args + " 2> " + err;
    const int status = std::system(cmd.c_str());
    stderr_ = slurp(err);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  void write(const std::string& name, const std::string& contents) {
    std::ofstream(path(name), std::ios::binary) << contents;
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  json load(const std::string& name) const { return read_json_file(path(name)); }

  fs::path dir_;
  std::string stderr_;
};

TEST_F(CliTest, CsvRoundTrip) {
  const std::vector<double> values{0.1, -2.5, 1e-300, 3.0};
  write("s.csv", series_csv(values, 5));
  const TimeSeries s = read_series_csv(path("s.csv"));
  EXPECT_EQ(s.origin_index(), 5);
  EXPECT_TRUE(std::equal(values.begin(), values.end(), s.values().begin()));
}

TEST_F(CliTest, CsvErrorsCarryLineNumbers) {
  auto expect_error = [&](const std::string& contents, const std::string& needle) {
    write("bad.csv", contents);
    try {
      read_series_csv(path("bad.csv"));
      ADD_FAILURE() << "no error for " << contents;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kParse);
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_error("index,value\n1,0.5\n2,abc\n", "bad.csv:3:");
  expect_error("value\n1\n", "bad.csv:1:");
  expect_error("index,value\n1,0.5\n3,0.7\n", "bad.csv:3:");
  expect_error("index,value\n1,nan\n", "bad.csv:2:");
}

TEST_F(CliTest, MissingFileNamesThePath) {
  EXPECT_EQ(tool("discrepancy --in " + path("nope.csv") + " --out " + path("d.json")), kExitData);
  EXPECT_NE(stderr_.find("nope.csv"), std::string::npos);
  EXPECT_EQ(std::count(stderr_.begin(), stderr_.end(), '\n'), 1);
  EXPECT_FALSE(fs::exists(path("d.json")));
}

TEST_F(CliTest, ConfigRoundTrips) {
  RunConfig c;
  c.algorithm = "dbf-dual";
  c.model.radius = 0.75;
  c.model.kernel = "rbf:0.5";
  c.model.order = {2, 1, 1};
  c.protocol.algorithms = {"edbf", "ridge"};
  c.protocol.recursive = false;
  c.protocol.grids["ridge"] = {{{"lambda1", 0.25}}};
  const json j = to_json(c);
  EXPECT_EQ(to_json(config_from_json(j)), j);
  EXPECT_EQ(json::parse(dump_json(j)), j);
}

TEST_F(CliTest, ConfigRejectsUnknownKeys) {
  RunConfig c;
  EXPECT_THROW(merge_json(c, json{{"modle", {{"lag", 2}}}}), Error);
  EXPECT_THROW(merge_json(c, json{{"model", {{"lags", 2}}}}), Error);
}

TEST_F(CliTest, FlagsOverrideConfigOverridesDefaults) {
  write("cfg.json", R"({"generator": {"length": 50, "dataset": "ads2"}, "seed": 4})");
  ASSERT_EQ(tool("generate --config " + path("cfg.json") + " --length 30 --out " + path("a.csv")), 0);
  const TimeSeries a = read_series_csv(path("a.csv"));
  EXPECT_EQ(a.size(), 30u);  // flag beats config
  ASSERT_EQ(tool("generate --dataset ads2 --length 30 --seed 4 --out " + path("b.csv")), 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));  // config beats defaults (dataset, seed)
}

TEST_F(CliTest, GenerateWritesHeaderAndRows) {
  ASSERT_EQ(tool("generate --dataset ads4 --length 100 --seed 7 --out " + path("a.csv")), 0);
  const std::string text = slurp(path("a.csv"));
  EXPECT_EQ(text.rfind("index,value\n", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 101);
  ASSERT_EQ(tool("generate --dataset ads4 --length 100 --seed 7 --out " + path("b.csv")), 0);
  EXPECT_EQ(text, slurp(path("b.csv")));
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(tool("generate --dataset ads9 --out " + path("a.csv")), kExitUsage);
  EXPECT_FALSE(fs::exists(path("a.csv")));
  EXPECT_EQ(tool("frobnicate"), kExitUsage);
  write("s.csv", series_csv(std::vector<double>(20, 1.0)));
  EXPECT_EQ(tool("fit --in " + path("s.csv") + " --algorithm prophet"), kExitUsage);
  EXPECT_EQ(tool("evaluate --in " + path("s.csv") + " --dataset ads1"), kExitUsage);
}

TEST_F(CliTest, ExitCodeMapping) {
  EXPECT_EQ(exit_code_for(ErrorKind::kNotPsd), kExitNumerical);
  EXPECT_EQ(exit_code_for(ErrorKind::kSingularSystem), kExitNumerical);
  EXPECT_EQ(exit_code_for(ErrorKind::kParse), kExitData);
  EXPECT_EQ(exit_code_for(ErrorKind::kSeriesTooShort), kExitData);
}

TEST_F(CliTest, ConstantSeriesHasZeroDiscrepancy) {
  write("c.csv", series_csv(std::vector<double>(40, 2.5)));
  ASSERT_EQ(tool("discrepancy --in " + path("c.csv") + " --out " + path("d.json")), 0);
  const json d = load("d.json");
  EXPECT_EQ(d["d"].size(), 37u);
  for (const json& v : d["d"]) EXPECT_LE(v.get<double>(), 1e-12);
  for (const char* key : {"s", "l", "lambda_cap", "kernel"}) EXPECT_TRUE(d.contains(key)) << key;
}

TEST_F(CliTest, OppositeRegimeHasLargerDiscrepancies) {
  // ads1: the proxy (last 20 points) sits in the alpha = 0.9 regime; rows
  // whose target falls in [1000, 2000] come from the alpha = -0.9 regime.
  for (int seed : {1, 2, 3}) {
    ASSERT_EQ(tool("generate --dataset ads1 --length 3000 --seed " + std::to_string(seed) + " --out " + path("a.csv")),
              0);
    ASSERT_EQ(tool("discrepancy --in " + path("a.csv") + " --out " + path("d.json")), 0);
    const std::vector<double> d = load("d.json")["d"].get<std::vector<double>>();
    std::vector<double> opposite, same;
    for (std::size_t t = 0; t < d.size(); ++t) (t + 4 >= 1000 && t + 4 <= 2000 ? opposite : same).push_back(d[t]);
    auto median = [](std::vector<double> v) {
      std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
      return v[v.size() / 2];
    };
    EXPECT_GT(median(opposite), median(same)) << "seed " << seed;
  }
}

TEST_F(CliTest, RidgeFitsALineExactly) {
  write("line.csv", series_csv(std::vector<double>{1, 2, 3, 4, 5}));
  ASSERT_EQ(tool("forecast --in " + path("line.csv") + " --algorithm ridge --lambda1 1e-9 --horizon 1 --out " +
                 path("f.json")),
            0)
      << stderr_;
  const json f = load("f.json");
  EXPECT_EQ(f["algorithm"], "ridge");
  EXPECT_NEAR(f["forecasts"][0].get<double>(), 6.0, 1e-6);
  for (const char* key : {"hyperparameters", "coefficients", "q", "objective_trace", "forecasts"}) {
    EXPECT_TRUE(f.contains(key)) << key;
  }
}

TEST_F(CliTest, PinnedDbfWeightsAreUniform) {
  ASSERT_EQ(tool("generate --dataset ads2 --length 200 --out " + path("a.csv")), 0);
  ASSERT_EQ(tool("fit --in " + path("a.csv") + " --algorithm dbf-alt --lambda2 1e9 --out " + path("f.json")), 0)
      << stderr_;
  const std::vector<double> q = load("f.json")["q"].get<std::vector<double>>();
  ASSERT_EQ(q.size(), 197u);
  for (double v : q) EXPECT_NEAR(v, 1.0 / 197.0, 1e-6);
}

TEST_F(CliTest, RandomWalkArimaRepeatsTheLastValue) {
  ASSERT_EQ(tool("generate --dataset ads1 --length 60 --out " + path("a.csv")), 0);
  ASSERT_EQ(tool("forecast --in " + path("a.csv") + " --algorithm arima --order 0,1,0 --horizon 2 --out " +
                 path("f.json")),
            0)
      << stderr_;
  const TimeSeries s = read_series_csv(path("a.csv"));
  const json f = load("f.json");
  EXPECT_EQ(f["forecasts"][0].get<double>(), s[59]);
  EXPECT_EQ(f["forecasts"][1].get<double>(), s[59]);
}

TEST_F(CliTest, ZeroSeriesEvaluatesToZero) {
  write("z.csv", series_csv(std::vector<double>(400, 0.0)));
  ASSERT_EQ(tool("evaluate --in " + path("z.csv") + " --algorithms zero --first 100 --step 100 --out " +
                 path("r.json")),
            0)
      << stderr_;
  EXPECT_EQ(load("r.json")["algorithms"]["zero"]["mean_mse"].get<double>(), 0.0);
}

TEST_F(CliTest, EvaluateReportSchemaAndDeterminism) {
  const std::string args = "evaluate --dataset ads1 --length 500 --first 300 --step 100 --algorithms tdbf,edbf,arima ";
  ASSERT_EQ(tool(args + "--emit-plots " + path("plots") + " --out " + path("r1.json"), "THREADS=1"), 0) << stderr_;
  ASSERT_EQ(tool(args + "--out " + path("r2.json"), "THREADS=1"), 0);
  ASSERT_EQ(tool(args + "--out " + path("r8.json"), "THREADS=8"), 0);
  EXPECT_EQ(slurp(path("r1.json")), slurp(path("r2.json")));
  EXPECT_EQ(slurp(path("r1.json")), slurp(path("r8.json")));
  const json r = load("r1.json");
  for (const char* name : {"tdbf", "edbf", "arima"}) {
    EXPECT_TRUE(r["algorithms"][name].contains("mean_mse"));
    EXPECT_TRUE(r["algorithms"][name].contains("std_mse"));
  }
  EXPECT_EQ(r["tests"].size(), 3u);
  for (const json& t : r["tests"]) EXPECT_TRUE(t.contains("p_a_less_b"));
  for (const char* f : {"running_mse.csv", "q_weights.csv", "forecasts.csv"}) {
    EXPECT_TRUE(fs::exists(dir_ / "plots" / f)) << f;
  }
}

TEST_F(CliTest, WriteIsAtomic) {
  write_file_atomic(path("x.txt"), "hello");
  EXPECT_EQ(slurp(path("x.txt")), "hello");
  for (const auto& entry : fs::directory_iterator(dir_)) {
    EXPECT_EQ(entry.path().filename().string().find(".tmp"), std::string::npos);
  }
  EXPECT_THROW(write_file_atomic(path("missing/dir/x.txt"), "x"), Error);
}

TEST_F(CliTest, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.0}) EXPECT_EQ(std::stod(format_double(v)), v);
}

}  // namespace
}  // namespace dbf::cli
