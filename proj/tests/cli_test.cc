#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "json.hpp"
#include "test_util.h"

namespace xqa {
namespace {

using nlohmann::json;
using testing::data_path;
using testing::run_command;
using testing::temp_path;

std::string xqa(const std::string &args) { return std::string(XQA_BIN) + " " + args + " 2>/dev/null"; }

std::string slurp(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Cli, EvaluateMatchesFrozenMetrics) {
  auto r = run_command(xqa("evaluate --corpus " + data_path("fixture20.json").string() + " --pred " +
                           data_path("fixture20_pred.json").string()));
  ASSERT_EQ(r.exit_code, 0);
  json got = json::parse(r.out);
  json want = json::parse(slurp(data_path("fixture20_expected_metrics.json")));
  EXPECT_NEAR(got["answer"]["f1"].get<double>(), want["f1"].get<double>(), 1e-6);
  EXPECT_NEAR(got["sp"]["em"].get<double>(), want["sp_em"].get<double>(), 1e-6);
  EXPECT_NEAR(got["joint"]["f1"].get<double>(), want["joint_f1"].get<double>(), 1e-6);
  EXPECT_GT(got["missing_answer"].get<int>(), 0);
}

TEST(Cli, StrictMissingPredictionIsInputError) {
  auto r = run_command(xqa("evaluate --strict --corpus " + data_path("fixture20.json").string() + " --pred " +
                           data_path("fixture20_pred.json").string()));
  EXPECT_EQ(r.exit_code, 2);
}

TEST(Cli, InputErrorsExitTwo) {
  EXPECT_EQ(run_command(xqa("evaluate --corpus /nonexistent.json --pred /nonexistent.json")).exit_code, 2);
  EXPECT_EQ(run_command(xqa("probe --corpus x.json")).exit_code, 2);
  EXPECT_EQ(run_command(xqa("bogus")).exit_code, 2);
  EXPECT_EQ(run_command(xqa("probe --corpus " + data_path("micro5.json").string() + " --adapter grpc:x")).exit_code,
            2);
  EXPECT_EQ(run_command(xqa("regcost --pa 1.5 --pe 0.5")).exit_code, 2);
  EXPECT_EQ(run_command(xqa("--help")).exit_code, 0);
}

TEST(Cli, AdapterFailureExitsThree) {
  std::string cmd = "probe --corpus " + data_path("micro5.json").string() + " --adapter 'cmd:" +
                    std::string(XQA_STUB_MODEL) + " garbage'";
  EXPECT_EQ(run_command(xqa(cmd)).exit_code, 3);
}

TEST(Cli, ProbeIsByteIdenticalAcrossWorkerCounts) {
  std::string base = "probe --corpus " + data_path("fixture20.json").string() + " --adapter ref:decoupled";
  auto one = run_command(xqa(base + " --workers 1"));
  auto four = run_command(xqa(base + " --workers 4"));
  ASSERT_EQ(one.exit_code, 0);
  ASSERT_EQ(four.exit_code, 0);
  EXPECT_EQ(one.out, four.out);
  json j = json::parse(one.out);
  EXPECT_EQ(j["n"], 20);
  EXPECT_TRUE(j["skipped"].empty());
}

TEST(Cli, ProbeWritesCurveCsv) {
  auto csv = temp_path("curve.csv"), out = temp_path("probe.json");
  auto r = run_command(xqa("probe --corpus " + data_path("micro5.json").string() +
                           " --adapter ref:coupled --kmax 2 --out " + out.string() + " --curve-csv " + csv.string()));
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(json::parse(slurp(out))["k_max"], 2);
  std::string text = slurp(csv);
  EXPECT_EQ(text.rfind("k,c_rel,c_irr,farm\n0,", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}

TEST(Cli, RegcostSingleAndBatch) {
  auto r = run_command(xqa("regcost --pa 0.5 --pe 0.5"));
  ASSERT_EQ(r.exit_code, 0);
  json j = json::parse(r.out);
  EXPECT_NEAR(j["j"].get<double>(), 2.52, 1e-6);
  r = run_command(xqa("regcost --pa 1 --pe 0 --preset sf"));
  EXPECT_NEAR(json::parse(r.out)["j"].get<double>(), 1.18, 1e-6);
  r = run_command(xqa("regcost --pa 0 --pe 0 --c3 7"));
  EXPECT_NEAR(json::parse(r.out)["j"].get<double>(), 7.0, 1e-6);

  auto batch = temp_path("reg.json");
  std::ofstream(batch) << R"({"pa": [1, 0, 1], "pe": [1, 1, 0]})";
  r = run_command(xqa("regcost --json " + batch.string()));
  ASSERT_EQ(r.exit_code, 0);
  json rows = json::parse(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NEAR(rows[0]["j"].get<double>(), 0.0, 1e-9);
  EXPECT_NEAR(rows[1]["j"].get<double>(), 2.02, 1e-6);
  EXPECT_NEAR(rows[2]["j"].get<double>(), 4.96, 1e-6);
  EXPECT_NEAR(rows[0]["d_pa"].get<double>(), -2.02, 1e-6);
}

TEST(Cli, Agree) {
  auto a = temp_path("cli_a.csv"), b = temp_path("cli_b.csv");
  std::ofstream(a) << "qi,1\nsf,2\nreg,3\n";
  std::ofstream(b) << "qi,10\nsf,20\nreg,30\n";
  auto r = run_command(xqa("agree --a " + a.string() + " --b " + b.string()));
  ASSERT_EQ(r.exit_code, 0);
  json j = json::parse(r.out);
  EXPECT_EQ(j["relation"], "same");
  EXPECT_EQ(j["symbol"], "+");
  EXPECT_NEAR(j["pearson"].get<double>(), 1.0, 1e-6);
}

TEST(Cli, PredictThenEvaluate) {
  auto pred = temp_path("pred.json");
  auto r = run_command(xqa("predict --corpus " + data_path("fixture20.json").string() +
                           " --adapter ref:coupled --workers 2 --out " + pred.string()));
  ASSERT_EQ(r.exit_code, 0);
  r = run_command(xqa("evaluate --strict --corpus " + data_path("fixture20.json").string() + " --pred " +
                      pred.string()));
  ASSERT_EQ(r.exit_code, 0);
  json j = json::parse(r.out);
  EXPECT_EQ(j["n"], 20);
  EXPECT_GT(j["answer"]["f1"].get<double>(), 0.5);
}

}  // namespace
}  // namespace xqa
