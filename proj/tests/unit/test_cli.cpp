#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "noncollapse/io.hpp"

using namespace noncollapse;
using namespace noncollapse::cli;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("noncollapse_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
};

std::string small_flow_config() {
  return R"({"speed": "harmonic", "body": {"mode": "curve", "N": 32, "shape": "ellipse", "a": 1, "b": 1.3},
             "stop_max_f": 30, "snapshot_every": 100})";
}

}  // namespace

TEST(Certify, ReportsBothPropertiesAndExitCodes) {
  std::ostringstream out, err;
  ASSERT_EQ(cmd_certify({.speed = "harmonic", .n = 3, .trials = 200}, out, err), kOk);
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_EQ(j["reports"].size(), 2u);
  EXPECT_TRUE(j["certified"].get<bool>());
  std::ostringstream o2, e2;
  EXPECT_EQ(cmd_certify({.speed = "power:-2", .n = 2, .property = "inverse-concave", .trials = 200}, o2, e2),
            kRefuted);
  const auto r = nlohmann::json::parse(o2.str());
  EXPECT_FALSE(r["reports"][0]["witness"].is_null());
  std::ostringstream o3, e3;
  EXPECT_EQ(cmd_certify({.speed = "cubic", .n = 2}, o3, e3), kUsage);
  EXPECT_FALSE(e3.str().empty());
}

TEST(Oracle, BoundarySuitePassesAndNegativeControlIsRefuted) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_oracle({.prop = "2.5", .speed = "harmonic", .n = 3, .trials = 2000}, out, err), kOk);
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_EQ(j["proposition"], "2.5");
  EXPECT_GE(j["min_value"].get<double>(), -1e-7);
  std::ostringstream o2, e2;
  EXPECT_EQ(cmd_oracle({.prop = "2.2", .speed = "power:-2", .n = 2, .trials = 100000}, o2, e2), kRefuted);
  const auto w = nlohmann::json::parse(o2.str());
  EXPECT_TRUE(w.contains("witness"));
  EXPECT_LT(w["min_value"].get<double>(), -1e-4);
  std::ostringstream o3, e3;
  EXPECT_EQ(cmd_oracle({.prop = "3.1", .speed = "mean", .n = 2}, o3, e3), kUsage);
}

TEST(Oracle, OutputFileMatchesStdout) {
  Scratch s("oracle_out");
  std::ostringstream out, err, quiet, err2;
  cmd_oracle({.prop = "2.5", .speed = "mean", .n = 2, .trials = 100, .seed = 4}, out, err);
  cmd_oracle({.prop = "2.5", .speed = "mean", .n = 2, .trials = 100, .seed = 4, .out = (s.dir / "o.json").string()},
             quiet, err2);
  EXPECT_EQ(read_file(s.dir / "o.json"), out.str());
}

TEST(Flow, WritesTheRunDirectoryDeterministically) {
  Scratch s("flow");
  write_file_atomic(s.dir / "cfg.json", small_flow_config());
  std::ostringstream out, err;
  const FlowOptions o{.config = (s.dir / "cfg.json").string(), .out = (s.dir / "a").string()};
  ASSERT_EQ(cmd_flow(o, out, err), kOk) << err.str();
  for (const char* f : {"manifest.json", "config.json", "monitor.csv", "roundness.csv", "verdicts.json"})
    EXPECT_TRUE(fs::exists(s.dir / "a" / f)) << f;
  EXPECT_FALSE(fs::exists(s.dir / "a" / "timing.json"));
  const auto manifest = nlohmann::json::parse(read_file(s.dir / "a" / "manifest.json"));
  EXPECT_EQ(manifest["status"], "complete");
  EXPECT_EQ(manifest["termination"], "ReachedMaxF");
  const auto verdicts = nlohmann::json::parse(read_file(s.dir / "a" / "verdicts.json"));
  EXPECT_TRUE(verdicts["pass"].get<bool>());

  FlowOptions again = o;
  again.out = (s.dir / "b").string();
  ASSERT_EQ(cmd_flow(again, out, err), kOk);
  for (const auto& e : fs::recursive_directory_iterator(s.dir / "a")) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), s.dir / "a");
    EXPECT_EQ(read_file(e.path()), read_file(s.dir / "b" / rel)) << rel;
  }
}

TEST(Flow, OverridesTimingAndErrors) {
  Scratch s("flow_errors");
  write_file_atomic(s.dir / "cfg.json", small_flow_config());
  std::ostringstream out, err;
  FlowOptions o{.config = (s.dir / "cfg.json").string(), .out = (s.dir / "t").string(), .grid = 16,
                .stop_max_f = 5.0, .timing = true};
  ASSERT_EQ(cmd_flow(o, out, err), kOk) << err.str();
  EXPECT_TRUE(fs::exists(s.dir / "t" / "timing.json"));
  const auto cfg = nlohmann::json::parse(read_file(s.dir / "t" / "config.json"));
  EXPECT_EQ(cfg["body"]["N"], 16);

  EXPECT_EQ(cmd_flow({.config = (s.dir / "nope.json").string(), .out = (s.dir / "x").string()}, out, err), kUsage);
  EXPECT_EQ(cmd_flow({.config = (s.dir / "cfg.json").string(), .out = ""}, out, err), kUsage);
  EXPECT_EQ(cmd_flow({.config = (s.dir / "cfg.json").string(), .out = (s.dir / "y").string(), .cfl = 2.0}, out, err),
            kUsage);
}

TEST(Flow, NonConvexStartExitsWithConvexityLost) {
  Scratch s("flow_nonconvex");
  std::string h;
  for (int j = 0; j < 32; ++j) h += (j ? "," : "") + format_double(1.0 + 0.2 * std::cos(4 * 2 * M_PI * j / 32));
  write_file_atomic(s.dir / "cfg.json", R"({"body": {"mode": "curve", "shape": "samples", "h": [)" + h + "]}}");
  std::ostringstream out, err;
  EXPECT_EQ(cmd_flow({.config = (s.dir / "cfg.json").string(), .out = (s.dir / "r").string()}, out, err),
            kConvexityLost);
  const auto manifest = nlohmann::json::parse(read_file(s.dir / "r" / "manifest.json"));
  EXPECT_EQ(manifest["status"], "convexity-lost");
}

TEST(Report, TablesRunsAndSkipsIncompleteOnes) {
  Scratch s("report");
  write_file_atomic(s.dir / "cfg.json", small_flow_config());
  std::ostringstream out, err;
  ASSERT_EQ(cmd_flow({.config = (s.dir / "cfg.json").string(), .out = (s.dir / "r1").string()}, out, err), kOk);
  ASSERT_EQ(cmd_flow({.config = (s.dir / "cfg.json").string(), .out = (s.dir / "r2").string(), .grid = 64}, out, err),
            kOk);
  fs::create_directories(s.dir / "junk");
  std::ostringstream table, warn;
  const std::string json_out = (s.dir / "report.json").string();
  ASSERT_EQ(cmd_report({.runs = {(s.dir / "r1").string(), (s.dir / "r2").string(), (s.dir / "junk").string()},
                        .out = json_out},
                       table, warn),
            kOk);
  EXPECT_NE(warn.str().find("junk"), std::string::npos);
  const auto j = nlohmann::json::parse(read_file(json_out));
  EXPECT_EQ(j["runs"].size(), 2u);
  ASSERT_EQ(j["refinement"].size(), 1u);
  EXPECT_EQ(j["refinement"][0]["coarse"], (s.dir / "r1").string());
  EXPECT_EQ(j["refinement"][0]["fine"], (s.dir / "r2").string());

  std::ostringstream t2, w2;
  EXPECT_EQ(cmd_report({.runs = {}}, t2, w2), kUsage);
  EXPECT_EQ(cmd_report({.runs = {(s.dir / "junk").string()}}, t2, w2), kUsage);
}

TEST(RunCli, VersionHelpAndUsage) {
  const char* version[] = {"noncollapse", "--version"};
  EXPECT_EQ(run_cli(2, const_cast<char**>(version)), kOk);
  const char* bad[] = {"noncollapse", "oracle", "--prop"};
  EXPECT_EQ(run_cli(3, const_cast<char**>(bad)), kUsage);
  const char* unknown[] = {"noncollapse", "frobnicate"};
  EXPECT_EQ(run_cli(2, const_cast<char**>(unknown)), kUsage);
}
