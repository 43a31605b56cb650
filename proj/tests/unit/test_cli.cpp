#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "blade/cli.hpp"
#include "blade/kb.hpp"
#include "blade/mcdm.hpp"
#include "blade/service.hpp"

using namespace blade;

namespace {

struct Run {
  ExitCode code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const auto code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

const std::string kKb = BLADE_DATA_DIR "/fixture_kb.json";
const std::string kReqs = BLADE_DATA_DIR "/sample_requirements.toml";
const std::string kBpmn = BLADE_DATA_DIR "/sample_process.bpmn";
const std::string kParams = BLADE_DATA_DIR "/sample_params.json";
const std::string kWorkload = BLADE_DATA_DIR "/sample_workload.json";

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("blade_cli_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string write_temp(const std::string& name, const std::string& content) {
  const auto p = scratch(name);
  std::ofstream(p) << content;
  return p.string();
}

}  // namespace

TEST(Cli, EvaluateTable) {
  const auto r = run({"evaluate", "-k", kKb, "-r", kReqs});
  ASSERT_EQ(r.code, ExitCode::success) << r.err;
  EXPECT_NE(r.out.find("rank"), std::string::npos);
  EXPECT_NE(r.out.find("bitcoin:"), std::string::npos);
}

TEST(Cli, EvaluateJsonEqualsService) {
  const auto r = run({"evaluate", "-k", kKb, "-r", kReqs, "--format", "json"});
  ASSERT_EQ(r.code, ExitCode::success) << r.err;
  Service s(load_knowledge_base_file(kKb));
  EXPECT_EQ(r.out, s.handle("POST", "/evaluate", to_json(parse_requirements_file(kReqs)).dump()).body);
}

TEST(Cli, EvaluateWithBpmnMergesEmbeddedRequirements) {
  const auto r = run({"evaluate", "-k", kKb, "-r", kReqs, "--bpmn", kBpmn, "--format", "json"});
  ASSERT_EQ(r.code, ExitCode::success) << r.err;
  const auto j = json::parse(r.out);
  bool ethereum_out = false;
  for (const auto& e : j["eliminations"]) ethereum_out = ethereum_out || e["id"] == "ethereum";
  EXPECT_TRUE(ethereum_out);
}

TEST(Cli, KbFromEnvironment) {
  ::setenv("BLADE_KB", kKb.c_str(), 1);
  const auto r = run({"validate"});
  ::unsetenv("BLADE_KB");
  EXPECT_EQ(r.code, ExitCode::success) << r.err;
  EXPECT_NE(r.out.find("13 criteria, 5 profiles"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, ExitCode::io_or_format);
  EXPECT_EQ(run({"--help"}).code, ExitCode::success);
  EXPECT_EQ(run({"evaluate", "-k", kKb}).code, ExitCode::io_or_format);
  EXPECT_EQ(run({"evaluate", "-k", "/nonexistent.json", "-r", kReqs}).code, ExitCode::io_or_format);
  const auto bad = write_temp("bad.toml", "[preferences]\nghost = 0.5\n");
  const auto r = run({"evaluate", "-k", kKb, "-r", bad});
  EXPECT_EQ(r.code, ExitCode::validation);
  EXPECT_NE(r.err.find("ghost"), std::string::npos);
  const auto garbled = write_temp("garbled.toml", "[preferences\n");
  EXPECT_EQ(run({"evaluate", "-k", kKb, "-r", garbled}).code, ExitCode::io_or_format);
  EXPECT_EQ(run({"validate", "-k", kKb, "-r", bad}).code, ExitCode::validation);
  EXPECT_EQ(run({"refine", "-k", kKb, "--profile", "nope", "-p", kParams, "-w", kWorkload, "-o",
                 scratch("never.json").string()})
                .code,
            ExitCode::validation);
}

TEST(Cli, SimulateWritesCsv) {
  const auto csv = scratch("occupancy.csv");
  const auto r = run({"simulate", "-p", kParams, "-w", kWorkload, "-d", "100", "--csv", csv.string()});
  ASSERT_EQ(r.code, ExitCode::success) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["submitted"].get<int>(), j["committed"].get<int>() + j["pending"].get<int>());
  EXPECT_TRUE(std::filesystem::exists(csv));
  EXPECT_EQ(run({"simulate", "-p", kParams, "-w", kWorkload, "-d", "1"}).code, ExitCode::validation);
}

TEST(Cli, RefineWritesNewKb) {
  const auto out = scratch("refined.json");
  const auto r = run({"refine", "-k", kKb, "--profile", "quorum", "-p", kParams, "-w", kWorkload,
                      "-o", out.string()});
  ASSERT_EQ(r.code, ExitCode::success) << r.err;
  EXPECT_EQ(load_knowledge_base_file(out.string()).kb_version, 2);
}

TEST(Cli, GenerateWritesStubs) {
  const auto dir = scratch("stubs");
  const auto r = run({"generate", "-k", kKb, "-r", kReqs, "--bpmn", kBpmn, "--rate", "2", "-o",
                      dir.string()});
  ASSERT_EQ(r.code, ExitCode::success) << r.err;
  for (const char* f : {"architecture.json", "contract.json", "deploy.yaml"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  std::filesystem::remove_all(dir);
}

TEST(Cli, GenerateWithNoSurvivorsFails) {
  const auto reqs = write_temp("impossible.toml",
                               "[strict]\nthroughput-tps = \"at-least 1e9\"\n[preferences]\nlatency-s = 1\n");
  EXPECT_EQ(run({"generate", "-k", kKb, "-r", reqs, "--bpmn", kBpmn, "-o", scratch("x").string()}).code,
            ExitCode::validation);
}
