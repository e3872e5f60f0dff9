#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "testutil.hpp"

using nlohmann::json;
using tiltcert::testing::instance_path;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + TILTCERT_CLI_PATH + " " + args + " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string inst(const std::string& f) { return instance_path(f); }

std::string line_value(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    const auto pos = line.find(key + ": ");
    if (pos != std::string::npos) {
      std::string rest = line.substr(pos + key.size() + 2);
      return rest.substr(0, rest.find(' '));
    }
  }
  return "";
}

bool have_jsonschema() { return std::system("python3 -c 'import jsonschema' >/dev/null 2>&1") == 0; }

bool validates(const std::string& doc) {
  const std::string path = ::testing::TempDir() + "tiltcert_doc.json";
  std::ofstream(path) << doc;
  const std::string schema = std::string(TILTCERT_SCHEMA_PATH);
  const std::string cmd = "python3 -c \"import json,jsonschema; jsonschema.validate(json.load(open('" + path +
                          "')), json.load(open('" + schema + "')))\" >/dev/null 2>&1";
  return std::system(cmd.c_str()) == 0;
}

}  // namespace

TEST(Cli, CertifyE1Json) {
  const Result r = run("certify " + inst("e1.json") + " --format json");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_EQ(j["final"], "TILT_STABLE_CERTIFIED");
  EXPECT_EQ(j["policy"]["seed"], 7);
}

TEST(Cli, SimulateE3Csv) {
  const Result r = run("simulate " + inst("e3.json") + " --tilts 32 --seed 7");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("index,scale,norm_v", 0), 0u);
  EXPECT_NE(r.out.find("# oracle: UnstableLikely"), std::string::npos);
  std::istringstream in(r.out);
  int rows = 0;
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') ++rows;
  EXPECT_EQ(rows, 1 + 32 + 31);
}

TEST(Cli, AnalyzeInteriorPoint) {
  const Result r = run("analyze " + inst("interior.json") + " --format json");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_TRUE(j["stationary"].get<bool>());
  EXPECT_TRUE(j["partition"]["gamma"].empty());
  for (const auto& row : j["multiplier"]["S"])
    for (const auto& v : row) EXPECT_EQ(v.get<double>(), 0.0);
}

TEST(Cli, StrictExitCode) {
  EXPECT_EQ(run("certify " + inst("e4.json")).code, 0);
  EXPECT_EQ(run("certify " + inst("e4.json") + " --strict").code, 2);
  EXPECT_EQ(run("certify " + inst("e1.json") + " --strict").code, 0);
}

TEST(Cli, ErrorsAreMachineReadable) {
  Result r = run("certify " + inst("missing.json") + " --format json");
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(json::parse(r.out)["error"]["code"], "ParseError");
  const std::string pt = ::testing::TempDir() + "tiltcert_bad_point.json";
  std::ofstream(pt) << "[[0, 0], [0, 1]]";
  r = run("certify " + inst("e1.json") + " --point " + pt + " --format json");
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(json::parse(r.out)["error"]["code"], "NotStationary");
  EXPECT_EQ(run("certify " + inst("e1.json") + " --tol-feas -1").code, 1);
  EXPECT_EQ(run("explode " + inst("e1.json")).code, 1);
  EXPECT_EQ(run("certify " + inst("e1.json") + " --format yaml").code, 1);
}

TEST(Cli, PointFileAndSolve) {
  const std::string pt = ::testing::TempDir() + "tiltcert_point.json";
  std::ofstream(pt) << "[[1, 0], [0, 0]]";
  const Result a = run("certify " + inst("e1.json") + " --point " + pt + " --format json");
  const Result b = run("certify " + inst("e1.json") + " --point solve --format json");
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(json::parse(a.out)["final"], "TILT_STABLE_CERTIFIED");
  EXPECT_EQ(json::parse(b.out)["final"], "TILT_STABLE_CERTIFIED");
}

TEST(Cli, DeterministicJson) {
  const std::string args = "report " + inst("e3.json") + " --tilts 5 --format json --deterministic";
  const Result a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.find("generated_at"), std::string::npos);
  EXPECT_NE(run("certify " + inst("e1.json") + " --format json").out.find("generated_at"), std::string::npos);
}

TEST(Cli, SeedFromEnvironment) {
  const Result r = run("certify " + inst("e1.json") + " --format json", "TILTCERT_SEED=99");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["policy"]["seed"], 99);
  const Result f = run("certify " + inst("e1.json") + " --format json --seed 5", "TILTCERT_SEED=99");
  EXPECT_EQ(json::parse(f.out)["policy"]["seed"], 5);
}

TEST(Cli, TextAndJsonCarrySameVerdicts) {
  for (const char* f : {"e1.json", "e2.json", "e3.json", "e4.json"}) {
    const Result t = run(std::string("certify ") + inst(f));
    const Result j = run(std::string("certify ") + inst(f) + " --format json");
    ASSERT_EQ(t.code, 0);
    const json doc = json::parse(j.out);
    EXPECT_EQ(line_value(t.out, "final"), doc["final"].get<std::string>()) << f;
    for (const auto& v : doc["verdicts"])
      EXPECT_EQ(line_value(t.out, v["condition"].get<std::string>()), v["status"].get<std::string>()) << f;
  }
}

TEST(Cli, ReportAgreementFlag) {
  const Result r = run("report " + inst("e1.json") + " --format json --tilts 8");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_EQ(j["agreement"], "agree");
  EXPECT_EQ(j["simulate"]["oracle"], "StableLikely");
}

TEST(Cli, CsvSideOutput) {
  const std::string path = ::testing::TempDir() + "tiltcert_profile.csv";
  std::remove(path.c_str());
  ASSERT_EQ(run("simulate " + inst("e1.json") + " --tilts 3 --format json --csv " + path).code, 0);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("index,", 0), 0u);
}

TEST(Cli, OutputsValidateAgainstSchema) {
  if (!have_jsonschema()) GTEST_SKIP() << "python3 jsonschema not available";
  const std::vector<std::string> cmds{
      "certify " + inst("e1.json"),       "certify " + inst("e3.json"),
      "certify " + inst("e4.json"),       "analyze " + inst("e4.json"),
      "analyze " + inst("interior.json"), "simulate " + inst("e1.json") + " --tilts 1",
      "report " + inst("e2.json") + " --tilts 4", "certify " + inst("missing.json"),
      "certify " + inst("tiny.dat-s")};
  for (const std::string& c : cmds) {
    const Result r = run(c + " --format json");
    EXPECT_TRUE(validates(r.out)) << c;
  }
}
