#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "sdefi/cli.hpp"

using namespace sdefi;
using namespace testing_support;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

json run_json(std::vector<std::string> args) {
  args.push_back("--output");
  args.push_back("json");
  const CliRun r = run(args);
  EXPECT_EQ(r.code, 0) << r.err;
  return json::parse(r.out);
}

std::string write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("sdefi_test_" + name);
  std::ofstream(path) << content;
  return path.string();
}

const char* kValid = R"({"dim": 1, "noise_dim": 1, "drift": [[{"c": ["1", "0"], "e": [1]}]],
  "diffusion": [[[{"c": ["1", "0"], "e": [1]}]]]})";

void expect_input_error(const std::string& text, const std::string& fragment) {
  try {
    parse_system_text(text);
    ADD_FAILURE() << "accepted: " << text;
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

}  // namespace

TEST(SystemFile, MinimalFileParses) {
  const SystemFile sf = parse_system_text(kValid);
  EXPECT_EQ(sf.system.dim(), 1u);
  EXPECT_EQ(sf.system.noise_dim(), 1u);
  EXPECT_EQ(sf.system.var_names, (std::vector<std::string>{"x1"}));
  EXPECT_TRUE(sf.candidates.empty());
}

TEST(SystemFile, RejectsMalformedInput) {
  expect_input_error("{not json", "JSON");
  expect_input_error(R"({"dim": 2, "noise_dim": 0, "drift": [[{"c": ["1", "0"], "e": [1]}], []], "diffusion": []})",
                     "exponent");
  expect_input_error(R"({"dim": 1, "noise_dim": 0, "drift": [[{"c": ["0.5", "0"], "e": [1]}]], "diffusion": []})",
                     "p/q");
  expect_input_error(R"({"dim": 1, "noise_dim": 0, "drift": [[{"c": [0.5, 0], "e": [1]}]], "diffusion": []})",
                     "1/2");
  expect_input_error(
      R"({"dim": 1, "noise_dim": 0, "drift": [[{"c": ["1", "0"], "e": [1]}, {"c": ["2", "0"], "e": [1]}]], "diffusion": []})",
      "duplicate");
  expect_input_error(R"({"dim": 1, "noise_dim": 2, "drift": [[{"c": ["1", "0"], "e": [1]}]],
    "diffusion": [[[{"c": ["1", "0"], "e": [1]}]]]})",
                     "noise");
  expect_input_error(R"({"dim": 2, "noise_dim": 0, "drift": [[]], "diffusion": []})", "component");
}

TEST(SystemFile, PolynomialTextComponents) {
  const SystemFile sf = parse_system_text(
      R"({"dim": 2, "noise_dim": 0, "var_names": ["p", "q"], "drift": ["q", "-p"], "diffusion": []})");
  EXPECT_EQ(sf.system.drift[0], P("x2", xs(2)));
  EXPECT_TRUE(check_strong(sf.system, P("x1^2 + x2^2", xs(2))).holds);
}

TEST(SystemFile, RoundTripOfEveryFixture) {
  for (const auto& name : fixture_names()) {
    const SystemFile a = load(name);
    const SystemFile b = parse_system_json(system_file_to_json(a));
    EXPECT_EQ(a.system.drift, b.system.drift) << name;
    EXPECT_EQ(a.system.diffusions.size(), b.system.diffusions.size());
    for (std::size_t i = 0; i < a.system.diffusions.size(); ++i) EXPECT_EQ(a.system.diffusions[i], b.system.diffusions[i]);
    EXPECT_EQ(a.system.var_names, b.system.var_names);
    EXPECT_EQ(a.candidates, b.candidates);
    EXPECT_EQ(a.x0, b.x0);
    EXPECT_EQ(system_file_to_json(b), system_file_to_json(a));
  }
}

TEST(Candidate, InlineTextAndFile) {
  const auto names = xs(2);
  EXPECT_EQ(parse_candidate("x1*x2", names), P("x1*x2", names));
  const std::string path = write_temp("cand.txt", "x1^2 - 1/3*x2\n");
  EXPECT_EQ(parse_candidate(path, names), P("x1^2 - 1/3*x2", names));
}

TEST(Cli, SearchFindsGbmInverse) {
  const json j = run_json({"search", system_path("gbm"), "--dmin", "-1", "--dmax", "1"});
  EXPECT_EQ(j["command"], "search");
  ASSERT_EQ(j["result"]["basis"].size(), 1u);
  EXPECT_EQ(j["result"]["basis"][0]["text"], "x^-1");
}

TEST(Cli, ResonanceVerdictSchema) {
  const json j = run_json({"resonance", system_path("lotka_volterra3")});
  bool found = false;
  for (const auto& v : j["resonance"]["verdicts"]) {
    for (const char* key : {"verdict", "theorem", "hypotheses_checked", "epistemic_status"})
      EXPECT_TRUE(v.contains(key)) << key;
    if (v["verdict"] == "NO_WEAK_ANALYTIC") {
      found = true;
      EXPECT_EQ(v["epistemic_status"], "certified");
    }
  }
  EXPECT_TRUE(found);
}

TEST(Cli, CheckCommandsUseFileCandidates) {
  const json strong = run_json({"check-strong", system_path("two_body")});
  ASSERT_EQ(strong["results"].size(), 2u);
  const json weak = run_json({"check-weak", system_path("two_body"), "--candidate", "r^2*w"});
  ASSERT_EQ(weak["results"].size(), 1u);
  EXPECT_EQ(weak["results"][0]["holds"], true);
}

TEST(Cli, AnalyzeReportsInapplicableResonance) {
  const json j = run_json({"analyze", system_path("two_body"), "--dmax", "2"});
  EXPECT_EQ(j["resonance"]["applicable"], false);
  EXPECT_EQ(j["search"].size(), 2u);
  EXPECT_EQ(j["candidates"].size(), 2u);
}

TEST(Cli, AnalyzeWithSimulation) {
  const json j = run_json({"analyze", system_path("gbm"), "--dmin", "-1", "--dmax", "1", "--simulate", "--seed", "5",
                           "--paths", "200", "--step", "0.01"});
  ASSERT_TRUE(j.contains("simulation"));
  EXPECT_EQ(j["simulation"]["tests"].size(), 1u);
}

TEST(Cli, PerturbHarmonic) {
  const json j = run_json({"perturb", system_path("harmonic")});
  EXPECT_EQ(j["verification"]["result"], "PASS");
  EXPECT_EQ(j["plan"]["exponents"], json::array({1, 2}));
}

TEST(Cli, SimulateTextOutputAndSeedRequirement) {
  const CliRun ok = run({"simulate", system_path("gbm"), "--seed", "1", "--paths", "100", "--step", "0.01"});
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_NE(ok.out.find("inverse"), std::string::npos);
  const CliRun missing = run({"simulate", system_path("gbm")});
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("--seed"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"search", system_path("gbm"), "--bogus"}).code, 2);
  EXPECT_EQ(run({"search", "/nonexistent/system.json"}).code, 2);
  EXPECT_EQ(run({"search", write_temp("bad.json", "{")}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
  // Repeated eigenvalues make the perturbation inapplicable: an input-side failure.
  const std::string identity = write_temp(
      "identity.json", R"({"dim": 2, "noise_dim": 0, "drift": ["x1", "x2"], "diffusion": []})");
  EXPECT_EQ(run({"perturb", identity}).code, 2);
  // A vanishing residual at the requested u is recovered by the seeded retries.
  const std::string resonant = write_temp(
      "resonant.json", R"({"dim": 1, "noise_dim": 0, "drift": ["-1/8*x1"], "diffusion": []})");
  EXPECT_EQ(run({"perturb", resonant, "--u", "0.5", "--lbound", "2"}).code, 0);
}
