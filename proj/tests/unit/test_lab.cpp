#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "holderlab/lab.hpp"

using namespace holderlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "holderlab_lab_tests" / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int line_count(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

ErrorKind config_error(const std::string& text) {
  try {
    ExperimentConfig::from_json(text);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "config accepted: " << text;
  return ErrorKind::InvalidArgument;
}

const char* kPowerAnalyze = R"({
  "kind": "analyze",
  "reference": {"kind": "power_profile", "s": 0.75},
  "field": "reference",
  "grid": {"dim": 1, "x": [-1, 1], "nx": 513, "t": [0, 0.25], "nt": 1025},
  "analysis": {"center": {"x": 0, "t": 0.25}, "theta": 2, "lambda": 0.5, "k_max": 5,
               "base_radius": 0.5}
})";

}  // namespace

TEST(Config, RejectsMalformedInput) {
  EXPECT_EQ(config_error("{"), ErrorKind::ConfigInvalid);
  EXPECT_EQ(config_error(R"({"kind": "exponents", "bogus": 1})"), ErrorKind::ConfigInvalid);
  EXPECT_EQ(config_error(R"({"kind": "transmogrify"})"), ErrorKind::ConfigInvalid);
  EXPECT_EQ(config_error(R"({"kind": "exponents", "equation": {"class": "elliptic"}})"),
            ErrorKind::ConfigInvalid);
  EXPECT_EQ(config_error(R"({"kind": "exponents", "q": 0.5})"), ErrorKind::ConfigInvalid);
  EXPECT_EQ(config_error(R"({"kind": "exponents", "equation": {"class": "p-parabolic", "p": 1}})"),
            ErrorKind::ConfigInvalid);
  try {
    ExperimentConfig::from_json(R"({"kind": "exponents", "grid": {"nx": "many"}})");
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("grid"), std::string::npos);
  }
}

TEST(Config, RoundTripsThroughJson) {
  const auto cfg = ExperimentConfig::from_json(kPowerAnalyze);
  const auto back = ExperimentConfig::from_json(cfg.to_json());
  EXPECT_EQ(back.to_json(), cfg.to_json());
  EXPECT_EQ(back.kind, ExperimentKind::Analyze);
  EXPECT_EQ(back.grid.nx, 513);
}

TEST(Catalog, EveryEntryParses) {
  const auto names = catalog_names();
  EXPECT_GE(names.size(), 8u);
  for (const auto& n : names) {
    const auto cfg = catalog_config(n);
    EXPECT_EQ(cfg.name, n);
    EXPECT_FALSE(cfg.description.empty());
  }
  EXPECT_THROW(catalog_config("no-such-experiment"), Error);
}

TEST(Run, ExponentsExample) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::Exponents;
  cfg.equation = EquationParams::p_parabolic(3, 3);
  cfg.q = 2;
  const auto art = run_experiment(cfg);
  EXPECT_EQ(art.exit_code(), 0);
  EXPECT_NEAR(art.metrics.at("alpha"), 0.75, 1e-15);
  EXPECT_NEAR(art.metrics.at("theta"), 2.25, 1e-15);
  EXPECT_NEAR(art.metrics.at("alpha_time"), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(art.labels.at("branch"), "source-limited");
}

TEST(Run, AdmissibleExample) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::Admissible;
  cfg.equation = EquationParams::p_parabolic(2, 2);
  cfg.q = 3;
  cfg.r = 4;
  const auto art = run_experiment(cfg);
  EXPECT_EQ(art.metrics.at("admissible"), 1.0);
  EXPECT_NEAR(art.metrics.at("borderline1.lhs"), 0.25 + 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(art.metrics.at("borderline2.lhs"), 0.5 + 2.0 / 3.0, 1e-15);
}

TEST(Run, ExitCodes) {
  auto cfg = catalog_config("p-parabolic-exponents");
  EXPECT_EQ(run_experiment(cfg).exit_code(), 0);

  cfg.assertions = {{"alpha", 0.9, std::nullopt}};
  const auto failed = run_experiment(cfg);
  EXPECT_EQ(failed.exit_code(), 1);
  EXPECT_FALSE(failed.assertions.at(0).passed);

  ExperimentConfig analyze;
  analyze.kind = ExperimentKind::Analyze;
  EXPECT_EQ(run_experiment(analyze).exit_code(), 2);

  const auto blow = ExperimentConfig::from_json(R"({
    "kind": "solve", "equation": {"class": "heat", "n": 1},
    "initial": {"kind": "constant", "value": 1e308},
    "grid": {"dim": 1, "x": [0, 1], "nx": 21, "t": [0, 0.1], "nt": 3}
  })");
  const auto art = run_experiment(blow);
  EXPECT_EQ(art.exit_code(), 3);
  ASSERT_TRUE(art.error_kind.has_value());
  EXPECT_EQ(*art.error_kind, ErrorKind::BlowUp);
}

TEST(Report, EmptyArtifactsWriteOnlyJson) {
  RunArtifacts art;
  const auto dir = scratch("empty");
  const auto files = emit_report(art, dir, {ReportFormat::Csv, ReportFormat::Svg});
  ASSERT_EQ(files.size(), 1u);
  EXPECT_EQ(files[0].filename(), "manifest.json");
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  EXPECT_NE(slurp(dir / "manifest.json").find("\"status\""), std::string::npos);
}

TEST(Report, ProfileTableAndPlot) {
  const auto art = run_experiment(ExperimentConfig::from_json(kPowerAnalyze));
  ASSERT_EQ(art.exit_code(), 0) << art.error_message;
  const auto dir = scratch("profile");
  emit_report(art, dir, {ReportFormat::Csv, ReportFormat::Json, ReportFormat::Svg});
  EXPECT_EQ(line_count(dir / "profile.csv"), 7);
  const std::string svg = slurp(dir / "profile.svg");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("exponent = "), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "results.json"));
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
}

TEST(Report, SweepTable) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::Sweep;
  cfg.equation = EquationParams::p_parabolic(3, 1);
  cfg.sweep_count = 100;
  cfg.seed = 3;
  const auto art = run_experiment(cfg);
  const auto dir = scratch("sweep");
  emit_report(art, dir, {ReportFormat::Csv});
  std::ifstream in(dir / "sweep.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "p,m,n,q,r,alpha,theta,branch");
  EXPECT_EQ(line_count(dir / "sweep.csv"), 101);
  EXPECT_FALSE(fs::exists(dir / "results.json"));
}

TEST(Report, DeterministicOutputs) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::Sweep;
  cfg.equation = EquationParams::porous_medium(2, 1);
  cfg.sweep_count = 40;
  cfg.seed = 99;
  const auto a = scratch("det_a"), b = scratch("det_b");
  emit_report(run_experiment(cfg), a, {ReportFormat::Csv, ReportFormat::Json});
  emit_report(run_experiment(cfg), b, {ReportFormat::Csv, ReportFormat::Json});
  EXPECT_EQ(slurp(a / "results.json"), slurp(b / "results.json"));
  EXPECT_EQ(slurp(a / "sweep.csv"), slurp(b / "sweep.csv"));

  cfg.seed = 100;
  const auto c = scratch("det_c");
  emit_report(run_experiment(cfg), c, {ReportFormat::Csv});
  EXPECT_NE(slurp(a / "sweep.csv"), slurp(c / "sweep.csv"));
}

TEST(Report, FormatsParsing) {
  EXPECT_EQ(parse_formats("csv,JSON").size(), 2u);
  EXPECT_EQ(parse_formats("svg").count(ReportFormat::Svg), 1u);
  EXPECT_THROW(parse_formats("pdf"), Error);
  EXPECT_THROW(parse_formats(""), Error);
}

TEST(Report, ResultsJsonEncodesNonFinite) {
  RunArtifacts art;
  art.metrics["a"] = std::numeric_limits<double>::infinity();
  art.metrics["b"] = std::numeric_limits<double>::quiet_NaN();
  const std::string j = results_json(art);
  EXPECT_NE(j.find("\"a\": \"inf\""), std::string::npos);
  EXPECT_NE(j.find("\"b\": null"), std::string::npos);
}

TEST(Sweep, TuplesAreAdmissibleAndSeeded) {
  for (auto cls : {EquationClass::PParabolic, EquationClass::PME, EquationClass::DoublyNonlinear}) {
    const auto a = admissible_sweep(cls, 200, 5);
    const auto b = admissible_sweep(cls, 200, 5);
    ASSERT_EQ(a.size(), 200u);
    bool any_inf_r = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].q, b[i].q);
      EXPECT_EQ(a[i].params.p, b[i].params.p);
      EXPECT_TRUE(check_admissibility(a[i].params, SourceIntegrability::of(a[i].q, a[i].r)).admissible);
      any_inf_r = any_inf_r || std::isinf(a[i].r);
    }
    EXPECT_TRUE(any_inf_r);
  }
}

#ifdef HOLDERLAB_CLI_PATH
TEST(Cli, EnvironmentOutputDirectory) {
  const auto dir = scratch("cli_env");
  const std::string cmd = "HOLDERLAB_OUT=" + dir.string() + " " HOLDERLAB_CLI_PATH +
                          " exponents --class p-parabolic --p 3 --n 3 --q 2 --r inf > /dev/null 2>&1";
  EXPECT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(dir / "exponents" / "results.json"));
  EXPECT_TRUE(fs::exists(dir / "exponents" / "manifest.json"));
}

TEST(Cli, ConfigErrorExitsTwoAndWritesManifest) {
  const auto dir = scratch("cli_bad");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.json") << R"({"kind": "exponents", "bogus": true})";
  const std::string cmd = std::string(HOLDERLAB_CLI_PATH) + " exponents --config " +
                          (dir / "bad.json").string() + " --out " + (dir / "out").string() +
                          " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  EXPECT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 2);
  EXPECT_TRUE(fs::exists(dir / "out" / "manifest.json"));
}
#endif
