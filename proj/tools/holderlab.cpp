// holderlab: command-line front end for the regularity lab.
//
//   holderlab exponents --config exp.json
//   holderlab reproduce barenblatt-m2-freeboundary --out runs/m2
//   holderlab exponents --class p-parabolic --p 3 --n 3 --q 2 --r inf

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "holderlab/lab.hpp"

namespace {

using namespace holderlab;

struct Options {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string formats = "csv,json,svg";
  std::string name;
  std::string cls;
  std::optional<double> p, m, homogeneous;
  std::optional<int> n, count;
  std::string q, r;
};

double parse_exponent(const std::string& s, const char* flag) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::ConfigInvalid, std::string(flag) + ": expected a number or 'inf'");
}

ExperimentConfig build_config(ExperimentKind kind, const Options& o) {
  ExperimentConfig cfg;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw Error(ErrorKind::ConfigInvalid, "config: cannot read " + o.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    cfg = ExperimentConfig::from_json(ss.str());
  }
  cfg.kind = kind;
  if (kind == ExperimentKind::Reproduce) {
    cfg.name = o.name;
    (void)catalog_config(o.name);
  }
  if (!o.cls.empty()) {
    const auto c = equation_class_from_string(o.cls);
    if (!c) throw Error(ErrorKind::ConfigInvalid, "--class: unknown equation class '" + o.cls + "'");
    cfg.equation.cls = *c;
    if (*c == EquationClass::Heat) cfg.equation = EquationParams::heat(cfg.equation.n);
  }
  if (o.p) cfg.equation.p = *o.p;
  if (o.m) cfg.equation.m = *o.m;
  if (o.n) cfg.equation.n = *o.n;
  try {
    cfg.equation.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigInvalid, std::string("equation: ") + e.what());
  }
  if (!o.q.empty()) cfg.q = parse_exponent(o.q, "--q");
  if (!o.r.empty()) cfg.r = parse_exponent(o.r, "--r");
  if (o.homogeneous) cfg.homogeneous = *o.homogeneous;
  if (o.count) cfg.sweep_count = *o.count;
  if (o.seed_given) cfg.seed = o.seed;
  return cfg;
}

std::filesystem::path output_dir(const Options& o, const ExperimentConfig& cfg, ExperimentKind kind) {
  if (!o.out_dir.empty()) return o.out_dir;
  if (const char* env = std::getenv("HOLDERLAB_OUT"); env && *env) {
    return std::filesystem::path(env) /
           (kind == ExperimentKind::Reproduce ? o.name : std::string(to_string(kind)));
  }
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  return std::filesystem::path("holderlab-out") /
         (kind == ExperimentKind::Reproduce ? o.name : std::string(to_string(kind)));
}

int run(ExperimentKind kind, const Options& o) {
  std::set<ReportFormat> formats;
  RunArtifacts art;
  try {
    formats = parse_formats(o.formats);
    art.config = build_config(kind, o);
  } catch (const Error& e) {
    std::cerr << "holderlab: " << e.what() << '\n';
    art.config.kind = kind;
    art.config.name = o.name;
    art.error_kind = e.kind();
    art.error_message = e.what();
    if (formats.empty()) formats = {ReportFormat::Json};
    try {
      emit_report(art, output_dir(o, art.config, kind), formats);
    } catch (const Error& io) {
      std::cerr << "holderlab: " << io.what() << '\n';
    }
    return 2;
  }
  const auto out = output_dir(o, art.config, kind);
  art.config.out_dir = out;
  art = run_experiment(art.config);
  try {
    const auto files = emit_report(art, out, formats);
    std::cout << results_json(art);
    std::cerr << "holderlab: wrote " << files.size() << " file(s) to " << out.string() << '\n';
  } catch (const Error& e) {
    std::cerr << "holderlab: " << e.what() << '\n';
    return 3;
  }
  if (art.error_kind) std::cerr << "holderlab: " << art.error_message << '\n';
  for (const auto& a : art.assertions) {
    if (!a.passed) std::cerr << "holderlab: assertion failed: " << a.metric << " = " << a.value << '\n';
  }
  return art.exit_code();
}

void common_flags(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config_path, "JSON experiment file");
  sub->add_option("--out", o.out_dir, "Output directory (default: $HOLDERLAB_OUT/<experiment>)");
  sub->add_option("--seed", o.seed, "Seed for randomized sweeps")
      ->each([&o](const std::string&) { o.seed_given = true; });
  sub->add_option("--formats", o.formats, "Comma-separated subset of csv,json,svg");
}

void equation_flags(CLI::App* sub, Options& o) {
  sub->add_option("--class", o.cls, "heat | p-parabolic | pme | doubly-nonlinear");
  sub->add_option("--p", o.p, "p-Laplacian exponent");
  sub->add_option("--m", o.m, "porous medium exponent");
  sub->add_option("--n", o.n, "space dimension");
  sub->add_option("--q", o.q, "spatial integrability of the source (number or inf)");
  sub->add_option("--r", o.r, "temporal integrability of the source (number or inf)");
  sub->add_option("--homogeneous", o.homogeneous, "assumed homogeneous exponent alpha_0 / alpha_*");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"holderlab: sharp Holder exponents and regularity experiments for degenerate "
               "parabolic equations"};
  app.require_subcommand(1);
  Options o;
  std::optional<ExperimentKind> chosen;

  auto add = [&](ExperimentKind kind, const std::string& help) {
    auto* sub = app.add_subcommand(std::string(to_string(kind)), help);
    common_flags(sub, o);
    sub->callback([&chosen, kind] { chosen = kind; });
    return sub;
  };
  equation_flags(add(ExperimentKind::Exponents, "Sharp Holder exponents and theta"), o);
  equation_flags(add(ExperimentKind::Admissible, "Check the integrability conditions"), o);
  add(ExperimentKind::ScaleVerify, "Verify a rescaling's source-norm factor");
  add(ExperimentKind::Solve, "Run the explicit solver");
  add(ExperimentKind::Analyze, "Measure oscillation ladders, fits and energy ratios");
  auto* sweep = add(ExperimentKind::Sweep, "Exponents over seeded admissible tuples");
  equation_flags(sweep, o);
  sweep->add_option("--count", o.count, "number of tuples");
  auto* repro = add(ExperimentKind::Reproduce, "Run a built-in catalog experiment");
  repro->add_option("name", o.name, "catalog experiment")->required();
  auto* list = app.add_subcommand("list", "List the built-in catalog");
  list->callback([] {
    for (const auto& name : catalog_names()) {
      std::cout << name << "  " << catalog_config(name).description << '\n';
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (!chosen) return 0;
  return run(*chosen, o);
}
