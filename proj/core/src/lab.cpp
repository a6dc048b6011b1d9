#include "holderlab/lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "holderlab/field_io.hpp"
#include "json.hpp"

namespace holderlab {

namespace {

using nlohmann::json;
constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorKind::ConfigInvalid, field + ": " + why);
}

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_keys(const json& j, const std::string& ctx, std::initializer_list<const char*> known) {
  if (!j.is_object()) invalid(ctx, "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      invalid(ctx + "." + key, "unknown key");
    }
  }
}

double number(const json& j, const char* key, double def, const std::string& ctx) {
  if (!j.contains(key)) return def;
  const auto& v = j.at(key);
  if (!v.is_number()) invalid(ctx + "." + key, "expected a number");
  return v.get<double>();
}

int integer(const json& j, const char* key, int def, const std::string& ctx) {
  if (!j.contains(key)) return def;
  const auto& v = j.at(key);
  if (!v.is_number_integer()) invalid(ctx + "." + key, "expected an integer");
  return v.get<int>();
}

// A Lebesgue exponent: a number or "inf" / null for infinity.
double exponent_value(const json& v, const std::string& ctx) {
  if (v.is_null()) return kInf;
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return kInf;
    invalid(ctx, "expected a number or \"inf\"");
  }
  if (!v.is_number()) invalid(ctx, "expected a number or \"inf\"");
  return v.get<double>();
}

json exponent_json(double v) { return std::isinf(v) ? json("inf") : json(v); }

Interval interval(const json& j, const char* key, Interval def, const std::string& ctx) {
  if (!j.contains(key)) return def;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    invalid(ctx + "." + key, "expected [lo, hi]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

Expression expression(const json& j, const std::string& ctx) {
  try {
    return Expression::from_json(j.dump());
  } catch (const Error& e) {
    invalid(ctx, e.what());
  }
}

EquationParams parse_equation(const json& j) {
  check_keys(j, "equation", {"class", "p", "m", "n"});
  if (!j.contains("class") || !j["class"].is_string()) invalid("equation.class", "missing");
  const auto cls = equation_class_from_string(j["class"].get<std::string>());
  if (!cls) invalid("equation.class", "unknown class '" + j["class"].get<std::string>() + "'");
  EquationParams e;
  e.cls = *cls;
  e.p = number(j, "p", 2.0, "equation");
  e.m = number(j, "m", 1.0, "equation");
  e.n = integer(j, "n", 1, "equation");
  try {
    e.validate();
  } catch (const Error& err) {
    invalid("equation", err.what());
  }
  return e;
}

GridSpec parse_grid(const json& j) {
  check_keys(j, "grid", {"dim", "x", "y", "nx", "t", "nt"});
  GridSpec g;
  g.dim = integer(j, "dim", 1, "grid");
  g.x = interval(j, "x", {0.0, 1.0}, "grid");
  g.y = interval(j, "y", g.x, "grid");
  g.nx = integer(j, "nx", 101, "grid");
  g.t = interval(j, "t", {0.0, 1.0}, "grid");
  g.nt = integer(j, "nt", 11, "grid");
  try {
    g.validate();
  } catch (const Error& err) {
    invalid("grid", err.what());
  }
  return g;
}

ReferenceSpec parse_reference(const json& j) {
  check_keys(j, "reference", {"kind", "m", "n", "C", "mass", "k", "amplitude", "s", "x0"});
  ReferenceSpec r;
  if (!j.contains("kind") || !j["kind"].is_string()) invalid("reference.kind", "missing");
  r.kind = j["kind"].get<std::string>();
  r.m = number(j, "m", 2.0, "reference");
  r.n = integer(j, "n", 1, "reference");
  if (j.contains("C")) r.constant_c = number(j, "C", 1.0, "reference");
  if (j.contains("mass")) r.mass = number(j, "mass", 1.0, "reference");
  r.mode = integer(j, "k", 1, "reference");
  r.amplitude = number(j, "amplitude", 1.0, "reference");
  r.s = number(j, "s", 1.0, "reference");
  r.x0 = number(j, "x0", 0.0, "reference");
  try {
    (void)r.build();
  } catch (const Error& err) {
    invalid("reference", err.what());
  }
  return r;
}

AnalysisParams parse_analysis(const json& j) {
  check_keys(j, "analysis", {"center", "theta", "lambda", "k_max", "base_radius", "p",
                             "min_cells", "gamma", "caccioppoli", "time_ladder"});
  AnalysisParams a;
  if (j.contains("center")) {
    const auto& c = j["center"];
    check_keys(c, "analysis.center", {"x", "y", "t", "free_boundary"});
    a.center = {number(c, "x", 0.0, "analysis.center"), number(c, "y", 0.0, "analysis.center"),
                number(c, "t", 0.0, "analysis.center")};
    if (c.contains("free_boundary")) {
      if (!c["free_boundary"].is_boolean()) invalid("analysis.center.free_boundary", "bool");
      a.center_at_free_boundary = c["free_boundary"].get<bool>();
    }
  }
  if (j.contains("theta")) {
    const auto& t = j["theta"];
    if (t.is_string() && t.get<std::string>() == "formula") {
      a.theta_source = ThetaSource::FromFormula;
    } else if (t.is_number()) {
      a.theta_source = ThetaSource::Explicit;
      a.theta = t.get<double>();
    } else {
      invalid("analysis.theta", "expected a number or \"formula\"");
    }
  }
  a.lambda = number(j, "lambda", 0.5, "analysis");
  a.k_max = integer(j, "k_max", 6, "analysis");
  a.base_radius = number(j, "base_radius", 1.0, "analysis");
  a.p = number(j, "p", 2.0, "analysis");
  a.min_cells = number(j, "min_cells", 8.0, "analysis");
  if (j.contains("gamma")) a.gamma = number(j, "gamma", 0.5, "analysis");
  if (j.contains("caccioppoli")) {
    const auto& c = j["caccioppoli"];
    check_keys(c, "analysis.caccioppoli", {"radius", "duration", "refine"});
    CaccioppoliSpec cs;
    cs.radius = number(c, "radius", cs.radius, "analysis.caccioppoli");
    cs.duration = number(c, "duration", cs.duration, "analysis.caccioppoli");
    if (c.contains("refine")) cs.refine = c["refine"].get<bool>();
    a.caccioppoli = cs;
  }
  if (j.contains("time_ladder")) a.time_ladder = j["time_ladder"].get<bool>();
  if (!(a.lambda > 0.0 && a.lambda <= 0.5)) invalid("analysis.lambda", "must lie in (0, 1/2]");
  if (a.k_max < 0) invalid("analysis.k_max", "must be >= 0");
  return a;
}

ScaleVerifySpec parse_scale(const json& j) {
  check_keys(j, "scaling", {"kind", "lambda", "rho", "p_hat", "n", "p", "k", "theta", "gamma",
                            "alpha", "a", "m", "anchor", "resolution"});
  ScaleVerifySpec s;
  if (!j.contains("kind") || !j["kind"].is_string()) invalid("scaling.kind", "missing");
  const auto kind = scaling_kind_from_string(j["kind"].get<std::string>());
  if (!kind) invalid("scaling.kind", "unknown kind");
  s.kind = *kind;
  auto& p = s.params;
  p.lambda = number(j, "lambda", p.lambda, "scaling");
  p.rho = number(j, "rho", p.rho, "scaling");
  p.p_hat = number(j, "p_hat", p.p_hat, "scaling");
  p.n = integer(j, "n", p.n, "scaling");
  p.p = number(j, "p", p.p, "scaling");
  p.k = integer(j, "k", p.k, "scaling");
  p.theta = number(j, "theta", p.theta, "scaling");
  p.gamma = number(j, "gamma", p.gamma, "scaling");
  p.alpha = number(j, "alpha", p.alpha, "scaling");
  p.a = number(j, "a", p.a, "scaling");
  p.m = number(j, "m", p.m, "scaling");
  if (j.contains("anchor")) {
    const auto& c = j["anchor"];
    s.anchor = {number(c, "x", 0.0, "scaling.anchor"), number(c, "y", 0.0, "scaling.anchor"),
                number(c, "t", 0.0, "scaling.anchor")};
  }
  s.resolution = integer(j, "resolution", s.resolution, "scaling");
  try {
    (void)build_scaling(s.kind, s.params);
  } catch (const Error& err) {
    invalid("scaling", err.what());
  }
  return s;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::optional<HomogeneousExponent> homogeneous_of(const ExperimentConfig& cfg) {
  if (cfg.homogeneous) return HomogeneousExponent::assumed(*cfg.homogeneous);
  return std::nullopt;
}

void record_exponents(RunArtifacts& art, const RegularityReport& rep, const std::string& prefix) {
  art.metrics[prefix + "alpha"] = rep.alpha_space;
  art.metrics[prefix + "alpha_time"] = rep.alpha_time;
  art.metrics[prefix + "theta"] = rep.theta;
  art.metrics[prefix + "raw_alpha"] = rep.raw_alpha;
  art.metrics[prefix + "source_bound"] = rep.source_bound;
  art.metrics[prefix + "realized_alpha"] = realized_exponent(rep);
  art.labels[prefix + "branch"] = std::string(to_string(rep.branch));
  art.labels[prefix + "open_interval"] = rep.open_interval ? "true" : "false";
}

void run_exponents(const ExperimentConfig& cfg, RunArtifacts& art) {
  const auto rep = sharp_exponents(cfg.equation, SourceIntegrability::of(cfg.q, cfg.r),
                                   homogeneous_of(cfg));
  record_exponents(art, rep, "");
  art.tables.push_back({"exponents",
                        {"p", "m", "n", "q", "r", "alpha", "alpha_time", "theta", "branch"},
                        {{num(cfg.equation.p), num(cfg.equation.m), std::to_string(cfg.equation.n),
                          num(cfg.q), num(cfg.r), num(rep.alpha_space), num(rep.alpha_time),
                          num(rep.theta), std::string(to_string(rep.branch))}}});
}

void run_admissible(const ExperimentConfig& cfg, RunArtifacts& art) {
  const auto verdict = check_admissibility(cfg.equation, SourceIntegrability::of(cfg.q, cfg.r));
  art.metrics["admissible"] = verdict.admissible ? 1.0 : 0.0;
  Table t{"conditions", {"name", "expression", "lhs", "bound", "satisfied"}, {}};
  for (const auto& c : verdict.conditions) {
    art.metrics[c.name + ".lhs"] = c.lhs;
    art.metrics[c.name + ".bound"] = c.bound;
    art.metrics[c.name + ".satisfied"] = c.satisfied ? 1.0 : 0.0;
    t.rows.push_back({c.name, c.expression, num(c.lhs), num(c.bound), c.satisfied ? "1" : "0"});
  }
  art.tables.push_back(std::move(t));
}

void run_sweep(const ExperimentConfig& cfg, RunArtifacts& art) {
  const auto tuples = admissible_sweep(cfg.equation.cls, cfg.sweep_count, cfg.seed);
  Table t{"sweep", {"p", "m", "n", "q", "r", "alpha", "theta", "branch"}, {}};
  std::optional<HomogeneousExponent> hom = homogeneous_of(cfg);
  double min_alpha = kInf, max_alpha = -kInf;
  for (const auto& tp : tuples) {
    std::optional<HomogeneousExponent> h = hom;
    if (!h && tp.params.cls == EquationClass::PME) h = default_pme_homogeneous(tp.params.m, tp.params.n);
    if (!h && (tp.params.cls == EquationClass::PME ||
               (tp.params.cls == EquationClass::DoublyNonlinear && tp.params.m != 1.0))) {
      h = HomogeneousExponent::assumed(1.0);
    }
    const auto rep = sharp_exponents(tp.params, SourceIntegrability::of(tp.q, tp.r), h);
    min_alpha = std::min(min_alpha, rep.alpha_space);
    max_alpha = std::max(max_alpha, rep.alpha_space);
    t.rows.push_back({num(tp.params.p), num(tp.params.m), std::to_string(tp.params.n), num(tp.q),
                      num(tp.r), num(rep.alpha_space), num(rep.theta),
                      std::string(to_string(rep.branch))});
  }
  art.metrics["sweep.count"] = static_cast<double>(tuples.size());
  art.metrics["sweep.min_alpha"] = min_alpha;
  art.metrics["sweep.max_alpha"] = max_alpha;
  art.tables.push_back(std::move(t));
}

void run_scale_verify(const ExperimentConfig& cfg, RunArtifacts& art) {
  if (!cfg.scale) invalid("scaling", "scale-verify needs a scaling block");
  if (!cfg.source) invalid("source", "scale-verify needs a source expression");
  const auto& spec = *cfg.scale;
  const auto sc = build_scaling(spec.kind, spec.params);
  const int n = cfg.grid.dim;
  const int res = spec.resolution;
  const Interval unit_space{-1.0, 1.0};
  const Interval unit_time{-1.0, 0.0};
  const GridSpec local = n == 2 ? GridSpec::square(unit_space, unit_space, res, unit_time, res)
                                : GridSpec::line(unit_space, res, unit_time, res);
  const Region g1 = Region::ball(0.0, 0.0, 1.0, unit_time);
  const Region image = scaled_region(sc, g1, spec.anchor);

  // Original source sampled on the image of the local grid, so nodes map to nodes.
  const Interval ix{spec.anchor.x - sc.space_factor, spec.anchor.x + sc.space_factor};
  const Interval iy{spec.anchor.y - sc.space_factor, spec.anchor.y + sc.space_factor};
  const Interval it{spec.anchor.t - sc.time_factor, spec.anchor.t};
  const GridSpec src_grid =
      n == 2 ? GridSpec::square(ix, iy, res, it, res) : GridSpec::line(ix, res, it, res);
  const SourceTerm f = cfg.source_term();
  const auto f_field = f.sample_on(src_grid);
  const auto f_tilde = apply_source_scaling(f_field, sc, local, spec.anchor);

  const double q = cfg.q;
  const double r = cfg.r;
  const double measured = lqr_norm(f_tilde, g1, q, r).value;
  const double original = lqr_norm(f_field, image, q, r).value;
  const NormFactor nf = scaling_norm_factor(sc, q, r, n);
  const double predicted = nf.norm_factor * original;
  art.metrics["scale.measured"] = measured;
  art.metrics["scale.original"] = original;
  art.metrics["scale.predicted"] = predicted;
  art.metrics["scale.rel_error"] =
      predicted != 0.0 ? std::abs(measured - predicted) / std::abs(predicted) : std::abs(measured);
  art.metrics["scale.norm_factor"] = nf.norm_factor;
  art.metrics["scale.power_factor"] = nf.power_factor;
  art.metrics["scale.power_exponent"] = nf.power_exponent;
  art.metrics["scale.space_factor"] = sc.space_factor;
  art.metrics["scale.time_factor"] = sc.time_factor;
  art.metrics["scale.amplitude_factor"] = sc.amplitude_factor;
  art.metrics["scale.source_factor"] = sc.source_factor;
  art.labels["scale.kind"] = std::string(to_string(sc.kind));
}

double oracle_error(const SpaceTimeField& u, const ReferenceSolution& ref) {
  const GridSpec& g = u.grid();
  double err = 0.0;
  for (int k = 0; k < g.nt; ++k) {
    for (int j = 0; j < g.ny(); ++j) {
      for (int i = 0; i < g.nx; ++i) {
        err = std::max(err, std::abs(u.at(k, i, j) - ref.eval({g.x_at(i), g.y_at(j), g.t_at(k)})));
      }
    }
  }
  return err;
}

SpaceTimeField solve_on(const ExperimentConfig& cfg, const GridSpec& grid, RunArtifacts& art,
                        const std::string& prefix) {
  SolverConfig scfg = cfg.solver;
  std::optional<ReferenceSolution> ref;
  if (cfg.reference) ref = cfg.reference->build();
  if (scfg.boundary == BoundaryKind::DirichletFromOracle) {
    if (!ref) invalid("solver.boundary", "dirichlet-oracle needs a reference");
    scfg.boundary_values = [r = *ref](const SpaceTimePoint& p) { return r.eval(p); };
  }
  Expression init = Expression::constant(0.0);
  if (cfg.initial) {
    init = *cfg.initial;
  } else if (ref) {
    init = ref->expression();
  } else {
    invalid("initial", "solve needs initial data or a reference");
  }
  SolveStats stats;
  const auto start = std::chrono::steady_clock::now();
  auto u = solve(cfg.equation, cfg.source_term(), init, grid, scfg, &stats);
  art.timings[prefix + "solve"] = seconds_since(start);
  art.metrics[prefix + "steps"] = static_cast<double>(stats.steps);
  art.metrics[prefix + "min_dt"] = stats.min_dt;
  art.metrics[prefix + "max_dt"] = stats.max_dt;
  art.metrics[prefix + "max"] = u.max_value();
  art.metrics[prefix + "min"] = u.min_value();
  if (ref) art.metrics[prefix + "error_linf"] = oracle_error(u, *ref);
  return u;
}

void run_solve(const ExperimentConfig& cfg, RunArtifacts& art) {
  auto u = solve_on(cfg, cfg.grid, art, "solve.");
  if (cfg.grid.nx >= 3 && cfg.grid.nt >= 3) {
    art.metrics["solve.residual"] =
        residual(u, cfg.equation, cfg.source_term(), cfg.solver.flux_regularization_eps)
            .max_residual;
  }
  art.field = std::move(u);
}

SpaceTimeField obtain_field(const ExperimentConfig& cfg, const GridSpec& grid, RunArtifacts& art,
                            const std::string& prefix) {
  switch (cfg.origin) {
    case FieldOrigin::Solve: return solve_on(cfg, grid, art, prefix);
    case FieldOrigin::Reference: {
      if (!cfg.reference) invalid("reference", "field origin 'reference' needs a reference");
      const auto ref = cfg.reference->build();
      return sample([&](const SpaceTimePoint& p) { return ref.eval(p); }, grid, "u",
                    "reference:" + cfg.reference->kind);
    }
    case FieldOrigin::File: return read_field(cfg.field_path);
  }
  throw Error(ErrorKind::ConfigInvalid, "unknown field origin");
}

GridSpec refined(const GridSpec& g) {
  GridSpec r = g;
  r.nx = 2 * (g.nx - 1) + 1;
  return r;
}

void run_analyze(const ExperimentConfig& cfg, RunArtifacts& art) {
  if (!cfg.analysis) invalid("analysis", "analyze needs an analysis block");
  const AnalysisParams& a = *cfg.analysis;

  std::optional<RegularityReport> exps;
  try {
    exps = sharp_exponents(cfg.equation, SourceIntegrability::of(cfg.q, cfg.r), homogeneous_of(cfg));
    record_exponents(art, *exps, "exponents.");
  } catch (const Error&) {
    if (a.theta_source == ThetaSource::FromFormula) throw;
  }
  const double theta = a.theta_source == ThetaSource::FromFormula ? exps->theta : a.theta;
  art.metrics["analysis.theta"] = theta;

  const SpaceTimeField u = obtain_field(cfg, cfg.grid, art, "solve.");
  SpaceTimePoint center = a.center;
  if (a.center_at_free_boundary) {
    if (!cfg.reference || cfg.reference->kind != "barenblatt") {
      invalid("analysis.center.free_boundary", "needs a barenblatt reference");
    }
    center.x = cfg.reference->build().free_boundary(center.t);
    center.y = 0.0;
  }
  art.metrics["analysis.center.x"] = center.x;
  art.metrics["analysis.center.t"] = center.t;

  const auto start = std::chrono::steady_clock::now();
  const auto prof = oscillation_profile(u, center, theta, a.lambda, a.k_max, a.p, a.base_radius);
  art.metrics["profile.k_max_effective"] = prof.k_max_effective;
  Table t{"profile", {"k", "radius", "osc", "sup_abs", "campanato", "c_k"}, {}};
  for (const auto& l : prof.levels) {
    t.rows.push_back({std::to_string(l.k), num(l.radius), num(l.osc), num(l.sup_abs),
                      num(l.campanato), num(l.best_constant)});
  }
  art.tables.push_back(std::move(t));

  const FitWindow window = default_window(prof, a.min_cells);
  ProfilePlot plot{"profile", "osc", {}, {}, std::nullopt};
  for (const auto& l : prof.levels) {
    plot.radii.push_back(l.radius);
    plot.values.push_back(l.osc);
  }
  for (auto q : {ProfileQuantity::Osc, ProfileQuantity::SupAbs, ProfileQuantity::CampanatoPAvg}) {
    const std::string key = "fit." + std::string(to_string(q)) + ".";
    try {
      const auto fit = fit_exponent(prof, q, window);
      art.metrics[key + "exponent"] = fit.exponent;
      art.metrics[key + "r_squared"] = fit.r_squared;
      art.metrics[key + "log_constant"] = fit.log_constant;
      art.metrics[key + "k_lo"] = fit.window.k_lo;
      art.metrics[key + "k_hi"] = fit.window.k_hi;
      art.metrics[key + "excluded_zero"] = fit.excluded_zero;
      if (q == ProfileQuantity::Osc) plot.fit = fit;
      if (exps) art.metrics[key + "margin"] = fit.exponent - exps->alpha_space;
    } catch (const Error& e) {
      art.labels[key + "error"] = std::string(to_string(e.kind()));
    }
  }
  art.plots.push_back(std::move(plot));

  if (prof.levels.size() >= 4) {
    const auto camp = campanato_sequence(u, prof);
    art.metrics["campanato.decay_rate"] = camp.decay.exponent;
    art.metrics["campanato.limit"] = camp.limit;
    art.metrics["campanato.constant"] = camp.constant;
    art.metrics["campanato.degenerate"] = camp.degenerate ? 1.0 : 0.0;
    art.metrics["campanato.inequality_holds"] = camp.inequality_holds ? 1.0 : 0.0;
    if (exps && !camp.degenerate) {
      art.metrics["campanato.rate_margin"] = camp.decay.exponent - exps->alpha_space;
    }
    Table ct{"campanato", {"k", "diff", "distance"}, {}};
    for (std::size_t k = 0; k < camp.distances.size(); ++k) {
      ct.rows.push_back({std::to_string(k), k < camp.diffs.size() ? num(camp.diffs[k]) : "",
                         num(camp.distances[k])});
    }
    art.tables.push_back(std::move(ct));
  }

  if (a.gamma) {
    const auto it = geometric_iteration_check(u, center, *a.gamma, theta, a.lambda, a.k_max,
                                              a.base_radius);
    art.metrics["iteration.smallest_constant"] = it.smallest_constant;
    art.metrics["iteration.first_failing_level"] = it.first_failing_level;
    art.metrics["iteration.k_max_effective"] = it.k_max_effective;
    Table it_t{"iteration", {"k", "radius", "sup_abs", "bound", "precondition", "passes_unit"}, {}};
    for (const auto& l : it.levels) {
      it_t.rows.push_back({std::to_string(l.k), num(l.radius), num(l.sup_abs), num(l.bound),
                           l.precondition ? "1" : "0", l.passes_unit ? "1" : "0"});
    }
    art.tables.push_back(std::move(it_t));
  }

  if (a.time_ladder) {
    const auto tp = time_oscillation_profile(u, center, theta, a.lambda, a.k_max, a.base_radius);
    const auto fit = fit_exponent(tp, ProfileQuantity::Osc, default_window(tp, a.min_cells));
    art.metrics["time_fit.exponent"] = fit.exponent;
    art.metrics["time_fit.exponent_vs_t"] = fit.exponent / theta;
    ProfilePlot tplot{"time_profile", "osc", {}, {}, fit};
    for (const auto& l : tp.levels) {
      tplot.radii.push_back(l.radius);
      tplot.values.push_back(l.osc);
    }
    art.plots.push_back(std::move(tplot));
  }

  if (a.caccioppoli) {
    const auto& cs = *a.caccioppoli;
    const Region region =
        Region::ball(center.x, center.y, cs.radius, {center.t - cs.duration, center.t});
    const Cutoff xi = Cutoff::tensor_bump(region, u.grid().dim);
    const auto rep = caccioppoli_check(u, xi, cfg.source_term(), cfg.equation.m, region);
    art.metrics["caccioppoli.ratio"] = rep.ratio;
    art.metrics["caccioppoli.lhs_sup"] = rep.lhs_sup_term;
    art.metrics["caccioppoli.lhs_grad"] = rep.lhs_grad_term;
    art.metrics["caccioppoli.rhs_time"] = rep.rhs_time_term;
    art.metrics["caccioppoli.rhs_space"] = rep.rhs_space_term;
    art.metrics["caccioppoli.rhs_source"] = rep.rhs_source_term;
    if (cs.refine && cfg.origin == FieldOrigin::Solve) {
      const auto fine = solve_on(cfg, refined(cfg.grid), art, "refined.");
      const auto rep2 = caccioppoli_check(fine, xi, cfg.source_term(), cfg.equation.m, region);
      art.metrics["caccioppoli.refined_ratio"] = rep2.ratio;
      art.metrics["caccioppoli.refinement_change"] = std::abs(rep2.ratio - rep.ratio) / rep.ratio;
    }
  }
  art.timings["analyze"] = seconds_since(start);
}

void evaluate_assertions(RunArtifacts& art) {
  for (const auto& spec : art.config.assertions) {
    AssertionResult res;
    res.metric = spec.metric;
    res.min = spec.min;
    res.max = spec.max;
    const auto it = art.metrics.find(spec.metric);
    if (it == art.metrics.end()) {
      res.value = std::numeric_limits<double>::quiet_NaN();
      res.passed = false;
    } else {
      res.value = it->second;
      res.passed = std::isfinite(res.value) && (!spec.min || res.value >= *spec.min) &&
                   (!spec.max || res.value <= *spec.max);
    }
    art.assertions.push_back(res);
  }
}

}  // namespace

std::string_view to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::Exponents: return "exponents";
    case ExperimentKind::Admissible: return "admissible";
    case ExperimentKind::ScaleVerify: return "scale-verify";
    case ExperimentKind::Solve: return "solve";
    case ExperimentKind::Analyze: return "analyze";
    case ExperimentKind::Reproduce: return "reproduce";
    case ExperimentKind::Sweep: return "sweep";
  }
  return "unknown";
}

std::optional<ExperimentKind> experiment_kind_from_string(std::string_view name) {
  for (auto k : {ExperimentKind::Exponents, ExperimentKind::Admissible, ExperimentKind::ScaleVerify,
                 ExperimentKind::Solve, ExperimentKind::Analyze, ExperimentKind::Reproduce,
                 ExperimentKind::Sweep}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

ReferenceSolution ReferenceSpec::build() const {
  if (kind == "barenblatt") {
    if (mass) return ReferenceSolution::barenblatt(m, n, *mass);
    return ReferenceSolution::barenblatt_with_constant(m, n, constant_c.value_or(1.0));
  }
  if (kind == "heat_separable") return ReferenceSolution::heat_separable(mode, n, amplitude);
  if (kind == "heat_kernel") return ReferenceSolution::heat_kernel(mass.value_or(1.0), n, x0);
  if (kind == "power_profile") return ReferenceSolution::power_profile(s, x0);
  throw Error(ErrorKind::ConfigInvalid, "unknown reference kind '" + kind + "'");
}

SourceTerm ExperimentConfig::source_term() const {
  if (!source) return SourceTerm::zero();
  return SourceTerm::closed_form(*source, q, r);
}

ExperimentConfig ExperimentConfig::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    invalid("config", std::string("malformed JSON: ") + e.what());
  }
  check_keys(j, "config",
             {"kind", "name", "description", "equation", "q", "r", "homogeneous", "source",
              "initial", "reference", "field", "grid", "solver", "analysis", "scaling", "sweep",
              "seed", "out", "assertions"});
  ExperimentConfig c;
  try {
    if (j.contains("kind")) {
      const auto k = experiment_kind_from_string(j["kind"].get<std::string>());
      if (!k) invalid("kind", "unknown experiment kind '" + j["kind"].get<std::string>() + "'");
      c.kind = *k;
    }
    if (j.contains("name")) c.name = j["name"].get<std::string>();
    if (c.kind == ExperimentKind::Reproduce) {
      if (c.name.empty()) invalid("name", "reproduce needs a catalog name");
      const auto names = catalog_names();
      if (std::find(names.begin(), names.end(), c.name) == names.end()) {
        invalid("name", "no catalog experiment named '" + c.name + "'");
      }
    }
    if (j.contains("description")) c.description = j["description"].get<std::string>();
    if (j.contains("equation")) c.equation = parse_equation(j["equation"]);
    if (j.contains("q")) c.q = exponent_value(j["q"], "q");
    if (j.contains("r")) c.r = exponent_value(j["r"], "r");
    if (!(c.q >= 1.0)) invalid("q", "must be >= 1");
    if (!(c.r >= 1.0)) invalid("r", "must be >= 1");
    if (j.contains("homogeneous")) c.homogeneous = number(j, "homogeneous", 1.0, "config");
    if (j.contains("source") && !j["source"].is_null()) c.source = expression(j["source"], "source");
    if (j.contains("initial")) c.initial = expression(j["initial"], "initial");
    if (j.contains("reference")) c.reference = parse_reference(j["reference"]);
    if (j.contains("field")) {
      const auto& f = j["field"];
      if (!f.is_string()) invalid("field", "expected \"solve\", \"reference\" or a path");
      const auto s = f.get<std::string>();
      if (s == "solve") {
        c.origin = FieldOrigin::Solve;
      } else if (s == "reference") {
        c.origin = FieldOrigin::Reference;
      } else {
        c.origin = FieldOrigin::File;
        c.field_path = s;
      }
    }
    if (j.contains("grid")) c.grid = parse_grid(j["grid"]);
    if (j.contains("solver")) {
      const auto& s = j["solver"];
      check_keys(s, "solver", {"flux_regularization_eps", "cfl_safety", "boundary", "max_steps"});
      c.solver.flux_regularization_eps =
          number(s, "flux_regularization_eps", c.solver.flux_regularization_eps, "solver");
      c.solver.cfl_safety = number(s, "cfl_safety", c.solver.cfl_safety, "solver");
      if (s.contains("boundary")) {
        const auto b = boundary_kind_from_string(s["boundary"].get<std::string>());
        if (!b) invalid("solver.boundary", "unknown boundary kind");
        c.solver.boundary = *b;
      }
      if (s.contains("max_steps")) c.solver.max_steps = s["max_steps"].get<std::int64_t>();
      if (!(c.solver.cfl_safety > 0.0 && c.solver.cfl_safety <= 1.0)) {
        invalid("solver.cfl_safety", "must lie in (0, 1]");
      }
    }
    if (j.contains("analysis")) c.analysis = parse_analysis(j["analysis"]);
    if (j.contains("scaling")) c.scale = parse_scale(j["scaling"]);
    if (j.contains("sweep")) {
      check_keys(j["sweep"], "sweep", {"count"});
      c.sweep_count = integer(j["sweep"], "count", 100, "sweep");
      if (c.sweep_count < 0) invalid("sweep.count", "must be >= 0");
    }
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
    if (j.contains("assertions")) {
      if (!j["assertions"].is_array()) invalid("assertions", "expected an array");
      for (const auto& a : j["assertions"]) {
        check_keys(a, "assertions[]", {"metric", "min", "max"});
        AssertionSpec spec;
        if (!a.contains("metric")) invalid("assertions[].metric", "missing");
        spec.metric = a["metric"].get<std::string>();
        if (a.contains("min")) spec.min = number(a, "min", 0.0, "assertions[]");
        if (a.contains("max")) spec.max = number(a, "max", 0.0, "assertions[]");
        c.assertions.push_back(spec);
      }
    }
  } catch (const json::exception& e) {
    invalid("config", std::string("wrong value type: ") + e.what());
  }
  if (c.analysis && c.analysis->theta_source == ThetaSource::FromFormula &&
      c.kind == ExperimentKind::Analyze) {
    try {
      (void)sharp_exponents(c.equation, SourceIntegrability::of(c.q, c.r),
                            c.homogeneous ? std::optional(HomogeneousExponent::assumed(*c.homogeneous))
                                          : std::nullopt);
    } catch (const Error& e) {
      invalid("analysis.theta", std::string("formula theta unavailable: ") + e.what());
    }
  }
  return c;
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["kind"] = std::string(to_string(kind));
  if (!name.empty()) j["name"] = name;
  if (!description.empty()) j["description"] = description;
  j["equation"] = {{"class", std::string(to_string(equation.cls))},
                   {"p", equation.p},
                   {"m", equation.m},
                   {"n", equation.n}};
  j["q"] = exponent_json(q);
  j["r"] = exponent_json(r);
  if (homogeneous) j["homogeneous"] = *homogeneous;
  if (source) j["source"] = json::parse(source->to_json());
  if (initial) j["initial"] = json::parse(initial->to_json());
  if (reference) {
    json rj{{"kind", reference->kind}, {"m", reference->m}, {"n", reference->n},
            {"k", reference->mode}, {"amplitude", reference->amplitude}, {"s", reference->s},
            {"x0", reference->x0}};
    if (reference->constant_c) rj["C"] = *reference->constant_c;
    if (reference->mass) rj["mass"] = *reference->mass;
    j["reference"] = rj;
  }
  switch (origin) {
    case FieldOrigin::Solve: j["field"] = "solve"; break;
    case FieldOrigin::Reference: j["field"] = "reference"; break;
    case FieldOrigin::File: j["field"] = field_path.string(); break;
  }
  j["grid"] = {{"dim", grid.dim},
               {"x", {grid.x.lo, grid.x.hi}},
               {"nx", grid.nx},
               {"t", {grid.t.lo, grid.t.hi}},
               {"nt", grid.nt}};
  if (grid.dim == 2) j["grid"]["y"] = {grid.y.lo, grid.y.hi};
  j["solver"] = {{"flux_regularization_eps", solver.flux_regularization_eps},
                 {"cfl_safety", solver.cfl_safety},
                 {"boundary", std::string(to_string(solver.boundary))},
                 {"max_steps", solver.max_steps}};
  if (analysis) {
    const auto& a = *analysis;
    json aj{{"lambda", a.lambda}, {"k_max", a.k_max}, {"base_radius", a.base_radius},
            {"p", a.p}, {"min_cells", a.min_cells}, {"time_ladder", a.time_ladder}};
    aj["center"] = {{"x", a.center.x}, {"y", a.center.y}, {"t", a.center.t}};
    if (a.center_at_free_boundary) aj["center"]["free_boundary"] = true;
    aj["theta"] = a.theta_source == ThetaSource::FromFormula ? json("formula") : json(a.theta);
    if (a.gamma) aj["gamma"] = *a.gamma;
    if (a.caccioppoli) {
      aj["caccioppoli"] = {{"radius", a.caccioppoli->radius},
                           {"duration", a.caccioppoli->duration},
                           {"refine", a.caccioppoli->refine}};
    }
    j["analysis"] = aj;
  }
  if (scale) {
    const auto& p = scale->params;
    j["scaling"] = {{"kind", std::string(to_string(scale->kind))},
                    {"lambda", p.lambda}, {"rho", p.rho}, {"p_hat", p.p_hat}, {"n", p.n},
                    {"p", p.p}, {"k", p.k}, {"theta", p.theta}, {"gamma", p.gamma},
                    {"alpha", p.alpha}, {"a", p.a}, {"m", p.m},
                    {"anchor", {{"x", scale->anchor.x}, {"y", scale->anchor.y}, {"t", scale->anchor.t}}},
                    {"resolution", scale->resolution}};
  }
  j["sweep"] = {{"count", sweep_count}};
  j["seed"] = seed;
  if (!out_dir.empty()) j["out"] = out_dir.string();
  json as = json::array();
  for (const auto& a : assertions) {
    json aj{{"metric", a.metric}};
    if (a.min) aj["min"] = *a.min;
    if (a.max) aj["max"] = *a.max;
    as.push_back(aj);
  }
  j["assertions"] = as;
  return j.dump(2);
}

bool RunArtifacts::passed() const noexcept {
  return !error_kind && std::all_of(assertions.begin(), assertions.end(),
                                    [](const AssertionResult& a) { return a.passed; });
}

int RunArtifacts::exit_code() const noexcept {
  if (error_kind) return *error_kind == ErrorKind::ConfigInvalid ? 2 : 3;
  return passed() ? 0 : 1;
}

RunArtifacts run_experiment(const ExperimentConfig& config) {
  RunArtifacts art;
  art.config = config;
  const auto start = std::chrono::steady_clock::now();
  try {
    ExperimentConfig cfg = config;
    if (config.kind == ExperimentKind::Reproduce) {
      cfg = catalog_config(config.name);
      cfg.seed = config.seed;
      cfg.out_dir = config.out_dir;
      art.config = cfg;
      art.labels["reproduce"] = config.name;
    }
    switch (cfg.kind) {
      case ExperimentKind::Exponents: run_exponents(cfg, art); break;
      case ExperimentKind::Admissible: run_admissible(cfg, art); break;
      case ExperimentKind::Sweep: run_sweep(cfg, art); break;
      case ExperimentKind::ScaleVerify: run_scale_verify(cfg, art); break;
      case ExperimentKind::Solve: run_solve(cfg, art); break;
      case ExperimentKind::Analyze: run_analyze(cfg, art); break;
      case ExperimentKind::Reproduce:
        throw Error(ErrorKind::ConfigInvalid, "catalog entries cannot nest reproduce");
    }
    evaluate_assertions(art);
  } catch (const Error& e) {
    art.error_kind = e.kind();
    art.error_message = e.what();
  } catch (const std::exception& e) {
    art.error_kind = ErrorKind::EvaluationFailure;
    art.error_message = e.what();
  }
  art.timings["total"] = seconds_since(start);
  return art;
}

std::vector<ExponentTuple> admissible_sweep(EquationClass cls, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> dim(1, 3);
  std::vector<ExponentTuple> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  while (static_cast<int>(out.size()) < count) {
    ExponentTuple t;
    const int n = dim(rng);
    const double p = 2.0 + 4.0 * unit(rng);
    const double m = 1.0 + 3.0 * unit(rng);
    switch (cls) {
      case EquationClass::Heat: t.params = EquationParams::heat(n); break;
      case EquationClass::PParabolic: t.params = EquationParams::p_parabolic(p, n); break;
      case EquationClass::PME: t.params = EquationParams::porous_medium(m, n); break;
      case EquationClass::DoublyNonlinear:
        t.params = EquationParams::doubly_nonlinear(p, m, n);
        break;
    }
    const double u_r = unit(rng);
    const double u_q = unit(rng);
    const double inv_r = u_r < 0.2 ? 0.0 : unit(rng);
    const double inv_q = u_q < 0.1 ? 0.0 : unit(rng);
    if (inv_r >= 1.0 || inv_q >= 1.0) continue;
    t.r = inv_r == 0.0 ? kInf : 1.0 / inv_r;
    t.q = inv_q == 0.0 ? kInf : 1.0 / inv_q;
    if (check_admissibility(t.params, SourceIntegrability::of(t.q, t.r)).admissible) {
      out.push_back(t);
    }
  }
  return out;
}

}  // namespace holderlab
