#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "holderlab/error.hpp"
#include "holderlab/geometry.hpp"

namespace holderlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_unit_scale(const char* name, double v) {
  if (!(v > 0.0 && v <= 1.0)) {
    std::ostringstream os;
    os << name << " must lie in (0, 1], got " << v;
    throw Error(ErrorKind::InvalidScaleParameter, os.str());
  }
}

void check(bool ok, const char* why) {
  if (!ok) throw Error(ErrorKind::InvalidScaleParameter, why);
}

double reciprocal(double v) { return std::isinf(v) ? 0.0 : 1.0 / v; }

SpaceTimeField map_field(const SpaceTimeField& field, const AnisotropicScaling& sc,
                         double amplitude, const GridSpec& target, SpaceTimePoint anchor) {
  target.validate();
  const GridSpec& src = field.grid();
  if (target.dim != src.dim) {
    throw Error(ErrorKind::InvalidArgument, "target grid dimension differs from the field's");
  }
  std::vector<double> values(target.size());
  std::size_t idx = 0;
  for (int k = 0; k < target.nt; ++k) {
    const double t = anchor.t + sc.time_factor * target.t_at(k);
    for (int j = 0; j < target.ny(); ++j) {
      const double y = target.dim == 2 ? anchor.y + sc.space_factor * target.y_at(j) : 0.0;
      for (int i = 0; i < target.nx; ++i, ++idx) {
        const SpaceTimePoint p{anchor.x + sc.space_factor * target.x_at(i), y, t};
        if (!src.contains(p)) {
          std::ostringstream os;
          os << "scaled node (" << p.x << ", " << p.y << ", " << p.t << ") leaves the domain of '"
             << field.name() << "'";
          throw Error(ErrorKind::ScaledDomainEscapes, os.str());
        }
        values[idx] = amplitude * field.eval(p);
      }
    }
  }
  return SpaceTimeField(target, std::move(values), field.name() + "~",
                        std::string("scaled:") + std::string(to_string(sc.kind)));
}

GridSpec unit_cylinder_grid(int n, int resolution) {
  const Interval space{-1.0, 1.0};
  const Interval time{-1.0, 0.0};
  return n == 2 ? GridSpec::square(space, space, resolution, time, resolution)
                : GridSpec::line(space, resolution, time, resolution);
}

template <typename Evaluate>
SmallnessResult search_rho(Evaluate&& evaluate) {
  constexpr int kMaxEvaluations = 60;
  SmallnessResult best;
  double infeasible = 1.0;
  double rho = 0.5;
  int used = 0;
  // Halve until both targets hold.
  while (used < kMaxEvaluations) {
    auto trial = evaluate(rho);
    ++used;
    if (trial.satisfied) {
      best = trial;
      break;
    }
    infeasible = rho;
    rho *= 0.5;
  }
  // Then push rho back up towards the infeasible bracket end.
  if (best.satisfied) {
    double feasible = rho;
    for (int it = 0; it < 20 && used < kMaxEvaluations; ++it) {
      const double mid = 0.5 * (feasible + infeasible);
      auto trial = evaluate(mid);
      ++used;
      if (trial.satisfied) {
        feasible = mid;
        best = trial;
      } else {
        infeasible = mid;
      }
    }
  }
  best.evaluations = used;
  return best;
}

}  // namespace

std::string_view to_string(ScalingKind kind) noexcept {
  switch (kind) {
    case ScalingKind::PoissonZoom: return "poisson-zoom";
    case ScalingKind::PPoissonNormalize: return "p-poisson-normalize";
    case ScalingKind::PmeZoom: return "pme-zoom";
    case ScalingKind::PmeNormalize: return "pme-normalize";
  }
  return "unknown";
}

std::optional<ScalingKind> scaling_kind_from_string(std::string_view name) {
  if (name == "poisson-zoom") return ScalingKind::PoissonZoom;
  if (name == "p-poisson-normalize") return ScalingKind::PPoissonNormalize;
  if (name == "pme-zoom") return ScalingKind::PmeZoom;
  if (name == "pme-normalize") return ScalingKind::PmeNormalize;
  return std::nullopt;
}

AnisotropicScaling build_scaling(ScalingKind kind, const ScalingParams& prm) {
  AnisotropicScaling sc;
  sc.kind = kind;
  sc.params = prm;
  switch (kind) {
    case ScalingKind::PoissonZoom: {
      check_unit_scale("lambda", prm.lambda);
      check(prm.p_hat >= 1.0, "p_hat must be >= 1");
      check(prm.n >= 1, "n must be >= 1");
      const double s = static_cast<double>(prm.n) / prm.p_hat;
      sc.space_factor = prm.lambda;
      sc.time_factor = 1.0;
      sc.amplitude_factor = std::pow(prm.lambda, -(2.0 - s));
      sc.source_factor = std::pow(prm.lambda, s);
      break;
    }
    case ScalingKind::PPoissonNormalize: {
      check_unit_scale("rho", prm.rho);
      check(prm.p >= 2.0, "p must be >= 2");
      sc.space_factor = 1.0;
      sc.time_factor = std::pow(prm.rho, prm.p - 2.0);
      sc.amplitude_factor = prm.rho;
      sc.source_factor = std::pow(prm.rho, prm.p - 1.0);
      break;
    }
    case ScalingKind::PmeZoom: {
      check_unit_scale("lambda", prm.lambda);
      check(prm.k >= 0, "k must be >= 0");
      check(prm.theta >= 1.0, "theta must be >= 1");
      check(prm.gamma > 0.0, "gamma must be positive");
      check(prm.alpha > 0.0 && prm.alpha <= 2.0, "alpha must lie in (0, 2]");
      const double s = std::pow(prm.lambda, prm.k);
      sc.space_factor = s;
      sc.time_factor = std::pow(s, prm.theta);
      sc.amplitude_factor = std::pow(s, -prm.gamma);
      sc.source_factor = std::pow(s, 2.0 - prm.alpha);
      break;
    }
    case ScalingKind::PmeNormalize: {
      check_unit_scale("rho", prm.rho);
      check(prm.a > 0.0, "a must be positive");
      check(prm.m >= 1.0, "m must be >= 1");
      sc.space_factor = std::pow(prm.rho, prm.a);
      sc.time_factor = std::pow(prm.rho, (prm.m - 1.0) + 2.0 * prm.a);
      sc.amplitude_factor = prm.rho;
      sc.source_factor = std::pow(prm.rho, prm.m + 2.0 * prm.a);
      break;
    }
    default:
      throw Error(ErrorKind::UnsupportedKind, "unknown scaling kind");
  }
  return sc;
}

SpaceTimeField apply_scaling(const SpaceTimeField& field, const AnisotropicScaling& sc,
                             const GridSpec& target, SpaceTimePoint anchor) {
  return map_field(field, sc, sc.amplitude_factor, target, anchor);
}

SpaceTimeField apply_source_scaling(const SpaceTimeField& source, const AnisotropicScaling& sc,
                                    const GridSpec& target, SpaceTimePoint anchor) {
  return map_field(source, sc, sc.source_factor, target, anchor);
}

NormFactor scaling_norm_factor(const AnisotropicScaling& sc, double q, double r, int n) {
  if (!(q >= 1.0) || !(r >= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "norm factor needs q, r in [1, inf]");
  }
  const double iq = reciprocal(q);
  const double ir = reciprocal(r);
  const auto& prm = sc.params;
  double base = 1.0;
  double exponent = 0.0;  // of base, for the norm itself
  switch (sc.kind) {
    case ScalingKind::PoissonZoom:
      base = prm.lambda;
      exponent = static_cast<double>(prm.n) / prm.p_hat - n * iq;
      break;
    case ScalingKind::PPoissonNormalize:
      base = prm.rho;
      exponent = (prm.p - 1.0) - (prm.p - 2.0) * ir;
      break;
    case ScalingKind::PmeZoom:
      base = std::pow(prm.lambda, prm.k);
      exponent = (2.0 - prm.alpha) - n * iq - prm.theta * ir;
      break;
    case ScalingKind::PmeNormalize:
      base = prm.rho;
      exponent = (prm.m + 2.0 * prm.a) - prm.a * n * iq - ((prm.m - 1.0) + 2.0 * prm.a) * ir;
      break;
    default:
      throw Error(ErrorKind::UnsupportedKind, "unknown scaling kind");
  }
  NormFactor nf;
  nf.norm_factor = std::pow(base, exponent);
  nf.exponent_sign = (exponent > 0.0) - (exponent < 0.0);
  if (std::isinf(r)) {
    nf.power_factor = nf.norm_factor;
    nf.power_exponent = nf.exponent_sign == 0 ? 0.0 : nf.exponent_sign * kInf;
  } else {
    nf.power_exponent = r * exponent;
    nf.power_factor = std::pow(base, nf.power_exponent);
  }
  return nf;
}

Region scaled_region(const AnisotropicScaling& sc, const Region& local, SpaceTimePoint anchor) {
  Region out = local;
  out.cx = anchor.x + sc.space_factor * local.cx;
  out.cy = anchor.y + sc.space_factor * local.cy;
  out.half_x = sc.space_factor * local.half_x;
  out.half_y = sc.space_factor * local.half_y;
  out.time = {anchor.t + sc.time_factor * local.time.lo, anchor.t + sc.time_factor * local.time.hi};
  return out;
}

int pme_smallness_a(double m, int n, double q, double r) {
  if (std::isinf(r)) return 1;
  const double nrq = n * r * reciprocal(q);
  auto exponent = [&](double a) { return (m + 2.0 * a) * r - a * (nrq + 2.0) - (m - 1.0); };
  const double slope = 2.0 * r - nrq - 2.0;
  if (exponent(1.0) > 0.0) return 1;
  if (!(slope > 0.0)) {
    throw Error(ErrorKind::InvalidArgument,
                "no a > 0 makes the smallness exponent positive for these (m, n, q, r)");
  }
  const double a_star = -(m * r - (m - 1.0)) / slope;  // root of the linear exponent
  int a = std::max(1, static_cast<int>(std::floor(a_star)));
  while (!(exponent(a) > 0.0)) ++a;
  return a;
}

SmallnessResult find_p_poisson_smallness(const SpaceTimeField& u, const SpaceTimeField& f,
                                         double p, int n, const SmallnessTargets& targets,
                                         SpaceTimePoint anchor) {
  const GridSpec local = unit_cylinder_grid(n, targets.resolution);
  const Region g1 = Region::ball(0.0, 0.0, 1.0, {-1.0, 0.0});
  return search_rho([&](double rho) {
    ScalingParams prm;
    prm.rho = rho;
    prm.p = p;
    SmallnessResult res;
    res.scaling = build_scaling(ScalingKind::PPoissonNormalize, prm);
    const auto v = apply_scaling(u, res.scaling, local, anchor);
    const auto ft = apply_source_scaling(f, res.scaling, local, anchor);
    res.field_norm = p_avg_norm(v, g1, p).value;
    res.source_norm = lqr_norm(ft, g1, targets.q, targets.r).value;
    res.satisfied = res.field_norm <= 1.0 && res.source_norm <= targets.epsilon;
    return res;
  });
}

SmallnessResult find_pme_smallness(const SpaceTimeField& u, const SpaceTimeField& f, double m,
                                   int n, const SmallnessTargets& targets, SpaceTimePoint anchor) {
  const GridSpec local = unit_cylinder_grid(n, targets.resolution);
  const Region g1 = Region::ball(0.0, 0.0, 1.0, {-1.0, 0.0});
  const int a = pme_smallness_a(m, n, targets.q, targets.r);
  return search_rho([&](double rho) {
    ScalingParams prm;
    prm.rho = rho;
    prm.a = a;
    prm.m = m;
    SmallnessResult res;
    res.scaling = build_scaling(ScalingKind::PmeNormalize, prm);
    const auto v = apply_scaling(u, res.scaling, local, anchor);
    const auto ft = apply_source_scaling(f, res.scaling, local, anchor);
    res.field_norm = sup_norm(v, g1).value;
    res.source_norm = lqr_norm(ft, g1, targets.q, targets.r).value;
    res.satisfied = res.field_norm <= 1.0 && res.source_norm <= targets.epsilon;
    return res;
  });
}

}  // namespace holderlab
