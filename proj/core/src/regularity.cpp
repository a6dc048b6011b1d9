#include "holderlab/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "holderlab/error.hpp"

namespace holderlab {

namespace {

constexpr double kZeroThreshold = 1e-14;

double p_distance(std::span<const double> values, double c, double p) {
  double sum = 0.0;
  for (double v : values) sum += std::pow(std::abs(v - c), p);
  return std::pow(sum / static_cast<double>(values.size()), 1.0 / p);
}

void check_ladder_args(double theta, double lambda, int k_max, double base_radius) {
  if (!(lambda > 0.0 && lambda <= 0.5)) {
    throw Error(ErrorKind::InvalidArgument, "lambda must lie in (0, 1/2]");
  }
  if (k_max < 0) throw Error(ErrorKind::InvalidArgument, "k_max must be >= 0");
  if (!(base_radius > 0.0)) throw Error(ErrorKind::NonPositiveRadius, "base radius must be > 0");
  if (!(theta >= 1.0)) throw Error(ErrorKind::InvalidArgument, "theta must be >= 1");
}

// A level is resolvable when its cylinder spans at least one grid cell in
// space and in time.
bool resolvable(const GridSpec& g, double radius, double theta) {
  return radius >= g.dx() && std::pow(radius, theta) >= g.dt();
}

std::vector<double> cell_values(const SpaceTimeField& field, const Region& region) {
  const auto cells = cell_samples(field, region);
  std::vector<double> out;
  out.reserve(cells.size());
  for (const auto& c : cells) out.push_back(c.value);
  return out;
}

double level_value(const LevelRecord& rec, ProfileQuantity q) {
  switch (q) {
    case ProfileQuantity::Osc: return rec.osc;
    case ProfileQuantity::SupAbs: return rec.sup_abs;
    case ProfileQuantity::CampanatoPAvg: return rec.campanato;
  }
  return 0.0;
}

double bump(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double w = 1.0 - s * s;
  return w * w;
}

double bump_derivative(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  return -4.0 * s * (1.0 - s * s);
}

}  // namespace

std::pair<double, double> best_constant(std::span<const double> values, double p) {
  if (values.empty()) throw Error(ErrorKind::EmptyIntersection, "no values for best constant");
  if (!(p >= 1.0)) throw Error(ErrorKind::InvalidArgument, "p must be >= 1");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double a = *lo_it;
  double b = *hi_it;
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (a == b) return {a, 0.0};

  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = p_distance(values, x1, p);
  double f2 = p_distance(values, x2, p);
  for (int it = 0; it < 80; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = p_distance(values, x1, p);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = p_distance(values, x2, p);
    }
  }
  double best = f1 <= f2 ? x1 : x2;
  double best_val = std::min(f1, f2);
  const double mean_val = p_distance(values, mean, p);
  if (p == 2.0 || mean_val < best_val) {
    best = mean;
    best_val = mean_val;
  }
  return {best, best_val};
}

OscillationProfile oscillation_profile(const SpaceTimeField& field, SpaceTimePoint center,
                                       double theta, double lambda, int k_max, double p,
                                       double base_radius) {
  check_ladder_args(theta, lambda, k_max, base_radius);
  if (!(p >= 1.0)) throw Error(ErrorKind::InvalidArgument, "p must be >= 1");
  const GridSpec& g = field.grid();
  OscillationProfile prof;
  prof.center = center;
  prof.theta = theta;
  prof.lambda = lambda;
  prof.base_radius = base_radius;
  prof.p = p;
  prof.k_max = k_max;
  prof.k_max_effective = -1;
  prof.dx = g.dx();

  double radius = base_radius;
  for (int k = 0; k <= k_max; ++k, radius *= lambda) {
    const auto cyl = make_cylinder(center, radius, theta);
    if (k > 0 && !resolvable(g, radius, theta)) break;
    const Oscillation o = sup_oscillation(field, cyl);
    const auto vals = cell_values(field, cyl.region());
    if (vals.empty()) {
      if (k == 0) throw Error(ErrorKind::GridTooCoarse, "base cylinder contains no grid cell");
      break;
    }
    const auto [c, dist] = best_constant(vals, p);
    prof.levels.push_back({k, radius, o.osc, o.sup_abs, dist, c});
    prof.k_max_effective = k;
  }
  return prof;
}

OscillationProfile time_oscillation_profile(const SpaceTimeField& field, SpaceTimePoint center,
                                            double theta, double lambda, int k_max,
                                            double base_radius) {
  check_ladder_args(theta, lambda, k_max, base_radius);
  const GridSpec& g = field.grid();
  OscillationProfile prof;
  prof.center = center;
  prof.theta = theta;
  prof.lambda = lambda;
  prof.base_radius = base_radius;
  prof.k_max = k_max;
  prof.k_max_effective = -1;
  prof.dx = g.dx();
  double radius = base_radius;
  for (int k = 0; k <= k_max; ++k, radius *= lambda) {
    const double extent = std::pow(radius, theta);
    if (k > 0 && extent < g.dt()) break;
    const Region seg = Region::box({center.x, center.x}, {center.y, center.y},
                                   {center.t - extent, center.t});
    const Oscillation o = sup_oscillation(field, seg);
    prof.levels.push_back({k, radius, o.osc, o.sup_abs, 0.0, 0.0});
    prof.k_max_effective = k;
  }
  return prof;
}

std::string_view to_string(ProfileQuantity q) noexcept {
  switch (q) {
    case ProfileQuantity::Osc: return "osc";
    case ProfileQuantity::SupAbs: return "sup_abs";
    case ProfileQuantity::CampanatoPAvg: return "campanato";
  }
  return "unknown";
}

std::optional<ProfileQuantity> profile_quantity_from_string(std::string_view name) {
  if (name == "osc") return ProfileQuantity::Osc;
  if (name == "sup_abs" || name == "sup") return ProfileQuantity::SupAbs;
  if (name == "campanato") return ProfileQuantity::CampanatoPAvg;
  return std::nullopt;
}

FitWindow default_window(const OscillationProfile& profile, double min_cells) {
  FitWindow w{1, 0};
  for (const auto& rec : profile.levels) {
    if (rec.radius >= min_cells * profile.dx) w.k_hi = rec.k;
  }
  return w;
}

HolderFit fit_power_law(std::span<const double> radii, std::span<const double> values) {
  if (radii.size() != values.size()) {
    throw Error(ErrorKind::InvalidArgument, "radii and values differ in length");
  }
  std::vector<double> lx, ly;
  int zeros = 0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(values[i] >= kZeroThreshold)) {
      ++zeros;
      continue;
    }
    lx.push_back(std::log(radii[i]));
    ly.push_back(std::log(values[i]));
  }
  if (lx.empty() && !radii.empty() && zeros == static_cast<int>(radii.size()) &&
      radii.size() >= 3) {
    throw Error(ErrorKind::AllZeroLevels, "every level vanishes; the exponent is undefined");
  }
  if (lx.size() < 3) {
    std::ostringstream os;
    os << "need at least 3 positive levels, have " << lx.size() << " (" << zeros
       << " excluded as zero)";
    throw Error(ErrorKind::InsufficientLevels, os.str());
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::InsufficientLevels, "radii do not vary");
  HolderFit fit;
  fit.exponent = sxy / sxx;
  fit.log_constant = my - fit.exponent * mx;
  fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  fit.points = static_cast<int>(lx.size());
  fit.excluded_zero = zeros;
  fit.window = {0, static_cast<int>(radii.size()) - 1};
  return fit;
}

HolderFit fit_exponent(const OscillationProfile& profile, ProfileQuantity quantity,
                       std::optional<FitWindow> window) {
  const FitWindow w = window.value_or(default_window(profile));
  std::vector<double> radii, values;
  for (const auto& rec : profile.levels) {
    if (rec.k < w.k_lo || rec.k > w.k_hi) continue;
    radii.push_back(rec.radius);
    values.push_back(level_value(rec, quantity));
  }
  HolderFit fit = fit_power_law(radii, values);
  fit.window = w;
  return fit;
}

CampanatoReport campanato_sequence(const SpaceTimeField& field,
                                   const OscillationProfile& profile) {
  if (profile.levels.size() < 4) {
    throw Error(ErrorKind::InsufficientLevels, "campanato_sequence needs at least 4 levels");
  }
  CampanatoReport rep;
  const auto& lv = profile.levels;
  const int k_hi = std::max(default_window(profile).k_hi, 3);
  std::vector<double> radii;
  for (std::size_t k = 0; k + 1 < lv.size(); ++k) {
    rep.diffs.push_back(std::abs(lv[k].best_constant - lv[k + 1].best_constant));
    if (static_cast<int>(k) + 1 <= k_hi) radii.push_back(lv[k].radius);
  }
  rep.limit = lv.back().best_constant;

  const std::span<const double> used(rep.diffs.data(), radii.size());
  rep.degenerate = std::all_of(used.begin(), used.end(),
                               [](double d) { return d < kZeroThreshold; });
  if (rep.degenerate) {
    rep.decay.exponent = std::numeric_limits<double>::quiet_NaN();
    rep.decay.excluded_zero = static_cast<int>(used.size());
  } else {
    rep.decay = fit_power_law(radii, used);
  }
  rep.decay.window = {0, static_cast<int>(radii.size())};

  const double rate = rep.degenerate ? 1.0 : rep.decay.exponent;
  rep.constant = 0.0;
  double ratio_k = 1.0;
  for (const auto& rec : lv) {
    const auto cyl = make_cylinder(profile.center, rec.radius, profile.theta);
    const auto vals = cell_values(field, cyl.region());
    const double d = p_distance(vals, rep.limit, profile.p);
    rep.distances.push_back(d);
    rep.constant = std::max(rep.constant, d / std::pow(ratio_k, rate));
    ratio_k *= profile.lambda;
  }
  rep.inequality_holds = std::isfinite(rep.constant);
  return rep;
}

IterationReport geometric_iteration_check(const SpaceTimeField& field, SpaceTimePoint center,
                                          double gamma, double theta, double lambda, int k_max,
                                          double base_radius) {
  check_ladder_args(theta, lambda, k_max, base_radius);
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "gamma must lie in (0, 1]");
  }
  const GridSpec& g = field.grid();
  const double u0 = std::abs(field.eval(center));
  IterationReport rep;
  double radius = base_radius;
  double scale = 1.0;
  bool any_precondition = false;
  for (int k = 0; k <= k_max; ++k, radius *= lambda, scale *= lambda) {
    if (k > 0 && !resolvable(g, radius, theta)) break;
    const Oscillation o = sup_oscillation(field, make_cylinder(center, radius, theta));
    if (k == 0 && o.sup_abs > 1.0 + 1e-12) {
      std::ostringstream os;
      os << "sup |u| on the base cylinder is " << o.sup_abs << " > 1; normalize first";
      throw Error(ErrorKind::NotNormalized, os.str());
    }
    IterationLevel lvl;
    lvl.k = k;
    lvl.radius = radius;
    lvl.sup_abs = o.sup_abs;
    lvl.bound = std::pow(scale, gamma);
    lvl.precondition = u0 <= 0.25 * lvl.bound;
    lvl.passes_unit = o.sup_abs <= lvl.bound;
    any_precondition = any_precondition || lvl.precondition;
    rep.smallest_constant = std::max(rep.smallest_constant, o.sup_abs / lvl.bound);
    if (!lvl.passes_unit && rep.first_failing_level < 0) rep.first_failing_level = k;
    rep.levels.push_back(lvl);
    rep.k_max_effective = k;
  }
  if (!any_precondition) {
    std::ostringstream os;
    os << "|u(center)| = " << u0 << " exceeds (lambda^k)^gamma / 4 at every level";
    throw Error(ErrorKind::PreconditionNeverHolds, os.str());
  }
  return rep;
}

Cutoff Cutoff::tensor_bump(const Region& support, int dim) {
  const double shrink = (support.shape == Region::Shape::Ball && dim == 2) ? std::sqrt(0.5) : 1.0;
  const double hx = support.half_x * shrink;
  const double hy = (support.shape == Region::Shape::Ball ? support.half_x : support.half_y) * shrink;
  const double cx = support.cx;
  const double cy = support.cy;
  const double tc = 0.5 * (support.time.lo + support.time.hi);
  const double ht = 0.5 * support.time.length();
  Cutoff c;
  c.value = [=](const SpaceTimePoint& p) {
    double v = bump((p.x - cx) / hx) * bump((p.t - tc) / ht);
    if (dim == 2) v *= bump((p.y - cy) / hy);
    return v;
  };
  c.gradient = [=](const SpaceTimePoint& p) {
    const double sx = (p.x - cx) / hx;
    const double st = (p.t - tc) / ht;
    const double sy = dim == 2 ? (p.y - cy) / hy : 0.0;
    const double bx = bump(sx), bt = bump(st), by = dim == 2 ? bump(sy) : 1.0;
    std::array<double, 3> d{};
    d[0] = bump_derivative(sx) / hx * bt * by;
    d[1] = dim == 2 ? bump_derivative(sy) / hy * bx * bt : 0.0;
    d[2] = bump_derivative(st) / ht * bx * by;
    return d;
  };
  return c;
}

CaccioppoliReport caccioppoli_check(const SpaceTimeField& field, const Cutoff& cutoff,
                                    const SourceTerm& source, double m, const Region& region) {
  const GridSpec& g = field.grid();
  if (g.nx < 3 || g.nt < 3) {
    throw Error(ErrorKind::GridTooCoarse, "caccioppoli_check needs >= 3 nodes per axis");
  }
  if (!region.inside(g)) {
    throw Error(ErrorKind::RegionOutsideDomain, "caccioppoli region leaves the field domain");
  }
  if (!cutoff.value || !cutoff.gradient) {
    throw Error(ErrorKind::InvalidArgument, "cutoff needs a value and a gradient");
  }

  // The cutoff must vanish on the boundary of the region.
  {
    constexpr int kSamples = 64;
    double worst = 0.0;
    const double hy = region.shape == Region::Shape::Ball ? region.half_x : region.half_y;
    for (int a = 0; a <= kSamples; ++a) {
      const double s = static_cast<double>(a) / kSamples;
      const double t = region.time.lo + s * region.time.length();
      for (int b = 0; b <= kSamples; ++b) {
        const double w = static_cast<double>(b) / kSamples;
        if (g.dim == 1) {
          const double x = region.cx - region.half_x + 2.0 * w * region.half_x;
          worst = std::max({worst, std::abs(cutoff.value({region.cx - region.half_x, 0.0, t})),
                            std::abs(cutoff.value({region.cx + region.half_x, 0.0, t})),
                            std::abs(cutoff.value({x, 0.0, region.time.lo})),
                            std::abs(cutoff.value({x, 0.0, region.time.hi}))});
        } else if (region.shape == Region::Shape::Ball) {
          const double phi = 2.0 * M_PI * w;
          const double x = region.cx + region.half_x * std::cos(phi);
          const double y = region.cy + region.half_x * std::sin(phi);
          const double rr = region.half_x * s;
          worst = std::max({worst, std::abs(cutoff.value({x, y, t})),
                            std::abs(cutoff.value({region.cx + rr * std::cos(phi),
                                                   region.cy + rr * std::sin(phi),
                                                   region.time.lo})),
                            std::abs(cutoff.value({region.cx + rr * std::cos(phi),
                                                   region.cy + rr * std::sin(phi),
                                                   region.time.hi}))});
        } else {
          const double x = region.cx - region.half_x + 2.0 * w * region.half_x;
          const double y = region.cy - hy + 2.0 * s * hy;
          worst = std::max({worst, std::abs(cutoff.value({region.cx - region.half_x, y, t})),
                            std::abs(cutoff.value({region.cx + region.half_x, y, t})),
                            std::abs(cutoff.value({x, region.cy - hy, t})),
                            std::abs(cutoff.value({x, region.cy + hy, t})),
                            std::abs(cutoff.value({x, y, region.time.lo})),
                            std::abs(cutoff.value({x, y, region.time.hi}))});
        }
      }
    }
    if (worst > 1e-12) {
      std::ostringstream os;
      os << "cutoff reaches " << worst << " on the region boundary";
      throw Error(ErrorKind::CutoffNotCompact, os.str());
    }
  }

  const double dx = g.dx();
  const double dy = g.dy();
  const double dt = g.dt();
  const double space_w = dx * (g.dim == 2 ? dy : 1.0);
  const int ny = g.ny();
  const int j_lo = g.dim == 2 ? 1 : 0;
  const int j_hi = g.dim == 2 ? ny - 2 : 0;
  const double q = source.declared_q();
  const double r = source.declared_r();

  CaccioppoliReport rep;
  double source_outer = 0.0;
  for (int k = 0; k < g.nt; ++k) {
    const double t = g.t_at(k);
    if (t < region.time.lo || t > region.time.hi) continue;
    double slice = 0.0;
    double f_inner = 0.0;
    for (int j = j_lo; j <= j_hi; ++j) {
      for (int i = 1; i < g.nx - 1; ++i) {
        const SpaceTimePoint pt{g.x_at(i), g.y_at(j), t};
        if (!region.contains_space(pt.x, pt.y, g.dim)) continue;
        const double u = field.at(k, i, j);
        const double xi = cutoff.value(pt);
        const auto dxi = cutoff.gradient(pt);
        const double ux = (field.at(k, i + 1, j) - field.at(k, i - 1, j)) / (2.0 * dx);
        const double uy =
            g.dim == 2 ? (field.at(k, i, j + 1) - field.at(k, i, j - 1)) / (2.0 * dy) : 0.0;
        const double grad2 = ux * ux + uy * uy;
        const double au = std::abs(u);
        slice += u * u * xi * xi * space_w;
        rep.lhs_grad_term += std::pow(au, m - 1.0) * grad2 * xi * xi * space_w * dt;
        rep.rhs_time_term += u * u * xi * std::abs(dxi[2]) * space_w * dt;
        rep.rhs_space_term += std::pow(au, m + 1.0) *
                              (dxi[0] * dxi[0] + dxi[1] * dxi[1] + xi * xi) * space_w * dt;
        if (!source.is_zero()) {
          const double f = std::abs(source.eval_node(g, pt));
          f_inner = std::isinf(q) ? std::max(f_inner, f) : f_inner + std::pow(f, q) * space_w;
        }
      }
    }
    rep.lhs_sup_term = std::max(rep.lhs_sup_term, slice);
    if (!source.is_zero()) {
      const double fs = std::isinf(q) ? f_inner : std::pow(f_inner, 1.0 / q);
      source_outer = std::isinf(r) ? std::max(source_outer, fs) : source_outer + std::pow(fs, r) * dt;
    }
  }
  if (!source.is_zero()) {
    const double norm = std::isinf(r) ? source_outer : std::pow(source_outer, 1.0 / r);
    rep.rhs_source_term = norm * norm;
  }
  const double lhs = rep.lhs_total();
  const double rhs = rep.rhs_total();
  if (rhs > 0.0) {
    rep.ratio = lhs / rhs;
  } else {
    rep.ratio = lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return rep;
}

}  // namespace holderlab
