#include "holderlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "holderlab/error.hpp"

namespace holderlab {

namespace {

void require_inside(const SpaceTimeField& field, const Region& region, ErrorKind kind) {
  if (!region.inside(field.grid())) {
    std::ostringstream os;
    os << "region (center " << region.cx << ", half-width " << region.half_x << ", t in ["
       << region.time.lo << ", " << region.time.hi << "]) leaves the domain of '" << field.name()
       << "'";
    throw Error(kind, os.str());
  }
}

// Coordinates where the piecewise-multilinear interpolant can attain its
// extrema over [lo, hi]: the endpoints plus every grid line strictly inside.
std::vector<double> breakpoints(double lo, double hi, double origin, double h, int n) {
  std::vector<double> pts{lo};
  const int first = std::max(0, static_cast<int>(std::floor((lo - origin) / h)) + 1);
  const int last = std::min(n - 1, static_cast<int>(std::ceil((hi - origin) / h)) - 1);
  for (int i = first; i <= last; ++i) {
    const double c = origin + i * h;
    if (c > lo && c < hi) pts.push_back(c);
  }
  if (hi > lo) pts.push_back(hi);
  return pts;
}

}  // namespace

double IntrinsicCylinder::time_extent() const { return std::pow(radius, theta); }

Interval IntrinsicCylinder::time_interval() const {
  return {center.t - time_extent(), center.t};
}

Region IntrinsicCylinder::region() const {
  return Region::ball(center.x, center.y, radius, time_interval());
}

bool IntrinsicCylinder::contains(const IntrinsicCylinder& inner) const noexcept {
  return inner.center.x == center.x && inner.center.y == center.y &&
         inner.center.t == center.t && inner.theta == theta && inner.radius <= radius;
}

IntrinsicCylinder make_cylinder(SpaceTimePoint center, double tau, double theta) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    std::ostringstream os;
    os << "cylinder radius must be positive, got " << tau;
    throw Error(ErrorKind::NonPositiveRadius, os.str());
  }
  if (!(theta >= 1.0) || !std::isfinite(theta)) {
    std::ostringstream os;
    os << "cylinder theta must be >= 1, got " << theta;
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  return {center, tau, theta};
}

Oscillation sup_oscillation(const SpaceTimeField& field, const IntrinsicCylinder& cyl) {
  return sup_oscillation(field, cyl.region());
}

Oscillation sup_oscillation(const SpaceTimeField& field, const Region& region) {
  require_inside(field, region, ErrorKind::CylinderOutsideDomain);
  const GridSpec& g = field.grid();
  const auto ts = breakpoints(region.time.lo, region.time.hi, g.t.lo, g.dt(), g.nt);
  const auto xs = breakpoints(region.cx - region.half_x, region.cx + region.half_x, g.x.lo, g.dx(),
                              g.nx);
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  auto visit = [&](double v) {
    hi = std::max(hi, v);
    lo = std::min(lo, v);
  };

  if (g.dim == 1) {
    for (double t : ts) {
      for (double x : xs) visit(field.eval({x, 0.0, t}));
    }
  } else {
    const double hy = region.shape == Region::Shape::Ball ? region.half_x : region.half_y;
    const auto ys = breakpoints(region.cy - hy, region.cy + hy, g.y.lo, g.dy(), g.nx);
    for (double t : ts) {
      visit(field.eval({region.cx, region.cy, t}));
      for (double y : ys) {
        for (double x : xs) {
          if (region.contains_space(x, y, 2)) visit(field.eval({x, y, t}));
        }
      }
    }
  }
  return {hi - lo, std::max(std::abs(hi), std::abs(lo)), hi, lo};
}

NormValue p_avg_norm(const SpaceTimeField& field, const Region& region, double p) {
  if (!(p >= 1.0)) throw Error(ErrorKind::InvalidArgument, "p_avg_norm needs p >= 1");
  require_inside(field, region, ErrorKind::RegionOutsideDomain);
  const auto cells = cell_samples(field, region);
  if (cells.empty()) throw Error(ErrorKind::EmptyIntersection, "no cells inside the region");
  double sum = 0.0;
  for (const auto& c : cells) sum += std::pow(std::abs(c.value), p);
  NormValue nv;
  nv.value = std::pow(sum / static_cast<double>(cells.size()), 1.0 / p);
  nv.kind = NormKind::PAvg;
  nv.p = p;
  nv.region = region;
  return nv;
}

double p_avg_norm_via_measure(const SpaceTimeField& field, const Region& region, double p) {
  if (!(p >= 1.0)) throw Error(ErrorKind::InvalidArgument, "p_avg_norm needs p >= 1");
  require_inside(field, region, ErrorKind::RegionOutsideDomain);
  const double measure = integrate_region(field, region, 0.0);
  const double lp = std::pow(integrate_region(field, region, p), 1.0 / p);
  return std::pow(measure, -1.0 / p) * lp;
}

NormValue lqr_norm(const SpaceTimeField& field, const Region& region, double q, double r) {
  if (!(q >= 1.0) || !(r >= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "lqr_norm needs q, r in [1, inf]");
  }
  require_inside(field, region, ErrorKind::RegionOutsideDomain);
  const auto cells = cell_samples(field, region);
  if (cells.empty()) throw Error(ErrorKind::EmptyIntersection, "no cells inside the region");
  const GridSpec& g = field.grid();
  const double space_cell = g.dx() * (g.dim == 2 ? g.dy() : 1.0);
  const bool q_inf = std::isinf(q);
  const bool r_inf = std::isinf(r);

  // cells are ordered time-outer, so slices are contiguous runs.
  double outer = 0.0;
  std::size_t idx = 0;
  while (idx < cells.size()) {
    const int k = cells[idx].k;
    double inner = 0.0;
    for (; idx < cells.size() && cells[idx].k == k; ++idx) {
      const double a = std::abs(cells[idx].value);
      inner = q_inf ? std::max(inner, a) : inner + std::pow(a, q);
    }
    const double slice = q_inf ? inner : std::pow(inner * space_cell, 1.0 / q);
    outer = r_inf ? std::max(outer, slice) : outer + std::pow(slice, r);
  }
  NormValue nv;
  nv.value = r_inf ? outer : std::pow(outer * g.dt(), 1.0 / r);
  nv.kind = NormKind::LqrMixed;
  nv.q = q;
  nv.r = r;
  nv.region = region;
  return nv;
}

NormValue sup_norm(const SpaceTimeField& field, const Region& region) {
  require_inside(field, region, ErrorKind::RegionOutsideDomain);
  NormValue nv;
  nv.value = sup_oscillation(field, region).sup_abs;
  nv.kind = NormKind::Sup;
  nv.region = region;
  return nv;
}

}  // namespace holderlab
