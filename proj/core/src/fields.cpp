#include "holderlab/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "holderlab/error.hpp"

namespace holderlab {

namespace {

bool within(double v, const Interval& iv, double rel_tol) {
  const double slack = rel_tol * std::max(1.0, std::abs(iv.length()));
  return v >= iv.lo - slack && v <= iv.hi + slack;
}

// Cell index containing coordinate v on a uniform axis with n points.
int locate(double v, double lo, double h, int n, double& frac) {
  double s = (v - lo) / h;
  // Snap to nodes so node lookups are exact despite rounding in lo + i*h.
  const double nearest = std::round(s);
  if (std::abs(s - nearest) < 1e-9) s = nearest;
  int i = static_cast<int>(std::floor(s));
  i = std::clamp(i, 0, n - 2);
  frac = std::clamp(s - i, 0.0, 1.0);
  return i;
}

struct IndexRange {
  int lo;
  int hi;  // inclusive, may be < lo for an empty range
};

IndexRange candidate_cells(double a, double b, double lo, double h, int ncells) {
  const int first = static_cast<int>(std::floor((a - lo) / h)) - 1;
  const int last = static_cast<int>(std::ceil((b - lo) / h)) + 1;
  return {std::max(first, 0), std::min(last, ncells - 1)};
}

}  // namespace

GridSpec GridSpec::line(Interval x, int nx, Interval t, int nt) {
  GridSpec g;
  g.dim = 1;
  g.x = x;
  g.nx = nx;
  g.t = t;
  g.nt = nt;
  g.validate();
  return g;
}

GridSpec GridSpec::square(Interval x, Interval y, int nx, Interval t, int nt) {
  GridSpec g;
  g.dim = 2;
  g.x = x;
  g.y = y;
  g.nx = nx;
  g.t = t;
  g.nt = nt;
  g.validate();
  return g;
}

void GridSpec::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorKind::InvalidArgument, "grid: " + why); };
  if (dim != 1 && dim != 2) fail("dimension must be 1 or 2");
  if (nx < 3) fail("nx must be >= 3");
  if (nt < 2) fail("nt must be >= 2");
  if (!(x.length() > 0.0) || !std::isfinite(x.length())) fail("empty x extent");
  if (dim == 2 && (!(y.length() > 0.0) || !std::isfinite(y.length()))) fail("empty y extent");
  if (!(t.length() > 0.0) || !std::isfinite(t.length())) fail("empty time extent");
}

bool GridSpec::contains(const SpaceTimePoint& p, double rel_tol) const noexcept {
  if (!within(p.x, x, rel_tol) || !within(p.t, t, rel_tol)) return false;
  return dim == 1 || within(p.y, y, rel_tol);
}

bool operator==(const GridSpec& a, const GridSpec& b) noexcept {
  return a.dim == b.dim && a.x.lo == b.x.lo && a.x.hi == b.x.hi && a.nx == b.nx &&
         a.t.lo == b.t.lo && a.t.hi == b.t.hi && a.nt == b.nt &&
         (a.dim == 1 || (a.y.lo == b.y.lo && a.y.hi == b.y.hi));
}

Region Region::ball(double cx, double cy, double radius, Interval time) {
  Region r;
  r.shape = Shape::Ball;
  r.cx = cx;
  r.cy = cy;
  r.half_x = r.half_y = radius;
  r.time = time;
  return r;
}

Region Region::box(Interval x, Interval y, Interval time) {
  Region r;
  r.shape = Shape::Box;
  r.cx = 0.5 * (x.lo + x.hi);
  r.cy = 0.5 * (y.lo + y.hi);
  r.half_x = 0.5 * x.length();
  r.half_y = 0.5 * y.length();
  r.time = time;
  return r;
}

Region Region::whole(const GridSpec& grid) { return box(grid.x, grid.y, grid.t); }

bool Region::contains_space(double x, double y, int dim) const noexcept {
  const double ddx = x - cx;
  const double ddy = dim == 2 ? y - cy : 0.0;
  if (shape == Shape::Ball) return ddx * ddx + ddy * ddy <= half_x * half_x;
  return std::abs(ddx) <= half_x && (dim == 1 || std::abs(ddy) <= half_y);
}

bool Region::contains(const SpaceTimePoint& p, int dim) const noexcept {
  return p.t >= time.lo && p.t <= time.hi && contains_space(p.x, p.y, dim);
}

bool Region::inside(const GridSpec& grid, double rel_tol) const noexcept {
  if (!within(cx - half_x, grid.x, rel_tol) || !within(cx + half_x, grid.x, rel_tol)) return false;
  if (grid.dim == 2) {
    const double hy = shape == Shape::Ball ? half_x : half_y;
    if (!within(cy - hy, grid.y, rel_tol) || !within(cy + hy, grid.y, rel_tol)) return false;
  }
  return within(time.lo, grid.t, rel_tol) && within(time.hi, grid.t, rel_tol);
}

double Region::measure(int dim) const noexcept {
  double space = 0.0;
  if (shape == Shape::Ball) {
    space = dim == 1 ? 2.0 * half_x : std::numbers::pi * half_x * half_x;
  } else {
    space = dim == 1 ? 2.0 * half_x : 4.0 * half_x * half_y;
  }
  return space * time.length();
}

SpaceTimeField::SpaceTimeField(GridSpec grid, std::vector<double> values, std::string name,
                               std::string provenance)
    : grid_(grid), values_(std::move(values)), name_(std::move(name)),
      provenance_(std::move(provenance)) {
  grid_.validate();
  if (values_.size() != grid_.size()) {
    std::ostringstream os;
    os << "field '" << name_ << "' has " << values_.size() << " values, grid needs "
       << grid_.size();
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  for (std::size_t idx = 0; idx < values_.size(); ++idx) {
    if (!std::isfinite(values_[idx])) {
      std::ostringstream os;
      os << "field '" << name_ << "' has a non-finite value at flat index " << idx;
      throw Error(ErrorKind::InvalidArgument, os.str());
    }
  }
}

std::span<const double> SpaceTimeField::level(int k) const {
  if (k < 0 || k >= grid_.nt) throw Error(ErrorKind::OutOfDomain, "time level out of range");
  return std::span<const double>(values_).subspan(
      static_cast<std::size_t>(k) * grid_.nodes_per_level(), grid_.nodes_per_level());
}

double SpaceTimeField::eval(const SpaceTimePoint& p) const {
  if (!grid_.contains(p)) {
    std::ostringstream os;
    os << "point (" << p.x << ", " << p.y << ", " << p.t << ") outside field '" << name_ << "'";
    throw Error(ErrorKind::OutOfDomain, os.str());
  }
  double wx = 0.0, wy = 0.0, wt = 0.0;
  const int i = locate(p.x, grid_.x.lo, grid_.dx(), grid_.nx, wx);
  const int k = locate(p.t, grid_.t.lo, grid_.dt(), grid_.nt, wt);
  if (grid_.dim == 1) {
    const double a = (1.0 - wx) * at(k, i) + wx * at(k, i + 1);
    const double b = (1.0 - wx) * at(k + 1, i) + wx * at(k + 1, i + 1);
    return (1.0 - wt) * a + wt * b;
  }
  const int j = locate(p.y, grid_.y.lo, grid_.dy(), grid_.nx, wy);
  auto bilinear = [&](int kk) {
    const double lo = (1.0 - wx) * at(kk, i, j) + wx * at(kk, i + 1, j);
    const double hi = (1.0 - wx) * at(kk, i, j + 1) + wx * at(kk, i + 1, j + 1);
    return (1.0 - wy) * lo + wy * hi;
  };
  return (1.0 - wt) * bilinear(k) + wt * bilinear(k + 1);
}

double SpaceTimeField::min_value() const { return *std::min_element(values_.begin(), values_.end()); }

double SpaceTimeField::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

std::vector<CellSample> cell_samples(const SpaceTimeField& field, const Region& region) {
  const GridSpec& g = field.grid();
  const double dx = g.dx(), dy = g.dy(), dt = g.dt();
  const auto kr = candidate_cells(region.time.lo, region.time.hi, g.t.lo, dt, g.nt - 1);
  const auto ir = candidate_cells(region.cx - region.half_x, region.cx + region.half_x, g.x.lo, dx,
                                  g.nx - 1);
  IndexRange jr{0, 0};
  if (g.dim == 2) {
    const double hy = region.shape == Region::Shape::Ball ? region.half_x : region.half_y;
    jr = candidate_cells(region.cy - hy, region.cy + hy, g.y.lo, dy, g.nx - 1);
  }

  std::vector<CellSample> out;
  for (int k = kr.lo; k <= kr.hi; ++k) {
    const double tc = g.t.lo + (k + 0.5) * dt;
    if (tc < region.time.lo || tc > region.time.hi) continue;
    for (int j = jr.lo; j <= jr.hi; ++j) {
      const double yc = g.dim == 2 ? g.y.lo + (j + 0.5) * dy : 0.0;
      for (int i = ir.lo; i <= ir.hi; ++i) {
        const double xc = g.x.lo + (i + 0.5) * dx;
        if (!region.contains_space(xc, yc, g.dim)) continue;
        double v = 0.0;
        if (g.dim == 1) {
          v = 0.25 * (field.at(k, i) + field.at(k, i + 1) + field.at(k + 1, i) +
                      field.at(k + 1, i + 1));
        } else {
          for (int kk = k; kk <= k + 1; ++kk) {
            v += field.at(kk, i, j) + field.at(kk, i + 1, j) + field.at(kk, i, j + 1) +
                 field.at(kk, i + 1, j + 1);
          }
          v *= 0.125;
        }
        out.push_back({k, i, j, v});
      }
    }
  }
  return out;
}

double integrate_region(const SpaceTimeField& field, const Region& region, double power) {
  const auto cells = cell_samples(field, region);
  if (cells.empty()) {
    throw Error(ErrorKind::EmptyIntersection, "no cell centers inside the integration region");
  }
  double sum = 0.0;
  if (power == 0.0) {
    sum = static_cast<double>(cells.size());
  } else if (power == 1.0) {
    for (const auto& c : cells) sum += std::abs(c.value);
  } else if (power == 2.0) {
    for (const auto& c : cells) sum += c.value * c.value;
  } else {
    for (const auto& c : cells) sum += std::pow(std::abs(c.value), power);
  }
  return sum * field.grid().cell_volume();
}

SpaceTimeField sample(const PointFunction& fn, const GridSpec& grid, std::string name,
                      std::string provenance) {
  grid.validate();
  std::vector<double> values(grid.size());
  std::size_t idx = 0;
  for (int k = 0; k < grid.nt; ++k) {
    const double t = grid.t_at(k);
    for (int j = 0; j < grid.ny(); ++j) {
      const double y = grid.y_at(j);
      for (int i = 0; i < grid.nx; ++i, ++idx) {
        const SpaceTimePoint p{grid.x_at(i), y, t};
        const double v = fn(p);
        if (!std::isfinite(v)) {
          std::ostringstream os;
          os << "expression is not finite at (" << p.x << ", " << p.y << ", " << p.t << ")";
          throw Error(ErrorKind::EvaluationFailure, os.str());
        }
        values[idx] = v;
      }
    }
  }
  return SpaceTimeField(grid, std::move(values), std::move(name), std::move(provenance));
}

}  // namespace holderlab
