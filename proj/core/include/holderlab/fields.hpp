#pragma once

// Uniform space-time grids and scalar fields sampled on them.
//
// Storage is row-major with time outermost: value(k, i, j) lives at
// k * nodes_per_level + j * nx + i. Off-node values come from multilinear
// interpolation in (x[, y], t).

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace holderlab {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double length() const noexcept { return hi - lo; }
};

struct SpaceTimePoint {
  double x = 0.0;
  double y = 0.0;  // ignored in one space dimension
  double t = 0.0;
};

struct GridSpec {
  int dim = 1;
  Interval x{0.0, 1.0};
  Interval y{0.0, 1.0};
  int nx = 3;  // points per spatial axis
  Interval t{0.0, 1.0};
  int nt = 2;

  static GridSpec line(Interval x, int nx, Interval t, int nt);
  static GridSpec square(Interval x, Interval y, int nx, Interval t, int nt);

  /// Throws InvalidArgument on a malformed grid.
  void validate() const;

  double dx() const noexcept { return x.length() / (nx - 1); }
  double dy() const noexcept { return dim == 2 ? y.length() / (nx - 1) : 1.0; }
  double dt() const noexcept { return t.length() / (nt - 1); }
  double x_at(int i) const noexcept { return x.lo + i * dx(); }
  double y_at(int j) const noexcept { return dim == 2 ? y.lo + j * dy() : 0.0; }
  double t_at(int k) const noexcept { return t.lo + k * dt(); }
  int ny() const noexcept { return dim == 2 ? nx : 1; }
  std::size_t nodes_per_level() const noexcept {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny());
  }
  std::size_t size() const noexcept { return nodes_per_level() * static_cast<std::size_t>(nt); }
  double cell_volume() const noexcept { return dx() * (dim == 2 ? dy() : 1.0) * dt(); }

  bool contains(const SpaceTimePoint& p, double rel_tol = 1e-12) const noexcept;
};

bool operator==(const GridSpec& a, const GridSpec& b) noexcept;

/// A space-time region: a ball (or axis-aligned box) in space times an open
/// time interval. Cylinders, rectangles and scaled images all map onto it.
struct Region {
  enum class Shape { Ball, Box };

  Shape shape = Shape::Box;
  double cx = 0.0;
  double cy = 0.0;
  double half_x = 1.0;  // ball radius when shape == Ball
  double half_y = 1.0;
  Interval time{0.0, 1.0};

  static Region ball(double cx, double cy, double radius, Interval time);
  static Region box(Interval x, Interval y, Interval time);
  static Region whole(const GridSpec& grid);

  bool contains_space(double x, double y, int dim) const noexcept;
  bool contains(const SpaceTimePoint& p, int dim) const noexcept;
  /// Whether the closed region lies inside the grid's space-time domain.
  bool inside(const GridSpec& grid, double rel_tol = 1e-12) const noexcept;
  /// Exact geometric measure in `dim` space dimensions.
  double measure(int dim) const noexcept;
};

class SpaceTimeField {
 public:
  SpaceTimeField() = default;
  /// Throws InvalidArgument on a size mismatch or a non-finite value.
  SpaceTimeField(GridSpec grid, std::vector<double> values, std::string name = {},
                 std::string provenance = {});

  const GridSpec& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> level(int k) const;

  double at(int k, int i, int j = 0) const noexcept {
    return values_[static_cast<std::size_t>(k) * grid_.nodes_per_level() +
                   static_cast<std::size_t>(j) * grid_.nx + i];
  }

  /// Multilinear interpolation; exact at nodes. Throws OutOfDomain.
  double eval(const SpaceTimePoint& p) const;

  const std::string& name() const noexcept { return name_; }
  const std::string& provenance() const noexcept { return provenance_; }
  const std::map<std::string, std::string>& metadata() const noexcept { return metadata_; }
  void set_metadata(const std::string& key, const std::string& value) { metadata_[key] = value; }

  double min_value() const;
  double max_value() const;

 private:
  GridSpec grid_;
  std::vector<double> values_;
  std::string name_;
  std::string provenance_;
  std::map<std::string, std::string> metadata_;
};

/// Value at a cell center (the average of the cell's corner nodes) and the
/// cell's indices. Cells are [x_i, x_{i+1}] x [t_k, t_{k+1}] (x [y_j, y_{j+1}]).
struct CellSample {
  int k = 0;
  int i = 0;
  int j = 0;
  double value = 0.0;
};

/// Cells whose centers lie inside `region`, ordered time-outer.
std::vector<CellSample> cell_samples(const SpaceTimeField& field, const Region& region);

/// Midpoint-rule integral of |u|^power over the cells whose centers lie in
/// `region`. power == 0 gives the discrete measure. Throws EmptyIntersection.
double integrate_region(const SpaceTimeField& field, const Region& region, double power);

using PointFunction = std::function<double(const SpaceTimePoint&)>;

/// Node-exact sampling. Throws EvaluationFailure on a non-finite value.
SpaceTimeField sample(const PointFunction& fn, const GridSpec& grid, std::string name = {},
                      std::string provenance = {});

}  // namespace holderlab
