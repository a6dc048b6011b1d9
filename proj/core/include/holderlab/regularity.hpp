#pragma once

// Empirical regularity measurements on intrinsic cylinders: oscillation
// ladders, power-law fits, Campanato sequences, the geometric iteration
// check and the Caccioppoli energy inequality.

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "holderlab/expressions.hpp"
#include "holderlab/geometry.hpp"

namespace holderlab {

struct LevelRecord {
  int k = 0;
  double radius = 0.0;
  double osc = 0.0;
  double sup_abs = 0.0;
  double campanato = 0.0;      // min over c of ||u - c||_{p,avg} on the level
  double best_constant = 0.0;  // the minimizing c_k
};

struct OscillationProfile {
  SpaceTimePoint center;
  double theta = 2.0;
  double lambda = 0.5;
  double base_radius = 1.0;
  double p = 2.0;
  int k_max = 0;
  /// Last level actually computed; smaller than k_max when the ladder reached
  /// cylinders below one grid cell.
  int k_max_effective = 0;
  double dx = 0.0;
  std::vector<LevelRecord> levels;

  bool truncated() const noexcept { return k_max_effective < k_max; }
};

/// Ladder of cylinders G_{r_k}(center), r_k = base_radius lambda^k, k = 0..k_max.
/// Throws CylinderOutsideDomain when the base cylinder leaves the domain and
/// InvalidArgument for lambda outside (0, 1/2] or p < 1.
OscillationProfile oscillation_profile(const SpaceTimeField& field, SpaceTimePoint center,
                                       double theta, double lambda, int k_max, double p = 2.0,
                                       double base_radius = 1.0);

/// Pure-time ladder on the segments {x0} x (t0 - r_k^theta, t0]. Only radius,
/// osc and sup_abs are filled in.
OscillationProfile time_oscillation_profile(const SpaceTimeField& field, SpaceTimePoint center,
                                            double theta, double lambda, int k_max,
                                            double base_radius = 1.0);

/// Best constant and the attained p-average distance over the given values.
std::pair<double, double> best_constant(std::span<const double> values, double p);

enum class ProfileQuantity { Osc, SupAbs, CampanatoPAvg };

std::string_view to_string(ProfileQuantity q) noexcept;
std::optional<ProfileQuantity> profile_quantity_from_string(std::string_view name);

struct FitWindow {
  int k_lo = 0;
  int k_hi = 0;
};

struct HolderFit {
  double exponent = 0.0;
  double log_constant = 0.0;
  double r_squared = 0.0;
  FitWindow window;
  int points = 0;
  int excluded_zero = 0;
};

/// Drops the base level and every level with radius < min_cells * dx.
FitWindow default_window(const OscillationProfile& profile, double min_cells = 8.0);

/// Least-squares slope of log(quantity) against log(radius). Values below
/// 1e-14 are excluded and counted. Throws InsufficientLevels (fewer than three
/// usable levels) and AllZeroLevels.
HolderFit fit_exponent(const OscillationProfile& profile, ProfileQuantity quantity,
                       std::optional<FitWindow> window = std::nullopt);

/// The same regression on raw (radius, value) pairs; the window indexes the span.
HolderFit fit_power_law(std::span<const double> radii, std::span<const double> values);

struct CampanatoReport {
  std::vector<double> diffs;  // |c_k - c_{k+1}|
  HolderFit decay;            // fitted rate of the diffs against r_k
  bool degenerate = false;    // every diff vanished
  double limit = 0.0;         // c_{k_max_effective}
  std::vector<double> distances;  // ||u - limit||_{p,avg,G_{r_k}}
  double constant = 0.0;          // smallest C with distances <= C (lambda^k)^rate
  bool inequality_holds = false;
};

/// Throws InsufficientLevels for fewer than four levels.
CampanatoReport campanato_sequence(const SpaceTimeField& field, const OscillationProfile& profile);

struct IterationLevel {
  int k = 0;
  double radius = 0.0;
  double sup_abs = 0.0;
  double bound = 0.0;  // (lambda^k)^gamma
  bool precondition = false;
  bool passes_unit = false;
};

struct IterationReport {
  std::vector<IterationLevel> levels;
  double smallest_constant = 0.0;
  int first_failing_level = -1;  // under C = 1; -1 when every level passes
  int k_max_effective = 0;
};

/// Checks sup |u| on G_{lambda^k} <= C (lambda^k)^gamma level by level.
/// Throws NotNormalized when sup |u| on the base cylinder exceeds 1 and
/// PreconditionNeverHolds when |u(center)| > (lambda^k)^gamma / 4 at every level.
IterationReport geometric_iteration_check(const SpaceTimeField& field, SpaceTimePoint center,
                                          double gamma, double theta, double lambda, int k_max,
                                          double base_radius = 1.0);

/// A cutoff xi with analytic derivatives (d/dx, d/dy, d/dt).
struct Cutoff {
  std::function<double(const SpaceTimePoint&)> value;
  std::function<std::array<double, 3>(const SpaceTimePoint&)> gradient;

  /// Product of (1 - s^2)^2 bumps in every coordinate, supported on the box
  /// spanned by `support` (a ball uses its bounding box inscribed in it).
  static Cutoff tensor_bump(const Region& support, int dim);
};

struct CaccioppoliReport {
  double lhs_sup_term = 0.0;
  double lhs_grad_term = 0.0;
  double rhs_time_term = 0.0;
  double rhs_space_term = 0.0;
  double rhs_source_term = 0.0;
  double ratio = 0.0;

  double lhs_total() const noexcept { return lhs_sup_term + lhs_grad_term; }
  double rhs_total() const noexcept { return rhs_time_term + rhs_space_term + rhs_source_term; }
};

/// Evaluates
///   sup_t int u^2 xi^2 + int int |u|^{m-1} |grad u|^2 xi^2
///     <= int int u^2 xi |xi_t| + int int |u|^{m+1} (|grad xi|^2 + xi^2) + ||f||^2_{L^{q,r}}
/// by nodal quadrature over `region` with centered-difference gradients.
/// Throws CutoffNotCompact, RegionOutsideDomain and GridTooCoarse.
CaccioppoliReport caccioppoli_check(const SpaceTimeField& field, const Cutoff& cutoff,
                                    const SourceTerm& source, double m, const Region& region);

}  // namespace holderlab
