#pragma once

// Intrinsic theta-parabolic cylinders, the norms measured on them, and the
// anisotropic rescalings that move a problem between scales.

#include <optional>
#include <string_view>

#include "holderlab/fields.hpp"

namespace holderlab {

/// G_tau(x0, t0) = (t0 - tau^theta, t0) x B_tau(x0).
struct IntrinsicCylinder {
  SpaceTimePoint center;
  double radius = 1.0;
  double theta = 2.0;

  double time_extent() const;
  Interval time_interval() const;
  Region region() const;
  /// Same center and theta with a smaller radius.
  bool contains(const IntrinsicCylinder& inner) const noexcept;
};

/// Throws NonPositiveRadius for tau <= 0 and InvalidArgument for theta < 1.
IntrinsicCylinder make_cylinder(SpaceTimePoint center, double tau, double theta);

struct Oscillation {
  double osc = 0.0;      // max - min
  double sup_abs = 0.0;  // max |u|
  double max = 0.0;
  double min = 0.0;
};

/// Extrema of the interpolated field over the closed cylinder. In one space
/// dimension the result is exact for the piecewise-bilinear interpolant.
/// Throws CylinderOutsideDomain.
Oscillation sup_oscillation(const SpaceTimeField& field, const IntrinsicCylinder& cyl);
Oscillation sup_oscillation(const SpaceTimeField& field, const Region& region);

enum class NormKind { Sup, PAvg, LqrMixed };

struct NormValue {
  double value = 0.0;
  NormKind kind = NormKind::Sup;
  double p = 0.0;  // PAvg exponent
  double q = 0.0;  // LqrMixed space exponent
  double r = 0.0;  // LqrMixed time exponent
  Region region;
};

/// (average over Q of |u|^p)^{1/p}. Throws RegionOutsideDomain.
NormValue p_avg_norm(const SpaceTimeField& field, const Region& region, double p);

/// The same quantity through |Q|^{-1/p} ||u||_{p,Q}; |Q| is the discrete
/// measure of the cells used by the quadrature.
double p_avg_norm_via_measure(const SpaceTimeField& field, const Region& region, double p);

/// L^r in time of the spatial L^q norms; q, r in [1, inf].
NormValue lqr_norm(const SpaceTimeField& field, const Region& region, double q, double r);

NormValue sup_norm(const SpaceTimeField& field, const Region& region);

enum class ScalingKind { PoissonZoom, PPoissonNormalize, PmeZoom, PmeNormalize };

std::string_view to_string(ScalingKind kind) noexcept;
std::optional<ScalingKind> scaling_kind_from_string(std::string_view name);

/// Parameters of the four rescalings; each kind reads its own subset.
///   PoissonZoom:       lambda, p_hat, n
///   PPoissonNormalize: rho, p
///   PmeZoom:           lambda, k, theta, gamma, alpha
///   PmeNormalize:      rho, a, m
struct ScalingParams {
  double lambda = 1.0;
  double rho = 1.0;
  double p_hat = 2.0;
  int n = 1;
  double p = 2.0;
  int k = 1;
  double theta = 2.0;
  double gamma = 1.0;
  double alpha = 1.0;
  double a = 1.0;
  double m = 1.0;
};

/// v(x, t) = amplitude_factor * u(space_factor * x, time_factor * t), with
/// source f~(x, t) = source_factor * f(space_factor * x, time_factor * t).
struct AnisotropicScaling {
  ScalingKind kind = ScalingKind::PoissonZoom;
  double space_factor = 1.0;
  double time_factor = 1.0;
  double amplitude_factor = 1.0;
  double source_factor = 1.0;
  ScalingParams params;
};

/// Throws InvalidScaleParameter.
AnisotropicScaling build_scaling(ScalingKind kind, const ScalingParams& params);

/// Samples v(xi, s) = amplitude * u(anchor.x + space*xi, anchor.t + time*s)
/// on `target` (local coordinates around `anchor`). Throws ScaledDomainEscapes.
SpaceTimeField apply_scaling(const SpaceTimeField& field, const AnisotropicScaling& sc,
                             const GridSpec& target, SpaceTimePoint anchor = {});

/// Same map applied with the source factor instead of the amplitude factor.
SpaceTimeField apply_source_scaling(const SpaceTimeField& source, const AnisotropicScaling& sc,
                                    const GridSpec& target, SpaceTimePoint anchor = {});

struct NormFactor {
  /// ||f~||_{L^{q,r}(G)} = norm_factor * ||f||_{L^{q,r}(image of G)}.
  double norm_factor = 1.0;
  /// The same relation for the r-th powers (equals norm_factor when r = inf).
  double power_factor = 1.0;
  /// Exponent of the base scale (lambda per zoom level, or rho) in
  /// power_factor: [(2 - alpha) q - n] r/q - theta for PmeZoom,
  /// (m + 2a) r - a(n r/q + 2) - (m - 1) for PmeNormalize,
  /// (p - 1) r - (p - 2) for PPoissonNormalize. Infinite when r = inf.
  double power_exponent = 0.0;
  int exponent_sign = 0;
};

/// Predicted factor relating the transformed source norm to the original
/// source norm on the shrunken region.
NormFactor scaling_norm_factor(const AnisotropicScaling& sc, double q, double r, int n);

/// Image of the base cylinder G_1 (around `anchor`) under the map, i.e. the
/// region where the original source is measured.
Region scaled_region(const AnisotropicScaling& sc, const Region& local, SpaceTimePoint anchor = {});

/// Smallest integer a >= 1 with (m + 2a) r - a(n r/q + 2) - (m - 1) > 0.
int pme_smallness_a(double m, int n, double q, double r);

struct SmallnessResult {
  AnisotropicScaling scaling;
  double field_norm = 0.0;   // ||v|| on G_1 after scaling
  double source_norm = 0.0;  // ||f~||_{L^{q,r}(G_1)} after scaling
  int evaluations = 0;
  bool satisfied = false;
};

struct SmallnessTargets {
  double epsilon = 1e-2;
  double q = 2.0;
  double r = 2.0;
  int resolution = 101;  // nodes per axis of the local G_1 sampling grid
};

/// Finds rho in (0, 1) with ||v||_{p,avg,G_1} <= 1 and ||f~|| <= epsilon for
/// the p-Poisson normalization v = rho u(x, rho^{p-2} t). At most 60
/// evaluations; the returned norms come from direct evaluation.
SmallnessResult find_p_poisson_smallness(const SpaceTimeField& u, const SpaceTimeField& f,
                                         double p, int n, const SmallnessTargets& targets,
                                         SpaceTimePoint anchor = {});

/// Same for the porous medium normalization v = rho u(rho^a x, rho^{m-1+2a} t)
/// with ||v||_{inf,G_1} <= 1; a comes from pme_smallness_a.
SmallnessResult find_pme_smallness(const SpaceTimeField& u, const SpaceTimeField& f, double m,
                                   int n, const SmallnessTargets& targets,
                                   SpaceTimePoint anchor = {});

}  // namespace holderlab
