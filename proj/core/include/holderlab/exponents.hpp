#pragma once

// Sharp Hölder exponents for degenerate parabolic equations with sources in
// the mixed Lebesgue space L^r(0,T; L^q(U)).
//
// Every formula is evaluated through the reciprocals 1/q and 1/r, so an
// infinite exponent is exact (1/inf == 0) rather than a large-number stand-in.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace holderlab {

enum class EquationClass { Heat, PParabolic, PME, DoublyNonlinear };

std::string_view to_string(EquationClass cls) noexcept;
std::optional<EquationClass> equation_class_from_string(std::string_view name);

/// Which equation is being solved and its structural exponents.
///
/// Heat is p = 2, m = 1. PParabolic has m = 1, PME has p = 2. The boundary
/// values p = 2 (PParabolic, DoublyNonlinear) and m = 1 (PME,
/// DoublyNonlinear) are accepted so that the reductions to the parent
/// equation can be evaluated through the same entry points.
struct EquationParams {
  EquationClass cls = EquationClass::Heat;
  double p = 2.0;
  double m = 1.0;
  int n = 1;

  static EquationParams heat(int n);
  static EquationParams p_parabolic(double p, int n);
  static EquationParams porous_medium(double m, int n);
  static EquationParams doubly_nonlinear(double p, double m, int n);

  /// Throws Error(InvalidArgument) when the exponents do not fit the class.
  void validate() const;
};

/// A Lebesgue exponent in (1, inf], stored by its reciprocal.
class LebesgueExponent {
 public:
  /// Accepts any value > 1, including +infinity.
  static LebesgueExponent of(double value);
  static LebesgueExponent infinity() { return LebesgueExponent(0.0); }

  double reciprocal() const noexcept { return inv_; }
  double value() const noexcept;
  bool is_infinite() const noexcept { return inv_ == 0.0; }

 private:
  explicit LebesgueExponent(double inv) : inv_(inv) {}
  double inv_;
};

/// Integrability of the source: f in L^r in time, L^q in space.
struct SourceIntegrability {
  LebesgueExponent q;
  LebesgueExponent r;

  static SourceIntegrability of(double q, double r) {
    return {LebesgueExponent::of(q), LebesgueExponent::of(r)};
  }
};

enum class ExponentProvenance { Known, Assumed };

/// Optimal Hölder exponent of the homogeneous equation (alpha_0 for PME,
/// alpha_* for the doubly nonlinear equation), in (0, 1].
class HomogeneousExponent {
 public:
  static HomogeneousExponent known(double value);
  static HomogeneousExponent assumed(double value);

  double value() const noexcept { return value_; }
  ExponentProvenance provenance() const noexcept { return provenance_; }

 private:
  HomogeneousExponent(double v, ExponentProvenance prov);
  double value_;
  ExponentProvenance provenance_;
};

/// alpha_0 = min{1, 1/(m-1)} is only established in one space dimension;
/// m == 1 is the heat equation where the homogeneous solutions are smooth.
std::optional<HomogeneousExponent> default_pme_homogeneous(double m, int n);

enum class Branch { SourceLimited, HomogeneousLimited };

std::string_view to_string(Branch branch) noexcept;

struct RegularityReport {
  double alpha_space = 0.0;  // alpha, gamma or beta depending on the class
  double alpha_time = 0.0;   // alpha_space / theta
  double theta = 2.0;
  Branch branch = Branch::SourceLimited;
  bool open_interval = false;  // alpha_space is a supremum, not attained
  double raw_alpha = 0.0;      // before division by m or the (p-1)/(m+p-2) factor
  double source_bound = 0.0;   // the integrability-limited candidate for raw_alpha
};

/// Exponent to use when a concrete value is needed: the supremum minus
/// `margin` for open intervals, the exponent itself otherwise.
double realized_exponent(const RegularityReport& report, double margin = 0.01) noexcept;

struct ConditionCheck {
  std::string name;
  std::string expression;
  double lhs = 0.0;
  double bound = 0.0;
  bool less_than = true;  // lhs < bound when true, lhs > bound otherwise
  bool satisfied = false;
};

struct AdmissibilityVerdict {
  bool admissible = false;
  std::vector<ConditionCheck> conditions;         // every evaluated condition
  std::vector<ConditionCheck> failed_conditions;  // empty iff admissible
};

/// The doubly nonlinear equation at m = 1 or p = 2 is checked against the
/// conditions of the equation it reduces to.
AdmissibilityVerdict check_admissibility(const EquationParams& params,
                                         const SourceIntegrability& integ);

/// Throws InadmissibleParameters or MissingHomogeneousExponent.
RegularityReport sharp_exponents(const EquationParams& params, const SourceIntegrability& integ,
                                 std::optional<HomogeneousExponent> hom = std::nullopt);

/// sign(q(2 - r) + n r), the sign of d(alpha)/dp for the p-parabolic
/// exponent. For r = inf the limit of the expression divided by r is used.
int p_monotonicity_sign(int n, double q, double r);

namespace formula {

/// ((pq - n)r - pq) / (q[(p-1)r - (p-2)]).
double p_parabolic_alpha(double p, int n, const SourceIntegrability& integ);

/// 1 - (2/r + n/q - 1).
double heat_alpha(int n, const SourceIntegrability& integ);

/// m[(2q - n)r - 2q] / (q[mr - (m-1)]).
double pme_source_bound(double m, int n, const SourceIntegrability& integ);

/// (m+p-2)[(pq - n)r - pq] / (q(p-1)[(r-1)(m+p-2) + 1]).
double dnl_source_bound(double p, double m, int n, const SourceIntegrability& integ);

/// p - (p-2) alpha, and the interpolation form 2 alpha + (1 - alpha) p.
double theta_p_parabolic(double p, double alpha);
double theta_p_parabolic_interpolation(double p, double alpha);

/// 2 - (1 - 1/m) alpha, and alpha (1 + 1/m) + (1 - alpha) 2.
double theta_pme(double m, double alpha);
double theta_pme_interpolation(double m, double alpha);

/// p - (m + p - 3) beta: the time exponent of the doubly nonlinear
/// equation's intrinsic scaling; reduces to both forms above.
double theta_doubly_nonlinear(double p, double m, double beta);

}  // namespace formula

}  // namespace holderlab
