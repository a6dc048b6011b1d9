#include "holderlab/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "holderlab/error.hpp"

namespace holderlab {

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

ConditionCheck make_check(std::string name, std::string expression, double lhs, double bound,
                          bool less_than) {
  ConditionCheck c;
  c.name = std::move(name);
  c.expression = std::move(expression);
  c.lhs = lhs;
  c.bound = bound;
  c.less_than = less_than;
  c.satisfied = less_than ? (lhs < bound) : (lhs > bound);
  return c;
}

}  // namespace

std::string_view to_string(EquationClass cls) noexcept {
  switch (cls) {
    case EquationClass::Heat: return "heat";
    case EquationClass::PParabolic: return "p-parabolic";
    case EquationClass::PME: return "pme";
    case EquationClass::DoublyNonlinear: return "doubly-nonlinear";
  }
  return "unknown";
}

std::optional<EquationClass> equation_class_from_string(std::string_view name) {
  if (name == "heat") return EquationClass::Heat;
  if (name == "p-parabolic" || name == "pparabolic") return EquationClass::PParabolic;
  if (name == "pme" || name == "porous-medium") return EquationClass::PME;
  if (name == "doubly-nonlinear" || name == "dnl") return EquationClass::DoublyNonlinear;
  return std::nullopt;
}

std::string_view to_string(Branch branch) noexcept {
  return branch == Branch::SourceLimited ? "source-limited" : "homogeneous-limited";
}

EquationParams EquationParams::heat(int n) {
  EquationParams e{EquationClass::Heat, 2.0, 1.0, n};
  e.validate();
  return e;
}

EquationParams EquationParams::p_parabolic(double p, int n) {
  EquationParams e{EquationClass::PParabolic, p, 1.0, n};
  e.validate();
  return e;
}

EquationParams EquationParams::porous_medium(double m, int n) {
  EquationParams e{EquationClass::PME, 2.0, m, n};
  e.validate();
  return e;
}

EquationParams EquationParams::doubly_nonlinear(double p, double m, int n) {
  EquationParams e{EquationClass::DoublyNonlinear, p, m, n};
  e.validate();
  return e;
}

void EquationParams::validate() const {
  auto fail = [this](const char* why) {
    std::ostringstream os;
    os << to_string(cls) << " with p=" << p << ", m=" << m << ", n=" << n << ": " << why;
    throw Error(ErrorKind::InvalidArgument, os.str());
  };
  if (n < 1) fail("dimension must be >= 1");
  if (!std::isfinite(p) || !std::isfinite(m)) fail("exponents must be finite");
  if (p < 2.0) fail("p must be >= 2");
  if (m < 1.0) fail("m must be >= 1");
  switch (cls) {
    case EquationClass::Heat:
      if (p != 2.0 || m != 1.0) fail("heat requires p = 2 and m = 1");
      break;
    case EquationClass::PParabolic:
      if (m != 1.0) fail("p-parabolic requires m = 1");
      break;
    case EquationClass::PME:
      if (p != 2.0) fail("porous medium requires p = 2");
      break;
    case EquationClass::DoublyNonlinear:
      break;
  }
}

LebesgueExponent LebesgueExponent::of(double value) {
  if (std::isnan(value) || !(value > 1.0)) {
    std::ostringstream os;
    os << "Lebesgue exponent must lie in (1, inf], got " << value;
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  return LebesgueExponent(std::isinf(value) ? 0.0 : 1.0 / value);
}

double LebesgueExponent::value() const noexcept {
  return inv_ == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / inv_;
}

HomogeneousExponent::HomogeneousExponent(double v, ExponentProvenance prov)
    : value_(v), provenance_(prov) {
  if (!(v > 0.0 && v <= 1.0)) {
    std::ostringstream os;
    os << "homogeneous exponent must lie in (0, 1], got " << v;
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
}

HomogeneousExponent HomogeneousExponent::known(double value) {
  return HomogeneousExponent(value, ExponentProvenance::Known);
}

HomogeneousExponent HomogeneousExponent::assumed(double value) {
  return HomogeneousExponent(value, ExponentProvenance::Assumed);
}

std::optional<HomogeneousExponent> default_pme_homogeneous(double m, int n) {
  if (m == 1.0) return HomogeneousExponent::known(1.0);
  if (n == 1) return HomogeneousExponent::known(std::min(1.0, 1.0 / (m - 1.0)));
  return std::nullopt;
}

double realized_exponent(const RegularityReport& report, double margin) noexcept {
  return report.open_interval ? report.alpha_space - margin : report.alpha_space;
}

namespace formula {

double p_parabolic_alpha(double p, int n, const SourceIntegrability& integ) {
  const double iq = integ.q.reciprocal();
  const double ir = integ.r.reciprocal();
  // p(1 - 1/r - n/(pq)) / ((2/r + n/q - 1) + p(1 - 1/r - n/(pq)))
  const double head = p * (1.0 - ir - n * iq / p);
  const double excess = 2.0 * ir + n * iq - 1.0;
  return head / (excess + head);
}

double heat_alpha(int n, const SourceIntegrability& integ) {
  return 1.0 - (2.0 * integ.r.reciprocal() + n * integ.q.reciprocal() - 1.0);
}

double pme_source_bound(double m, int n, const SourceIntegrability& integ) {
  const double iq = integ.q.reciprocal();
  const double ir = integ.r.reciprocal();
  return 2.0 * m * (1.0 - ir - 0.5 * n * iq) / (m * (1.0 - ir) + ir);
}

double dnl_source_bound(double p, double m, int n, const SourceIntegrability& integ) {
  const double iq = integ.q.reciprocal();
  const double ir = integ.r.reciprocal();
  const double s = m + p - 2.0;
  return s * (p - n * iq - p * ir) / ((p - 1.0) * ((1.0 - ir) * s + ir));
}

double theta_p_parabolic(double p, double alpha) { return p - (p - 2.0) * alpha; }

double theta_p_parabolic_interpolation(double p, double alpha) {
  return alpha * 2.0 + (1.0 - alpha) * p;
}

double theta_pme(double m, double alpha) { return 2.0 - (1.0 - 1.0 / m) * alpha; }

double theta_pme_interpolation(double m, double alpha) {
  return alpha * (1.0 + 1.0 / m) + (1.0 - alpha) * 2.0;
}

double theta_doubly_nonlinear(double p, double m, double beta) {
  return p - (m + p - 3.0) * beta;
}

}  // namespace formula

AdmissibilityVerdict check_admissibility(const EquationParams& params,
                                         const SourceIntegrability& integ) {
  const double iq = integ.q.reciprocal();
  const double ir = integ.r.reciprocal();
  const double n = params.n;
  AdmissibilityVerdict v;
  switch (params.cls) {
    case EquationClass::Heat:
    case EquationClass::PParabolic:
      v.conditions.push_back(make_check("borderline1", "1/r + n/(p q) < 1",
                                        ir + n * iq / params.p, 1.0, true));
      v.conditions.push_back(make_check("borderline2", "2/r + n/q > 1", 2.0 * ir + n * iq, 1.0,
                                        false));
      break;
    case EquationClass::PME:
      v.conditions.push_back(make_check("pme_integrability", "1/r + n/(2 q) < 1",
                                        ir + 0.5 * n * iq, 1.0, true));
      break;
    case EquationClass::DoublyNonlinear:
      if (params.m == 1.0) {
        return check_admissibility(EquationParams{EquationClass::PParabolic, params.p, 1.0, params.n},
                                   integ);
      }
      if (params.p == 2.0) {
        return check_admissibility(EquationParams{EquationClass::PME, 2.0, params.m, params.n}, integ);
      }
      v.conditions.push_back(make_check("borderline1", "1/r + n/(p q) < 1",
                                        ir + n * iq / params.p, 1.0, true));
      v.conditions.push_back(make_check("dnl_borderline2", "3/r + n/q > 2", 3.0 * ir + n * iq,
                                        2.0, false));
      break;
  }
  for (const auto& c : v.conditions) {
    if (!c.satisfied) v.failed_conditions.push_back(c);
  }
  v.admissible = v.failed_conditions.empty();
  return v;
}

RegularityReport sharp_exponents(const EquationParams& params, const SourceIntegrability& integ,
                                 std::optional<HomogeneousExponent> hom) {
  params.validate();
  const auto verdict = check_admissibility(params, integ);
  if (!verdict.admissible) {
    std::ostringstream os;
    os << to_string(params.cls) << " parameters fail";
    for (const auto& c : verdict.failed_conditions) {
      os << ' ' << c.name << " (" << c.expression << ", lhs=" << c.lhs << ')';
    }
    throw Error(ErrorKind::InadmissibleParameters, os.str());
  }

  RegularityReport rep;
  switch (params.cls) {
    case EquationClass::Heat: {
      rep.raw_alpha = rep.source_bound = formula::heat_alpha(params.n, integ);
      rep.alpha_space = rep.raw_alpha;
      rep.theta = 2.0;
      break;
    }
    case EquationClass::PParabolic: {
      rep.raw_alpha = rep.source_bound = formula::p_parabolic_alpha(params.p, params.n, integ);
      rep.alpha_space = rep.raw_alpha;
      rep.theta = formula::theta_p_parabolic(params.p, rep.raw_alpha);
      break;
    }
    case EquationClass::PME: {
      if (!hom) hom = default_pme_homogeneous(params.m, params.n);
      if (!hom) {
        throw Error(ErrorKind::MissingHomogeneousExponent,
                    "porous medium in n >= 2 needs a user-supplied alpha_0");
      }
      rep.source_bound = formula::pme_source_bound(params.m, params.n, integ);
      // Ties resolve to the closed source-limited value.
      if (rep.source_bound <= hom->value()) {
        rep.branch = Branch::SourceLimited;
        rep.raw_alpha = rep.source_bound;
      } else {
        rep.branch = Branch::HomogeneousLimited;
        rep.raw_alpha = hom->value();
        rep.open_interval = true;
      }
      rep.alpha_space = rep.raw_alpha / params.m;
      rep.theta = formula::theta_pme(params.m, rep.raw_alpha);
      break;
    }
    case EquationClass::DoublyNonlinear: {
      if (!hom && params.m == 1.0) hom = HomogeneousExponent::known(1.0);
      if (!hom) {
        throw Error(ErrorKind::MissingHomogeneousExponent,
                    "doubly nonlinear equation needs a user-supplied alpha_*");
      }
      rep.source_bound = formula::dnl_source_bound(params.p, params.m, params.n, integ);
      if (rep.source_bound <= hom->value()) {
        rep.branch = Branch::SourceLimited;
        rep.raw_alpha = rep.source_bound;
      } else {
        rep.branch = Branch::HomogeneousLimited;
        rep.raw_alpha = hom->value();
        rep.open_interval = true;
      }
      rep.alpha_space = rep.raw_alpha * (params.p - 1.0) / (params.m + params.p - 2.0);
      rep.theta = formula::theta_doubly_nonlinear(params.p, params.m, rep.alpha_space);
      break;
    }
  }
  rep.alpha_time = rep.alpha_space / rep.theta;
  return rep;
}

int p_monotonicity_sign(int n, double q, double r) {
  if (!(q > 0.0) || !(r > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "q and r must be positive");
  }
  if (std::isinf(r)) {
    if (std::isinf(q)) return -1;
    return sign_of(static_cast<double>(n) - q);
  }
  if (std::isinf(q)) return r == 2.0 ? 1 : sign_of(2.0 - r);
  return sign_of(q * (2.0 - r) + n * r);
}

}  // namespace holderlab
