#include <cmath>
#include <sstream>

#include "holderlab/error.hpp"
#include "holderlab/solvers.hpp"

namespace holderlab {

ReferenceSolution ReferenceSolution::heat_separable(int k, int n, double amplitude) {
  if (k < 1 || (n != 1 && n != 2)) {
    throw Error(ErrorKind::InvalidArgument, "heat_separable needs k >= 1 and n in {1, 2}");
  }
  ReferenceSolution r(Kind::HeatSeparable, Expression::heat_mode(k, amplitude, n));
  r.n_ = n;
  return r;
}

ReferenceSolution ReferenceSolution::heat_kernel(double mass, int n, double x0) {
  if (!(mass > 0.0) || (n != 1 && n != 2)) {
    throw Error(ErrorKind::InvalidArgument, "heat_kernel needs mass > 0 and n in {1, 2}");
  }
  ReferenceSolution r(Kind::HeatKernel, Expression::heat_kernel(mass, n, x0));
  r.n_ = n;
  r.mass_ = mass;
  return r;
}

ReferenceSolution ReferenceSolution::barenblatt(double m, int n, double mass) {
  return barenblatt_with_constant(m, n, barenblatt_constant_for_mass(m, n, mass));
}

ReferenceSolution ReferenceSolution::barenblatt_with_constant(double m, int n, double constant_c) {
  if (!(m > 1.0) || (n != 1 && n != 2) || !(constant_c > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "barenblatt needs m > 1, n in {1, 2} and C > 0");
  }
  ReferenceSolution r(Kind::BarenblattPME, Expression::barenblatt(m, n, constant_c));
  r.m_ = m;
  r.n_ = n;
  r.constant_c_ = constant_c;
  r.mass_ = barenblatt_mass_for_constant(m, n, constant_c);
  return r;
}

ReferenceSolution ReferenceSolution::power_profile(double s, double x0) {
  if (!(s > 0.0)) throw Error(ErrorKind::InvalidArgument, "power_profile needs s > 0");
  return ReferenceSolution(Kind::PowerProfile, Expression::power(s, 1.0, x0));
}

double ReferenceSolution::eval(const SpaceTimePoint& p) const {
  if ((kind_ == Kind::BarenblattPME || kind_ == Kind::HeatKernel) && !(p.t > 0.0)) {
    std::ostringstream os;
    os << "reference solution defined for t > 0 only, got t = " << p.t;
    throw Error(ErrorKind::OutsideValidity, os.str());
  }
  return expr_(p);
}

double ReferenceSolution::free_boundary(double t) const {
  if (kind_ != Kind::BarenblattPME) {
    throw Error(ErrorKind::UnsupportedKind, "free_boundary needs a Barenblatt solution");
  }
  if (!(t > 0.0)) throw Error(ErrorKind::OutsideValidity, "free_boundary needs t > 0");
  const auto e = barenblatt_exponents(m_, n_);
  return std::sqrt(constant_c_ / e.b) * std::pow(t, e.a / n_);
}

}  // namespace holderlab
