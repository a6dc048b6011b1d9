#pragma once

// Explicit conservative finite-difference solvers for
//
//   u_t - div( m |u|^{m-1} (|grad u|^2 + eps^2)^{(p-2)/2} grad u ) = f
//
// which covers the heat (p = 2, m = 1), p-parabolic (m = 1), porous medium
// (p = 2) and doubly nonlinear equations with one update rule:
//
//   u_j^{k+1} = u_j^k + (dt/dx) (F_{j+1/2} - F_{j-1/2}) + dt f_j^k,
//   F_{j+1/2} = D(u_face, grad_face) (u_{j+1} - u_j)/dx,
//
// with u_face the arithmetic face average.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "holderlab/exponents.hpp"
#include "holderlab/expressions.hpp"
#include "holderlab/fields.hpp"

namespace holderlab {

enum class BoundaryKind { DirichletFromOracle, DirichletZero, Periodic };

std::string_view to_string(BoundaryKind kind) noexcept;
std::optional<BoundaryKind> boundary_kind_from_string(std::string_view name);

struct SolverConfig {
  double flux_regularization_eps = 1e-6;
  double cfl_safety = 0.4;
  BoundaryKind boundary = BoundaryKind::DirichletZero;
  std::int64_t max_steps = 200'000'000;
  /// Boundary values for DirichletFromOracle.
  std::function<double(const SpaceTimePoint&)> boundary_values;

  void validate() const;
};

struct SolveStats {
  std::int64_t steps = 0;
  double min_dt = 0.0;
  double max_dt = 0.0;
};

/// Largest explicit step: cfl_safety dx^2 / (2 n D_max), with D_max the
/// diffusivity at the given bounds. D_max == 0 falls back to cfl_safety dx^2.
double stable_dt(const GridSpec& grid, double field_bound, double grad_bound,
                 const EquationParams& params, const SolverConfig& cfg);

/// Evolves `initial` (one time level, nodes_per_level values) over the grid's
/// time extent and returns every stored level. The solver sub-steps between
/// stored levels, recomputing stable_dt each step; for p > 2 the step is
/// further divided by p - 1, the linearized p-flux diffusivity factor.
///
/// Throws BlowUp on a non-finite value and UnstableConfig once the step
/// count exceeds cfg.max_steps.
SpaceTimeField solve(const EquationParams& params, const SourceTerm& source,
                     std::span<const double> initial, const GridSpec& grid,
                     const SolverConfig& cfg, SolveStats* stats = nullptr);

/// Convenience overload sampling `initial` at t = grid.t.lo.
SpaceTimeField solve(const EquationParams& params, const SourceTerm& source,
                     const Expression& initial, const GridSpec& grid, const SolverConfig& cfg,
                     SolveStats* stats = nullptr);

struct ResidualReport {
  double max_residual = 0.0;
  double dx = 0.0;
  double dt = 0.0;
  SpaceTimePoint location;
};

/// max over interior nodes of |u_t - div(D grad u) - f|, u_t by centered
/// differences between stored levels and the divergence in the solver's flux
/// form. Throws GridTooCoarse.
ResidualReport residual(const SpaceTimeField& field, const EquationParams& params,
                        const SourceTerm& source, double flux_regularization_eps = 0.0);

/// Closed-form solutions used as oracles.
class ReferenceSolution {
 public:
  enum class Kind { HeatSeparable, HeatKernel, BarenblattPME, PowerProfile };

  /// sin(k pi x) [sin(k pi y)] exp(-n k^2 pi^2 t) on [0, 1]^n.
  static ReferenceSolution heat_separable(int k, int n = 1, double amplitude = 1.0);
  static ReferenceSolution heat_kernel(double mass, int n = 1, double x0 = 0.0);
  static ReferenceSolution barenblatt(double m, int n, double mass);
  static ReferenceSolution barenblatt_with_constant(double m, int n, double constant_c);
  /// |x - x0|^s, time independent.
  static ReferenceSolution power_profile(double s, double x0 = 0.0);

  Kind kind() const noexcept { return kind_; }
  /// Throws OutsideValidity (t <= 0 for the Barenblatt and heat kernel).
  double eval(const SpaceTimePoint& p) const;
  const Expression& expression() const noexcept { return expr_; }

  /// Barenblatt only: radius of the support at time t.
  double free_boundary(double t) const;
  double mass() const noexcept { return mass_; }
  double barenblatt_constant() const noexcept { return constant_c_; }
  double m() const noexcept { return m_; }
  int n() const noexcept { return n_; }

 private:
  ReferenceSolution(Kind kind, Expression expr) : kind_(kind), expr_(std::move(expr)) {}
  Kind kind_;
  Expression expr_;
  double m_ = 1.0;
  int n_ = 1;
  double mass_ = 0.0;
  double constant_c_ = 0.0;
};

}  // namespace holderlab
