#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include "holderlab/error.hpp"
#include "holderlab/solvers.hpp"

using namespace holderlab;

namespace {

constexpr double kPi = std::numbers::pi;

double linf_error_at_last(const SpaceTimeField& u, const ReferenceSolution& ref) {
  const auto& g = u.grid();
  const int k = g.nt - 1;
  double err = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx; ++i) {
      err = std::max(err, std::abs(u.at(k, i, j) - ref.eval({g.x_at(i), g.y_at(j), g.t_at(k)})));
    }
  }
  return err;
}

double heat_error(int nx) {
  const auto ref = ReferenceSolution::heat_separable(1);
  const auto grid = GridSpec::line({0, 1}, nx, {0, 0.1}, 11);
  const auto u = solve(EquationParams::heat(1), SourceTerm::zero(), ref.expression(), grid, {});
  return linf_error_at_last(u, ref);
}

double barenblatt_error(int nx) {
  const auto ref = ReferenceSolution::barenblatt_with_constant(2, 1, 1.0);
  const auto grid = GridSpec::line({-6, 6}, nx, {1, 2}, 11);
  SolverConfig cfg;
  cfg.boundary = BoundaryKind::DirichletFromOracle;
  cfg.boundary_values = [&](const SpaceTimePoint& p) { return ref.eval(p); };
  const auto u = solve(EquationParams::porous_medium(2, 1), SourceTerm::zero(), ref.expression(),
                       grid, cfg);
  return linf_error_at_last(u, ref);
}

bool bitwise_equal(const SpaceTimeField& a, const SpaceTimeField& b) {
  return a.values().size() == b.values().size() &&
         std::memcmp(a.values().data(), b.values().data(), a.values().size() * sizeof(double)) == 0;
}

double level_sum(const SpaceTimeField& u, int k, int count) {
  double s = 0.0;
  for (int i = 0; i < count; ++i) s += u.at(k, i);
  return s;
}

// p-Laplacian Barenblatt profile for p = 3, n = 1.
double p_barenblatt(const SpaceTimePoint& q) {
  const double xi = std::abs(q.x) * std::pow(q.t, -0.25);
  const double core = std::max(0.0, 1.0 - std::pow(xi, 1.5) / 6.0);
  return std::pow(q.t, -0.25) * core * core;
}

}  // namespace

TEST(StableDt, Examples) {
  SolverConfig cfg;
  const auto g = GridSpec::line({0, 1}, 101, {0, 1}, 2);
  EXPECT_NEAR(stable_dt(g, 1.0, 1.0, EquationParams::heat(1), cfg), 2e-5, 1e-18);
  EXPECT_NEAR(stable_dt(g, 0.0, 3.0, EquationParams::porous_medium(2, 1), cfg), 0.4e-4, 1e-18);
  cfg.flux_regularization_eps = 0.0;
  EXPECT_NEAR(stable_dt(g, 1.0, 2.0, EquationParams::p_parabolic(4, 1), cfg), 0.4e-4 / 8.0, 1e-18);
}

TEST(Solve, HeatSeparableOracle) {
  EXPECT_LE(heat_error(257), 5e-4);
}

TEST(Solve, HeatRefinementConverges) {
  EXPECT_GE(heat_error(129) / heat_error(257), 1.5);
}

TEST(Solve, HeatInTwoDimensions) {
  const auto ref = ReferenceSolution::heat_separable(1, 2);
  const auto grid = GridSpec::square({0, 1}, {0, 1}, 41, {0, 0.05}, 3);
  const auto u = solve(EquationParams::heat(2), SourceTerm::zero(), ref.expression(), grid, {});
  EXPECT_LE(linf_error_at_last(u, ref), 2e-3);
}

TEST(Solve, BarenblattOracleAndRefinement) {
  const double coarse = barenblatt_error(513);
  const double fine = barenblatt_error(1025);
  EXPECT_LE(fine, 1e-2);
  EXPECT_GE(coarse / fine, 1.5);
}

TEST(Solve, ReductionLatticeIsBitwise) {
  const auto grid = GridSpec::line({-2, 2}, 81, {0, 0.05}, 6);
  const auto init = Expression::sum(Expression::gaussian(0.4, 1.0), Expression::constant(0.1));
  const auto src = SourceTerm::closed_form(Expression::trig(2.0, 0.3), 4, 4);
  SolverConfig cfg;
  cfg.flux_regularization_eps = 0.0;
  auto run = [&](const EquationParams& e) { return solve(e, src, init, grid, cfg); };

  EXPECT_TRUE(bitwise_equal(run(EquationParams::p_parabolic(2, 1)), run(EquationParams::heat(1))));
  EXPECT_TRUE(bitwise_equal(run(EquationParams::porous_medium(1, 1)), run(EquationParams::heat(1))));
  EXPECT_TRUE(bitwise_equal(run(EquationParams::doubly_nonlinear(3, 1, 1)),
                            run(EquationParams::p_parabolic(3, 1))));
  EXPECT_TRUE(bitwise_equal(run(EquationParams::doubly_nonlinear(2, 2, 1)),
                            run(EquationParams::porous_medium(2, 1))));
}

TEST(Solve, PeriodicConservation) {
  const auto grid = GridSpec::line({0, 1}, 65, {0, 0.05}, 11);
  const auto init = Expression::sum(Expression::constant(1.0), Expression::trig(2 * kPi, 0.5));
  SolverConfig cfg;
  cfg.boundary = BoundaryKind::Periodic;
  for (const auto& e : {EquationParams::heat(1), EquationParams::porous_medium(2, 1),
                        EquationParams::p_parabolic(3, 1)}) {
    SolveStats stats;
    const auto u = solve(e, SourceTerm::zero(), init, grid, cfg, &stats);
    const double m0 = level_sum(u, 0, grid.nx - 1);
    for (int k = 1; k < grid.nt; ++k) {
      EXPECT_NEAR(level_sum(u, k, grid.nx - 1), m0, 1e-10 * static_cast<double>(stats.steps));
    }
  }
}

TEST(Solve, CompactSupportConservationAndMaxPrinciple) {
  const auto ref = ReferenceSolution::barenblatt_with_constant(2, 1, 1.0);
  const auto grid = GridSpec::line({-6, 6}, 257, {1, 2}, 21);
  SolveStats stats;
  const auto u = solve(EquationParams::porous_medium(2, 1), SourceTerm::zero(), ref.expression(),
                       grid, {}, &stats);
  const double m0 = level_sum(u, 0, grid.nx);
  double prev_max = 1e300, prev_min = -1e300;
  for (int k = 0; k < grid.nt; ++k) {
    EXPECT_NEAR(level_sum(u, k, grid.nx), m0, 1e-10 * static_cast<double>(stats.steps));
    const auto lvl = u.level(k);
    const double mx = *std::max_element(lvl.begin(), lvl.end());
    const double mn = *std::min_element(lvl.begin(), lvl.end());
    EXPECT_LE(mx, prev_max);
    EXPECT_GE(mn, prev_min);
    prev_max = mx;
    prev_min = mn;
  }
}

TEST(Solve, PLaplacianMaxPrinciple) {
  const auto grid = GridSpec::line({0, 1}, 101, {0, 0.02}, 11);
  const auto u = solve(EquationParams::p_parabolic(4, 1), SourceTerm::zero(),
                       Expression::heat_mode(2), grid, {});
  double prev_max = 1e300, prev_min = -1e300;
  for (int k = 0; k < grid.nt; ++k) {
    const auto lvl = u.level(k);
    const double mx = *std::max_element(lvl.begin(), lvl.end());
    const double mn = *std::min_element(lvl.begin(), lvl.end());
    EXPECT_LE(mx, prev_max + 1e-15);
    EXPECT_GE(mn, prev_min - 1e-15);
    prev_max = mx;
    prev_min = mn;
  }
}

TEST(Solve, RegularizationBelowDiscretizationError) {
  const auto grid = GridSpec::line({-6, 6}, 257, {1, 2}, 3);
  std::vector<double> initial(grid.nx);
  for (int i = 0; i < grid.nx; ++i) initial[i] = p_barenblatt({grid.x_at(i), 0, 1});
  SolverConfig cfg;
  cfg.flux_regularization_eps = 1e-3;
  const auto a = solve(EquationParams::p_parabolic(3, 1), SourceTerm::zero(), initial, grid, cfg);
  cfg.flux_regularization_eps = 5e-4;
  const auto b = solve(EquationParams::p_parabolic(3, 1), SourceTerm::zero(), initial, grid, cfg);
  double oracle = 0.0, change = 0.0;
  for (int i = 0; i < grid.nx; ++i) {
    const double exact = p_barenblatt({grid.x_at(i), 0, 2});
    oracle = std::max(oracle, std::abs(b.at(2, i) - exact));
    change = std::max(change, std::abs(a.at(2, i) - b.at(2, i)));
  }
  EXPECT_LT(oracle, 0.05);
  EXPECT_LE(change, oracle);
}

TEST(Solve, BlowUpIsReported) {
  const auto grid = GridSpec::line({0, 1}, 21, {0, 0.1}, 3);
  try {
    solve(EquationParams::heat(1), SourceTerm::zero(), Expression::constant(1e308), grid, {});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BlowUp);
  }
}

TEST(Solve, StepBudgetIsEnforced) {
  const auto grid = GridSpec::line({0, 1}, 101, {0, 0.1}, 3);
  SolverConfig cfg;
  cfg.max_steps = 5;
  try {
    solve(EquationParams::heat(1), SourceTerm::zero(), Expression::heat_mode(1), grid, cfg);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnstableConfig);
  }
}

TEST(Solve, InitialSizeMismatch) {
  const auto grid = GridSpec::line({0, 1}, 11, {0, 0.1}, 3);
  const std::vector<double> init(5, 0.0);
  EXPECT_THROW(solve(EquationParams::heat(1), SourceTerm::zero(), init, grid, {}), Error);
}

TEST(Residual, ConstantFieldIsExact) {
  const auto g = GridSpec::line({0, 1}, 21, {0, 1}, 11);
  const auto u = sample([](const SpaceTimePoint&) { return 3.0; }, g);
  EXPECT_EQ(residual(u, EquationParams::porous_medium(2, 1), SourceTerm::zero()).max_residual, 0.0);
  EXPECT_EQ(residual(u, EquationParams::p_parabolic(3, 1), SourceTerm::zero(), 1e-6).max_residual, 0.0);
}

TEST(Residual, SeparableHeatConverges) {
  const auto expr = Expression::heat_mode(1);
  double prev = 0.0;
  for (int level = 0; level < 3; ++level) {
    const int nx = 21 << level;
    const int nt = 21 << (2 * level);
    const auto g = GridSpec::line({0, 1}, nx + 1, {0, 0.1}, nt + 1);
    const auto u = sample([&](const SpaceTimePoint& p) { return expr(p); }, g);
    const double r = residual(u, EquationParams::heat(1), SourceTerm::zero()).max_residual;
    if (level > 0) EXPECT_LT(r, 0.4 * prev);
    prev = r;
  }
}

TEST(Residual, SolverOutputComparableToOracle) {
  const auto ref = ReferenceSolution::barenblatt_with_constant(2, 1, 1.0);
  const auto grid = GridSpec::line({-6, 6}, 257, {1, 2}, 101);
  const auto params = EquationParams::porous_medium(2, 1);
  const auto u = solve(params, SourceTerm::zero(), ref.expression(), grid, {});
  const auto exact = sample([&](const SpaceTimePoint& p) { return ref.eval(p); }, grid);
  const double ru = residual(u, params, SourceTerm::zero()).max_residual;
  const double re = residual(exact, params, SourceTerm::zero()).max_residual;
  EXPECT_LE(ru, 10.0 * re);
}

TEST(Residual, TooCoarse) {
  const auto g = GridSpec::line({0, 1}, 3, {0, 1}, 2);
  const auto u = sample([](const SpaceTimePoint&) { return 1.0; }, g);
  try {
    residual(u, EquationParams::heat(1), SourceTerm::zero());
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GridTooCoarse);
  }
}

TEST(Reference, Barenblatt) {
  const auto ref = ReferenceSolution::barenblatt_with_constant(2, 1, 1.0);
  EXPECT_NEAR(ref.free_boundary(1.0), std::sqrt(12.0), 1e-14);
  EXPECT_EQ(ref.eval({4.0, 0, 1.0}), 0.0);
  EXPECT_GT(ref.eval({3.0, 0, 1.0}), 0.0);
  try {
    ref.eval({0, 0, 0});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutsideValidity);
  }

  const auto g = GridSpec::line({-8, 8}, 16001, {1, 2}, 2);
  const auto u = sample([&](const SpaceTimePoint& p) { return ref.eval(p); }, g);
  double mass1 = 0.0, mass2 = 0.0;
  for (int i = 0; i < g.nx; ++i) {
    mass1 += u.at(0, i) * g.dx();
    mass2 += u.at(1, i) * g.dx();
  }
  EXPECT_NEAR(mass1, mass2, 1e-6);
  EXPECT_NEAR(mass1, ref.mass(), 1e-6);
}

TEST(Reference, FreeBoundarySlope) {
  for (double m : {2.0, 3.0}) {
    const auto ref = ReferenceSolution::barenblatt_with_constant(m, 1, 1.0);
    const double xf = ref.free_boundary(1.0);
    const double d1 = 1e-6, d2 = 1e-4;
    const double slope = std::log(ref.eval({xf - d2, 0, 1}) / ref.eval({xf - d1, 0, 1})) /
                         std::log(d2 / d1);
    EXPECT_NEAR(slope, 1.0 / (m - 1.0), 0.02);
  }
}

TEST(Config, Strings) {
  for (auto k : {BoundaryKind::DirichletFromOracle, BoundaryKind::DirichletZero,
                 BoundaryKind::Periodic}) {
    EXPECT_EQ(boundary_kind_from_string(to_string(k)), k);
  }
  SolverConfig cfg;
  cfg.cfl_safety = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.cfl_safety = 0.4;
  cfg.boundary = BoundaryKind::DirichletFromOracle;
  EXPECT_THROW(cfg.validate(), Error);
}
