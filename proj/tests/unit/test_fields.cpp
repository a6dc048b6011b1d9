#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "holderlab/error.hpp"
#include "holderlab/expressions.hpp"
#include "holderlab/field_io.hpp"
#include "holderlab/fields.hpp"

using namespace holderlab;

namespace {

constexpr double kPi = std::numbers::pi;

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() /
         ("holderlab_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
          name);
}

}  // namespace

TEST(Grid, Validation) {
  EXPECT_NO_THROW(GridSpec::line({0, 1}, 3, {0, 1}, 2).validate());
  EXPECT_THROW(GridSpec::line({0, 1}, 1, {0, 1}, 2).validate(), Error);
  EXPECT_THROW(GridSpec::line({1, 0}, 5, {0, 1}, 2).validate(), Error);
  EXPECT_THROW(GridSpec::line({0, 1}, 5, {0, 1}, 0).validate(), Error);
  const auto g = GridSpec::line({0, 1}, 101, {0, 0.1}, 11);
  EXPECT_DOUBLE_EQ(g.dx(), 0.01);
  EXPECT_NEAR(g.dt(), 0.01, 1e-17);
  EXPECT_EQ(g.size(), 101u * 11u);
}

TEST(Sample, ZeroAndHeatMode) {
  const auto g = GridSpec::line({0, 1}, 101, {0, 0.1}, 101);
  const auto zero = sample([](const SpaceTimePoint&) { return 0.0; }, g);
  for (double v : zero.values()) EXPECT_EQ(v, 0.0);

  const auto expr = Expression::heat_mode(1);
  const auto u = sample([&](const SpaceTimePoint& p) { return expr(p); }, g);
  for (int k = 0; k < g.nt; k += 7) {
    for (int i = 0; i < g.nx; i += 3) {
      const double x = g.x_at(i), t = g.t_at(k);
      EXPECT_NEAR(u.at(k, i), std::sin(kPi * x) * std::exp(-kPi * kPi * t), 1e-15);
    }
  }
}

TEST(Sample, NonFiniteValueIsRejected) {
  const auto g = GridSpec::line({-1, 1}, 5, {0, 1}, 2);
  EXPECT_THROW(sample([](const SpaceTimePoint& p) { return 1.0 / p.x; }, g), Error);
  try {
    sample([](const SpaceTimePoint& p) { return 1.0 / p.x; }, g);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EvaluationFailure);
  }
}

TEST(Interpolation, NodesAffineAndQuadratic) {
  const auto g = GridSpec::line({0, 1}, 11, {0, 1}, 11);
  const auto affine = sample([](const SpaceTimePoint& p) { return 2 * p.x + 3 * p.t; }, g);
  EXPECT_DOUBLE_EQ(affine.eval({0.3, 0, 0.4}), affine.at(4, 3));
  for (double x : {0.013, 0.5, 0.977}) {
    for (double t : {0.0, 0.21, 0.999}) EXPECT_NEAR(affine.eval({x, 0, t}), 2 * x + 3 * t, 1e-12);
  }

  const auto sq = sample([](const SpaceTimePoint& p) { return p.x * p.x; }, g);
  const double dx = g.dx();
  for (int i = 0; i + 1 < g.nx; ++i) {
    const double mid = g.x_at(i) + dx / 2;
    EXPECT_NEAR(sq.eval({mid, 0, 0.5}) - mid * mid, dx * dx / 4, 1e-14);
  }
  EXPECT_THROW(sq.eval({1.5, 0, 0.5}), Error);
}

TEST(Interpolation, PowerProfileHolderBound) {
  const auto g = GridSpec::line({-1, 1}, 201, {0, 1}, 2);
  const auto u = sample([](const SpaceTimePoint& p) { return std::pow(std::abs(p.x), 0.75); }, g);
  const double dx = g.dx();
  const double x = dx / 2;
  EXPECT_LE(std::abs(u.eval({x, 0, 0.5}) - std::pow(x, 0.75)), std::pow(dx, 0.75));
}

TEST(Interpolation, TwoDimensionalBilinear) {
  const auto g = GridSpec::square({0, 1}, {0, 2}, 9, {0, 1}, 3);
  const auto u = sample([](const SpaceTimePoint& p) { return p.x - 2 * p.y + p.t + 1; }, g);
  EXPECT_NEAR(u.eval({0.37, 1.41, 0.6}), 0.37 - 2.82 + 0.6 + 1, 1e-12);
}

TEST(Integrate, Examples) {
  const auto g = GridSpec::line({0, 1}, 101, {0, 1}, 11);
  const auto one = sample([](const SpaceTimePoint&) { return 1.0; }, g);
  EXPECT_NEAR(integrate_region(one, Region::whole(g), 1.0), 1.0, 1e-12);

  const auto x = sample([](const SpaceTimePoint& p) { return p.x; }, g);
  EXPECT_NEAR(integrate_region(x, Region::whole(g), 2.0), 1.0 / 3.0, 2 * g.dx() * g.dx());

  const double cx = g.x_at(40) + g.dx() / 2, ct = g.t_at(3) + g.dt() / 2;
  const Region cell = Region::box({cx - 0.1 * g.dx(), cx + 0.1 * g.dx()}, {0, 0},
                                  {ct - 0.1 * g.dt(), ct + 0.1 * g.dt()});
  const auto samples = cell_samples(x, cell);
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_NEAR(integrate_region(x, cell, 3.0), std::pow(samples[0].value, 3.0) * g.cell_volume(),
              1e-18);

  const Region outside = Region::box({5, 6}, {0, 0}, {0, 1});
  EXPECT_THROW(integrate_region(x, outside, 1.0), Error);
}

TEST(Integrate, SecondOrderConvergence) {
  double prev = 0.0;
  for (int nx : {21, 41, 81}) {
    const auto g = GridSpec::line({0, 1}, nx, {0, 1}, 2);
    const auto u = sample([](const SpaceTimePoint& p) { return std::exp(p.x); }, g);
    const double err = std::abs(integrate_region(u, Region::whole(g), 1.0) - (std::exp(1.0) - 1.0));
    if (prev > 0) EXPECT_GT(prev / err, 3.5);
    prev = err;
  }
}

TEST(FieldIo, BinaryRoundTrip) {
  const auto g = GridSpec::square({-1, 1}, {0, 1}, 7, {0.5, 1.5}, 4);
  auto u = sample([](const SpaceTimePoint& p) { return std::sin(p.x) * p.y + p.t / 3.0; }, g, "u",
                  "test");
  u.set_metadata("seed", "42");
  const auto path = temp_path("roundtrip.hlf");
  write_field(path, u);
  const auto back = read_field(path);
  EXPECT_TRUE(back.grid() == u.grid());
  EXPECT_EQ(back.name(), "u");
  EXPECT_EQ(back.provenance(), "test");
  EXPECT_EQ(back.metadata().at("seed"), "42");
  ASSERT_EQ(back.values().size(), u.values().size());
  for (std::size_t i = 0; i < u.values().size(); ++i) EXPECT_EQ(back.values()[i], u.values()[i]);
  std::filesystem::remove(path);
}

TEST(FieldIo, MissingAndMalformedFiles) {
  EXPECT_THROW(read_field("/nonexistent/field.hlf"), Error);
  const auto path = temp_path("bad.hlf");
  std::ofstream(path) << "NOT-A-FIELD\n";
  try {
    read_field(path);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IoFailure);
  }
  std::filesystem::remove(path);
}

TEST(FieldIo, CsvColumns) {
  const auto g = GridSpec::line({0, 1}, 3, {0, 1}, 2);
  const auto u = sample([](const SpaceTimePoint& p) { return p.x + 10 * p.t; }, g);
  const auto path = temp_path("field.csv");
  write_field_csv(path, u);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,x,u");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 6);
  std::filesystem::remove(path);
}

TEST(Expressions, JsonRoundTrip) {
  const auto e = Expression::sum(Expression::gaussian(0.3, 2.0, 0.1),
                                 Expression::product(Expression::power(0.75, 1.0, 0.2),
                                                     Expression::time_power(0.5, 1.0, 2.0)));
  const auto back = Expression::from_json(e.to_json());
  for (double x : {-0.7, 0.0, 0.33}) {
    const SpaceTimePoint p{x, 0, 0.4};
    EXPECT_DOUBLE_EQ(back(p), e(p));
  }
  EXPECT_THROW(Expression::from_json(R"({"kind":"spline"})"), Error);
  EXPECT_THROW(Expression::from_json(R"({"kind":"gaussian"})"), Error);
}

TEST(Expressions, PiecewisePolynomial) {
  const auto e = Expression::piecewise_polynomial({0, 1, 2}, {{1, 2}, {3, 0, -1}});
  EXPECT_DOUBLE_EQ(e({0.5, 0, 0}), 2.0);
  EXPECT_DOUBLE_EQ(e({1.5, 0, 0}), 3.0 - 0.25);
  EXPECT_DOUBLE_EQ(e({2.5, 0, 0}), 0.0);
}

TEST(Expressions, BarenblattMassConstant) {
  for (double m : {2.0, 3.0}) {
    const double c = barenblatt_constant_for_mass(m, 1, 1.7);
    EXPECT_NEAR(barenblatt_mass_for_constant(m, 1, c), 1.7, 1e-12);
  }
  const auto ex = barenblatt_exponents(2, 1);
  EXPECT_NEAR(ex.a, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(ex.b, 1.0 / 12.0, 1e-15);
}

TEST(Source, SingularNodesAreRegularized) {
  const auto g = GridSpec::line({-1, 1}, 21, {0, 1}, 3);
  const auto f = SourceTerm::closed_form(Expression::power(-0.5), 1.5, 4);
  const auto s = f.sample_on(g);
  EXPECT_EQ(s.metadata().at("regularized_nodes"), "3");
  EXPECT_TRUE(std::isfinite(s.at(0, 10)));
  EXPECT_DOUBLE_EQ(f.declared_q(), 1.5);
  EXPECT_DOUBLE_EQ(f.declared_r(), 4.0);
  EXPECT_TRUE(SourceTerm::zero().is_zero());
}
