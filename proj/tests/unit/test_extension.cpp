#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fracell/extension.hpp"
#include "fracell/special.hpp"

using namespace fracell;

namespace {

constexpr double pi = std::numbers::pi;

struct Setup {
  EigenBasis basis;
  GridFunction u;
};

Setup setup(int n, const BoundaryCondition& bc) {
  EigenBasis b = eigendecompose(assemble(Grid::line(1.0, n), CoefficientField::sine(0.3), bc));
  GridFunction u = b.eigenfunction(b.neumann_kernel() ? 1 : 0);
  return {std::move(b), std::move(u)};
}

double rel_max(const GridFunction& a, const GridFunction& b) {
  return (a.values - b.values).cwiseAbs().maxCoeff() / b.values.cwiseAbs().maxCoeff();
}

}  // namespace

TEST(ExtensionMesh, WeightsIntegrateThePowerExactly) {
  const Grid g = Grid::line(1.0, 9);
  for (double s : {0.25, 0.5, 0.75}) {
    const double Y = 3.0, a = 1 - 2 * s;
    const ExtensionMesh m = ExtensionMesh::graded(g, s, Y, 24);
    EXPECT_EQ(m.layers(), 24);
    EXPECT_DOUBLE_EQ(m.y.front(), 0.0);
    EXPECT_NEAR(m.y.back(), Y, 1e-14);
    EXPECT_DOUBLE_EQ(m.gamma, std::max(3.0, 1.0 / s));
    const double exact = std::pow(Y, 1 + a) / (1 + a);
    double mass = 0.0, cells = 0.0;
    for (double w : m.mass) mass += w;
    for (double w : m.cell_weight) cells += w;
    EXPECT_NEAR(mass, exact, 1e-12 * exact);
    EXPECT_NEAR(cells, exact, 1e-12 * exact);
  }
  EXPECT_THROW(ExtensionMesh::graded(g, 1.0, 1.0, 8), Error);
}

TEST(ExtensionMesh, TruncationHeightMeetsTolerance) {
  for (double s : {0.25, 0.75}) {
    const double lam = pi * pi;
    const double Y = truncation_height(s, lam);
    EXPECT_LE(extension_profile(s, std::sqrt(lam) * Y), 1e-8 * (1 + 1e-9));
    EXPECT_GT(extension_profile(s, std::sqrt(lam) * 0.95 * Y), 1e-8);
  }
}

TEST(Extension, DtnRecoversFractionalPower) {
  for (const auto& bc : {BoundaryCondition::dirichlet(), BoundaryCondition::neumann()}) {
    const auto [b, u] = setup(65, bc);
    for (double s : {0.25, 0.5, 0.75}) {
      const double lam = b.lambda_min_positive();
      const ExtensionMesh m = ExtensionMesh::graded(b.grid(), s, truncation_height(s, lam), 64);
      const ExtensionField f = solve_extension(b.op(), u, m);
      const GridFunction exact = fractional_apply(b, u, s);
      EXPECT_LT(rel_max(dtn_extract(f).value, exact), 1e-2) << s;
      EXPECT_LT(rel_max(dtn_flux(f), exact), 1e-2) << s;
      EXPECT_LT(rel_max(f.trace(), u), 1e-14);
      const double e = hs_energy(b, u, s);
      EXPECT_NEAR(extension_energy(f) / dtn_constant(s), e, 1e-2 * e);
      for (int j : {2, 8}) EXPECT_LT(rel_max(f.layer(j), extension_bessel_eval(b, u, s, m.y[j])), 1e-2);
    }
  }
}

TEST(Extension, DtnErrorDecreasesUnderRefinement) {
  const double s = 0.5;
  double prev = 1.0;
  for (int level = 0; level < 3; ++level) {
    const auto [b, u] = setup(33 * (1 << level) - (1 << level) + 1, BoundaryCondition::dirichlet());
    const ExtensionMesh m =
        ExtensionMesh::graded(b.grid(), s, truncation_height(s, b.lambda_min()), 16 << level);
    const double err = rel_max(dtn_extract(solve_extension(b.op(), u, m)).value, fractional_apply(b, u, s));
    EXPECT_LT(err, 0.5 * prev);
    prev = err;
  }
}

TEST(Extension, PoissonEvaluationMatchesBesselSeries) {
  const auto [b, u] = setup(33, BoundaryCondition::dirichlet());
  const double s = 0.3, y = 0.07;
  const auto pc = calibrate_poisson(s, y, b.lambda_min(), b.lambda_max());
  EXPECT_LT(rel_max(extension_poisson_eval(b, u, s, y, pc.rule), extension_bessel_eval(b, u, s, y)), 1e-8);
}

TEST(Extension, ForcedProblemInvertsTheDtnMap) {
  // With F = 0 the trace solves c_s L^s u = f.
  const auto [b, phi] = setup(65, BoundaryCondition::dirichlet());
  const double s = 0.5;
  const ExtensionMesh m = ExtensionMesh::graded(b.grid(), s, truncation_height(s, b.lambda_min()), 64);
  ForcingData data;
  data.flux = b.op().extend(b.op().restrict(
      GridFunction::sample(b.grid(), [](const Point& x) { return std::sin(pi * x[0]) + std::sin(2 * pi * x[0]); })));
  data.field.push_back(Eigen::MatrixXd::Zero(b.op().size(), m.layers() + 1));
  const ExtensionField f = solve_extension_forced(b.op(), data, m);
  GridFunction expect = fractional_solve(b, data.flux, s);
  expect.values /= dtn_constant(s);
  EXPECT_LT(rel_max(f.trace(), expect), 1e-2);
  const CaccioppoliReport c = caccioppoli_check(f, data, {0.5, 0.0}, 0.3);
  EXPECT_GT(c.lhs, 0.0);
  EXPECT_GT(c.ratio, 0.0);
  EXPECT_TRUE(std::isfinite(c.ratio));
  const TraceReport t = trace_inequality_check(f, {0.5, 0.0}, {0.1, 0.2, 0.3});
  ASSERT_EQ(t.ratios.size(), 3u);
  EXPECT_GT(t.max_ratio, 0.0);
  EXPECT_TRUE(std::isfinite(t.max_ratio));
}
