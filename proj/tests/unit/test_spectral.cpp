#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fracell/spectral.hpp"

using namespace fracell;

namespace {

constexpr double pi = std::numbers::pi;

GridFunction sine_data(const Grid& g) {
  return GridFunction::sample(g, [](const Point& x) { return std::sin(pi * x[0]) + 0.3 * std::sin(3 * pi * x[0]); });
}

}  // namespace

TEST(Spectral, DirichletEigenvaluesMatchClosedForm) {
  const int n = 33;
  const double h = 1.0 / (n - 1);
  const Grid g = Grid::line(1.0, n);
  const EigenBasis b = eigendecompose(assemble(g, CoefficientField::identity(), BoundaryCondition::dirichlet()));
  ASSERT_EQ(b.count(), n - 2);
  for (int k = 0; k < b.count(); ++k) {
    const double exact = 4.0 / (h * h) * std::pow(std::sin((k + 1) * pi * h / 2.0), 2);
    EXPECT_NEAR(b.eigenvalues()[k], exact, 1e-10 * exact);
  }
  EXPECT_LT(b.orthonormality_error(), 1e-12);
  EXPECT_LT(b.max_residual(), 1e-12);
}

TEST(Spectral, TwoDimensionalEigenvaluesAreSums) {
  const Grid g = Grid::box(1.0, 2.0, 9, 9);
  const EigenBasis b = eigendecompose(assemble(g, CoefficientField::identity(), BoundaryCondition::dirichlet()));
  const double hx = 1.0 / 8, hy = 2.0 / 8;
  const double l1 = 4 / (hx * hx) * std::pow(std::sin(pi * hx / 2), 2) +
                    4 / (hy * hy) * std::pow(std::sin(pi * hy / 4), 2);
  EXPECT_NEAR(b.lambda_min(), l1, 1e-10 * l1);
}

TEST(Spectral, VariableCoefficientMatchesDenseOracle) {
  // Reference values from an independent dense symmetric eigensolver on the
  // same flux-form stencil (9 nodes, a = 1 + sin(2 pi x)/2, face averages).
  const Grid g = Grid::line(1.0, 9);
  const EigenBasis b = eigendecompose(assemble(g, CoefficientField::sine(0.5), BoundaryCondition::dirichlet()));
  EXPECT_NEAR(b.lambda_min(), 9.413957136567975, 1e-11);
  EXPECT_NEAR(b.lambda_max(), 313.0429686773962, 1e-9);
  const GridFunction f = sine_data(g);
  struct Row {
    double s, apply3, apply6, solve3, solve6;
  };
  const Row rows[] = {
      {0.25, 1.332019583092008, 1.739181975678895, 0.4735113071141776, 0.49686829463643745},
      {0.5, 1.9863831054728194, 3.376348144825194, 0.2729731604801223, 0.273289907600961},
      {0.75, 2.0908299164051725, 6.717223436006231, 0.15639520011447006, 0.15222160170960397},
  };
  for (const Row& r : rows) {
    const GridFunction a = fractional_apply(b, f, r.s);
    const GridFunction u = fractional_solve(b, f, r.s);
    EXPECT_NEAR(a.values[3], r.apply3, 1e-12);
    EXPECT_NEAR(a.values[6], r.apply6, 1e-12);
    EXPECT_NEAR(u.values[3], r.solve3, 1e-12);
    EXPECT_NEAR(u.values[6], r.solve6, 1e-12);
    EXPECT_EQ(a.values[0], 0.0);
    EXPECT_EQ(u.values[8], 0.0);
  }
}

TEST(Spectral, ApplyAndSolveAreInverse) {
  const Grid g = Grid::box(1.0, 1.0, 11, 9);
  const EigenBasis b = eigendecompose(assemble(g, CoefficientField::diagonal(1.0, 2.0), BoundaryCondition::dirichlet()));
  const GridFunction f = b.op().extend(b.op().restrict(
      GridFunction::sample(g, [](const Point& x) { return x[0] * (1 - x[0]) * std::exp(x[1]); })));
  for (double s : {0.3, 0.7, 1.0}) {
    const GridFunction back = fractional_apply(b, fractional_solve(b, f, s), s);
    EXPECT_LT((back.values - f.values).cwiseAbs().maxCoeff(), 1e-11);
  }
  // s = 1 reproduces the operator itself.
  const GridFunction l1 = fractional_apply(b, f, 1.0);
  EXPECT_LT((l1.values - apply(b.op(), f).values).cwiseAbs().maxCoeff(), 1e-9 * l1.values.cwiseAbs().maxCoeff());
}

TEST(Spectral, EnergyIsSemigroupOfPowers) {
  const Grid g = Grid::line(1.0, 33);
  const EigenBasis b = eigendecompose(assemble(g, CoefficientField::sine(0.3), BoundaryCondition::dirichlet()));
  const GridFunction u = sine_data(g);
  const double e = hs_energy(b, u, 0.6);
  EXPECT_NEAR(e, inner(fractional_apply(b, u, 0.3), fractional_apply(b, u, 0.3)), 1e-10 * e);
  EXPECT_NEAR(hs_energy_norm(b, u, 0.6), std::sqrt(e), 1e-12);
}

TEST(Spectral, NeumannZeroModeAndMeanHandling) {
  const Grid g = Grid::line(2.0, 33);
  const EigenBasis b = eigendecompose(assemble(g, CoefficientField::identity(), BoundaryCondition::neumann()));
  EXPECT_TRUE(b.neumann_kernel());
  EXPECT_NEAR(b.lambda_min(), 0.0, 1e-10);
  EXPECT_GT(b.lambda_min_positive(), 1.0);
  const GridFunction one = GridFunction::sample(g, [](const Point&) { return 1.0; });
  EXPECT_LT(fractional_apply(b, one, 0.5).values.cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_THROW(fractional_solve(b, one, 0.5), Error);
  const GridFunction f = GridFunction::sample(g, [](const Point& x) { return std::cos(pi * x[0] / 2.0) + 1.0; });
  const GridFunction fz = remove_mean(f);
  EXPECT_NEAR(mean(fz), 0.0, 1e-14);
  const GridFunction u = fractional_solve(b, fz, 0.5);
  EXPECT_NEAR(mean(u), 0.0, 1e-12);
}

TEST(Spectral, ScalingLawForConstantCoefficients) {
  for (const auto& bc : {BoundaryCondition::dirichlet(), BoundaryCondition::neumann()}) {
    const Grid small = Grid::box(1.0, 1.0, 9, 7);
    const Grid big = small.scaled(2.5);
    const CoefficientField a = CoefficientField::diagonal(1.0, 3.0);
    const EigenBasis bs = eigendecompose(assemble(small, a, bc));
    const EigenBasis bb = eigendecompose(assemble(big, a, bc));
    GridFunction u = bb.op().extend(bb.op().restrict(
        GridFunction::sample(big, [](const Point& x) { return std::cos(x[0]) * std::sin(x[1] + 0.5); })));
    if (bb.neumann_kernel()) u = remove_mean(u);
    for (double s : {0.25, 0.75}) EXPECT_LT(scaling_check(bs, bb, u, s, 2.5).max_relative_deviation, 1e-10);
  }
}

TEST(Spectral, ScalingCheckRejectsMismatchedGrids) {
  const CoefficientField a = CoefficientField::identity();
  const EigenBasis b1 = eigendecompose(assemble(Grid::line(1.0, 9), a, BoundaryCondition::dirichlet()));
  const EigenBasis b2 = eigendecompose(assemble(Grid::line(2.0, 11), a, BoundaryCondition::dirichlet()));
  const GridFunction u(Grid::line(2.0, 11));
  EXPECT_THROW(scaling_check(b1, b2, u, 0.5, 2.0), Error);
}
