#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fracell/extension.hpp"
#include "fracell/semigroup.hpp"
#include "fracell/special.hpp"

using namespace fracell;

namespace {

constexpr double pi = std::numbers::pi;

EigenBasis line_basis(int n, const BoundaryCondition& bc, const CoefficientField& a = CoefficientField::identity()) {
  return eigendecompose(assemble(Grid::line(1.0, n), a, bc));
}

GridFunction smooth(const EigenBasis& b) {
  return b.op().extend(b.op().restrict(GridFunction::sample(
      b.grid(), [](const Point& x) { return std::sin(pi * x[0]) + 0.3 * std::sin(3 * pi * x[0]); })));
}

Eigen::VectorXd kernel_apply(const KernelMatrix& k, const DiscreteOperator& op, const GridFunction& u) {
  return k.entries * op.restrict(u) * k.weight();
}

}  // namespace

TEST(Quadrature, ScalarIdentitiesHoldAcrossTheSpectrum) {
  for (double s : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    const auto bal = calibrate_balakrishnan(s, 1.0, 1e5, 1e-10);
    const auto inv = calibrate_inverse(s, 1.0, 1e5, 1e-10);
    EXPECT_LE(bal.max_residual, 1e-10);
    EXPECT_LE(inv.max_residual, 1e-10);
    for (double lam : {1.0, 37.0, 2.5e3, 1e5}) {
      EXPECT_NEAR(balakrishnan_scalar(lam, s, bal.rule), std::pow(lam, s), 1e-9 * std::pow(lam, s));
      EXPECT_NEAR(inverse_power_scalar(lam, s, inv.rule), std::pow(lam, -s), 1e-9 * std::pow(lam, -s));
    }
  }
}

TEST(Quadrature, PoissonScalarIsTheBesselProfile) {
  for (double s : {0.25, 0.5, 0.75}) {
    const double y = 0.1;
    const auto pc = calibrate_poisson(s, y, 1.0, 1e4, 1e-10);
    for (double lam : {0.0, 1.0, 100.0, 1e4}) {
      const double exact = extension_profile(s, std::sqrt(lam) * y);
      EXPECT_NEAR(poisson_scalar(lam, s, y, pc.rule), exact, 1e-8);
    }
  }
}

TEST(Quadrature, RuleShape) {
  // The head below t_min is cut off: it contributes about -2 lambda sqrt(t_min) / Gamma(-1/2).
  const SingularQuadrature q(0.5, 1e-12, 1e3, 0.25);
  EXPECT_GT(q.size(), 10);
  EXPECT_NEAR(q.nodes().front(), 1e-12, 1e-26);
  EXPECT_GT(q.tail_weight(), 0.0);
  EXPECT_NEAR(q.difference_integral(4.0) / std::tgamma(-0.5), 2.0, 1e-3);
}

TEST(Heat, EigenfunctionsDecayExponentially) {
  const EigenBasis b = line_basis(33, BoundaryCondition::dirichlet(), CoefficientField::sine(0.4));
  for (int k : {0, 3}) {
    const GridFunction phi = b.eigenfunction(k);
    const GridFunction w = heat_apply(b, phi, 0.01);
    EXPECT_LT((w.values - std::exp(-0.01 * b.eigenvalues()[k]) * phi.values).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Heat, SteppedMarchConvergesToSpectral) {
  const EigenBasis b = line_basis(33, BoundaryCondition::dirichlet());
  const GridFunction u = smooth(b);
  const GridFunction exact = heat_apply(b, u, 0.05);
  const double e1 = (heat_apply_stepped(b.op(), u, 0.05, 20).values - exact.values).cwiseAbs().maxCoeff();
  const double e2 = (heat_apply_stepped(b.op(), u, 0.05, 40).values - exact.values).cwiseAbs().maxCoeff();
  EXPECT_NEAR(e1 / e2, 4.0, 0.3);
  const double ie = (heat_apply_stepped(b.op(), u, 0.05, 400, TimeScheme::ImplicitEuler).values - exact.values)
                        .cwiseAbs()
                        .maxCoeff();
  EXPECT_LT(ie, 1e-3);
}

TEST(Heat, NeumannPreservesConstants) {
  const EigenBasis b = eigendecompose(
      assemble(Grid::box(1.0, 1.0, 9, 9), CoefficientField::sine(0.5), BoundaryCondition::neumann()));
  const GridFunction one = GridFunction::sample(b.grid(), [](const Point&) { return 1.0; });
  for (double t : {0.01, 0.1, 1.0}) EXPECT_LT((heat_apply(b, one, t).values.array() - 1.0).abs().maxCoeff(), 1e-10);
  const KernelMatrix w = heat_kernel(b, 0.1);
  EXPECT_LT((w.row_integrals().array() - 1.0).abs().maxCoeff(), 1e-10);
  EXPECT_LT(w.symmetry_error(), 1e-12);
}

TEST(Semigroup, BalakrishnanMatchesSpectral) {
  for (const auto& a : {CoefficientField::identity(), CoefficientField::sine(0.5)}) {
    const EigenBasis b = line_basis(129, BoundaryCondition::dirichlet(), a);
    const GridFunction u = smooth(b);
    for (double s : {0.25, 0.5, 0.75}) {
      const auto cal = calibrate_balakrishnan(s, b.lambda_min_positive(), b.lambda_max());
      const GridFunction x = balakrishnan_apply(b, u, s, cal.rule);
      const GridFunction y = fractional_apply(b, u, s);
      EXPECT_LT((x.values - y.values).norm() / y.values.norm(), 1e-8);
    }
  }
}

TEST(Semigroup, BalakrishnanRejectsUncalibratedRule) {
  const EigenBasis b = line_basis(65, BoundaryCondition::dirichlet());
  const SingularQuadrature coarse(0.5, 1e-2, 1.0, 1.0);
  EXPECT_THROW(balakrishnan_apply(b, smooth(b), 0.5, coarse), Error);
}

TEST(Kernels, BsIsTheFractionalPowerOfOne) {
  const EigenBasis b = line_basis(65, BoundaryCondition::dirichlet(), CoefficientField::sine(0.3));
  const GridFunction one = b.op().extend(
      b.op().restrict(GridFunction::sample(b.grid(), [](const Point&) { return 1.0; })));
  for (double s : {0.25, 0.75}) {
    const auto cal = calibrate_balakrishnan(s, b.lambda_min(), b.lambda_max());
    const BsFunction bs = function_Bs(b, s, cal.rule);
    const Eigen::VectorXd ref = b.op().restrict(fractional_apply(b, one, s));
    EXPECT_LT((bs.values - ref).cwiseAbs().maxCoeff(), 1e-7 * ref.cwiseAbs().maxCoeff());
    EXPECT_GT(bs.values.minCoeff(), 0.0);
  }
}

TEST(Kernels, BilinearFormEqualsSpectralPairing) {
  const EigenBasis b = eigendecompose(
      assemble(Grid::box(1.0, 1.0, 11, 11), CoefficientField::diagonal(1.0, 0.5), BoundaryCondition::dirichlet()));
  const GridFunction u = b.op().extend(b.op().restrict(
      GridFunction::sample(b.grid(), [](const Point& x) { return std::sin(pi * x[0]) * x[1] * (1 - x[1]); })));
  const GridFunction psi = b.op().extend(b.op().restrict(
      GridFunction::sample(b.grid(), [](const Point& x) { return x[0] * std::sin(2 * pi * x[1]) + 0.1; })));
  for (double s : {0.25, 0.5, 0.75}) {
    const auto cal = calibrate_balakrishnan(s, b.lambda_min(), b.lambda_max());
    const KernelMatrix ks = kernel_Ks(b, s, cal.rule);
    const BsFunction bs = function_Bs(b, s, cal.rule);
    const double form = bilinear_form(u, psi, ks, bs);
    const double pairing = inner(fractional_apply(b, u, s), psi);
    EXPECT_NEAR(form, pairing, 1e-9 * std::abs(pairing));
    EXPECT_NEAR(serial::bilinear_form(u, psi, ks, bs), form, 1e-11 * std::abs(form));
    EXPECT_LT(ks.symmetry_error(), 1e-12);
    EXPECT_GT(ks.min_relative_entry(), 0.0);
  }
}

TEST(Kernels, KsMatchesWholeSpaceConstantInTheInterior) {
  // Deep inside the domain and at short range K_s behaves like the whole-line
  // kernel c_{1,s} / (2 |x - z|^{1+2s}).
  const EigenBasis b = line_basis(257, BoundaryCondition::dirichlet());
  for (double s : {0.25, 0.5, 0.75}) {
    const auto cal = calibrate_balakrishnan(s, b.lambda_min(), b.lambda_max());
    const KernelMatrix ks = kernel_Ks(b, s, cal.rule);
    const int i = 127, j = 127 + 8;
    const double d = ks.distance(i, j);
    const double ratio = ks.entries(i, j) * std::pow(d, 1 + 2 * s) / (0.5 * fractional_laplacian_constant(1, s));
    EXPECT_NEAR(ratio, 1.0, 0.05) << "s=" << s;
    EXPECT_GT(ks_normalized_max(ks), 0.0);
  }
}

TEST(Kernels, GreenFunctionRoutesAgreeAndInvert) {
  const EigenBasis b = line_basis(65, BoundaryCondition::dirichlet(), CoefficientField::sine(0.5));
  const GridFunction f = smooth(b);
  for (double s : {0.25, 0.5, 0.75}) {
    const KernelMatrix g = greens_function(b, s);
    const auto ic = calibrate_inverse(s, b.lambda_min(), b.lambda_max());
    const KernelMatrix gq = greens_function(b, s, GreensRoute::Quadrature, &ic.rule);
    EXPECT_LT((g.entries - gq.entries).norm() / g.entries.norm(), 1e-8);
    EXPECT_EQ(g.symmetry_error(), 0.0);
    const Eigen::VectorXd u = b.op().restrict(fractional_solve(b, f, s));
    EXPECT_LT((kernel_apply(g, b.op(), f) - u).cwiseAbs().maxCoeff(), 1e-11);
  }
  const EigenBasis nb = line_basis(17, BoundaryCondition::neumann());
  EXPECT_THROW(greens_function(nb, 0.5), Error);
}

TEST(Kernels, PoissonKernelReproducesBesselExtension) {
  const EigenBasis b = line_basis(65, BoundaryCondition::dirichlet());
  const GridFunction u = smooth(b);
  for (double s : {0.25, 0.75}) {
    const double y = 0.05;
    const auto pc = calibrate_poisson(s, y, b.lambda_min(), b.lambda_max());
    const KernelMatrix p = poisson_kernel(b, s, y, pc.rule);
    const Eigen::VectorXd ref = b.op().restrict(extension_bessel_eval(b, u, s, y));
    EXPECT_LT((kernel_apply(p, b.op(), u) - ref).cwiseAbs().maxCoeff(), 1e-7);
    EXPECT_LE(p.row_integrals().maxCoeff(), 1.0 + 1e-8);
  }
  const EigenBasis nb = line_basis(33, BoundaryCondition::neumann());
  const auto pc = calibrate_poisson(0.5, 0.2, nb.lambda_min_positive(), nb.lambda_max());
  EXPECT_LT((poisson_kernel(nb, 0.5, 0.2, pc.rule).row_integrals().array() - 1.0).abs().maxCoeff(), 1e-6);
}

TEST(Kernels, SlopeFitRecoversPowerLaw) {
  const EigenBasis b = line_basis(257, BoundaryCondition::dirichlet());
  const auto cal = calibrate_balakrishnan(0.5, b.lambda_min(), b.lambda_max());
  const KernelMatrix ks = kernel_Ks(b, 0.5, cal.rule);
  const double h = b.grid().spacing(0);
  const KernelFit f = kernel_slope_fit(ks, {0.25, 2 * h, 0.1});
  EXPECT_NEAR(f.slope, -2.0, 0.05);
  EXPECT_GT(f.pairs_used, 100);
  EXPECT_THROW(kernel_slope_fit(ks, {0.6, 0.0, 0.1}), Error);
}

TEST(Kernels, GaussianBoundAndBoundaryShape) {
  const EigenBasis b = line_basis(65, BoundaryCondition::dirichlet());
  const GaussianBoundReport gb = gaussian_bound(b, {0.001, 0.01, 0.1}, 8.0);
  EXPECT_GT(gb.constant, 0.0);
  EXPECT_LT(gb.constant, 1.0);
  const auto cal = calibrate_balakrishnan(0.5, b.lambda_min(), b.lambda_max());
  const BoundaryShapeReport bs = ks_boundary_shape(kernel_Ks(b, 0.5, cal.rule), b, 0.05);
  EXPECT_GT(bs.constant, 0.0);
  EXPECT_GE(bs.spread, 1.0);
}
