#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fracell/kernels.hpp"
#include "fracell/operator.hpp"

using namespace fracell;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST(Grid, IndexingAndCoordinates) {
  const Grid g = Grid::box(2.0, 1.0, 5, 3);
  EXPECT_EQ(g.size(), 15);
  EXPECT_EQ(g.flat(2, 1), 7);
  EXPECT_EQ(g.index(7), (std::array<int, 2>{2, 1}));
  EXPECT_DOUBLE_EQ(g.coord(7, 0), 1.0);
  EXPECT_DOUBLE_EQ(g.coord(7, 1), 0.5);
  EXPECT_DOUBLE_EQ(g.cell_volume(), 0.25);
  EXPECT_TRUE(g.on_boundary(0));
  EXPECT_FALSE(g.on_boundary(7));
  EXPECT_TRUE(g.on_face(g.flat(4, 1), 0));
  EXPECT_FALSE(g.on_face(g.flat(4, 1), 1));
  EXPECT_DOUBLE_EQ(g.distance(0, g.flat(4, 2)), std::sqrt(5.0));
  EXPECT_DOUBLE_EQ(g.scaled(3.0).extent(0), 6.0);
}

TEST(Grid, RejectsDegenerateInput) {
  EXPECT_THROW(Grid({1.0}, {1}), Error);
  EXPECT_THROW(Grid({-1.0}, {5}), Error);
  EXPECT_THROW(Grid({1.0, 1.0}, {5}), Error);
}

TEST(Coefficient, EllipticityBounds) {
  const Grid g = Grid::line(1.0, 65);
  const auto rep = ellipticity_check(CoefficientField::sine(0.5), g);
  EXPECT_TRUE(rep.pass);
  EXPECT_NEAR(rep.lambda1_observed, 0.5, 1e-12);
  EXPECT_NEAR(rep.lambda2_observed, 1.5, 1e-12);
  const CoefficientField bad([](const Point&) { return Matrix2::Identity() * 3.0; }, 1.0, 2.0);
  EXPECT_THROW(assemble(g, bad, BoundaryCondition::dirichlet()), Error);
}

TEST(Operator, DirichletStencilMatchesSecondDifference) {
  const Grid g = Grid::line(1.0, 9);
  const DiscreteOperator op = assemble(g, CoefficientField::identity(), BoundaryCondition::dirichlet());
  EXPECT_EQ(op.size(), 7);
  EXPECT_DOUBLE_EQ(op.matrix().coeff(0, 0), 128.0);
  EXPECT_DOUBLE_EQ(op.matrix().coeff(0, 1), -64.0);
  EXPECT_EQ(op.active_index(0), -1);
  EXPECT_EQ(op.active_index(1), 0);
}

TEST(Operator, NeumannAnnihilatesConstantsAndIsSymmetric) {
  for (int dim : {1, 2}) {
    const Grid g = dim == 1 ? Grid::line(1.0, 17) : Grid::box(1.0, 2.0, 9, 13);
    const DiscreteOperator op = assemble(g, CoefficientField::sine(0.4), BoundaryCondition::neumann());
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(op.size());
    EXPECT_LT((op.matrix() * one).cwiseAbs().maxCoeff(), 1e-10);
    const SparseMatrix t = op.matrix().transpose();
    EXPECT_LT((op.matrix() - t).norm(), 1e-10);
  }
}

TEST(Operator, MixedStripKeepsNeumannAxisNodes) {
  const Grid g = Grid::box(1.0, 1.0, 6, 5);
  const DiscreteOperator op =
      assemble(g, CoefficientField::identity(), BoundaryCondition::mixed(BcKind::Neumann, BcKind::Dirichlet));
  EXPECT_EQ(op.size(), 6 * 3);
}

TEST(Operator, ApplyConvergesOnSmoothData) {
  // -u'' for u = sin(pi x) is pi^2 sin(pi x); the error is O(h^2).
  double prev = 0.0;
  for (int n : {33, 65}) {
    const Grid g = Grid::line(1.0, n);
    const DiscreteOperator op = assemble(g, CoefficientField::identity(), BoundaryCondition::dirichlet());
    const GridFunction u = GridFunction::sample(g, [](const Point& x) { return std::sin(pi * x[0]); });
    const GridFunction lu = apply(op, u);
    double err = 0.0;
    for (int p = 1; p + 1 < n; ++p) err = std::max(err, std::abs(lu.values[p] - pi * pi * u.values[p]));
    if (prev > 0.0) {
      EXPECT_NEAR(prev / err, 4.0, 0.05);
    }
    prev = err;
  }
}

TEST(Operator, InnerProductUsesCellVolume) {
  const Grid g = Grid::box(1.0, 1.0, 5, 5);
  const GridFunction one = GridFunction::sample(g, [](const Point&) { return 1.0; });
  EXPECT_DOUBLE_EQ(inner(one, one), 25.0 / 16.0);
  EXPECT_DOUBLE_EQ(l2_norm(one), 5.0 / 4.0);
}

TEST(Operator, GagliardoSeminormParallelMatchesSerial) {
  const Grid g = Grid::box(1.0, 1.0, 13, 11);
  const GridFunction u = GridFunction::sample(g, [](const Point& x) { return std::sin(3 * x[0]) * x[1]; });
  const double a = hs_seminorm(u, 0.4);
  const double b = serial::hs_seminorm(u, 0.4);
  EXPECT_NEAR(a, b, 1e-12 * std::abs(b));
  const GridFunction c = GridFunction::sample(g, [](const Point&) { return 2.0; });
  EXPECT_EQ(hs_seminorm(c, 0.4), 0.0);
  EXPECT_THROW(hs_seminorm(u, 1.0), Error);
}

TEST(Kernels, ParallelTwinsMatchSerial) {
  const Eigen::MatrixXd phi = Eigen::MatrixXd::Random(40, 25);
  const Eigen::VectorXd c = Eigen::VectorXd::Random(25);
  const Eigen::MatrixXd a = kernels::spectral_sum(phi, c);
  const Eigen::MatrixXd b = kernels::serial::spectral_sum(phi, c);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT(kernels::asymmetry(a), 1e-14);
  const Eigen::VectorXd u = Eigen::VectorXd::Random(40), psi = Eigen::VectorXd::Random(40);
  EXPECT_NEAR(kernels::pair_form(u, psi, a), kernels::serial::pair_form(u, psi, a), 1e-10);
  kernels::set_thread_count(1);
  EXPECT_EQ(kernels::thread_count(), 1);
}
