#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace fracell {

/// Raised for invalid inputs to any fracell routine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Point = std::array<double, 2>;

/// Structured node grid on the box [0, e_0] x [0, e_1] (1D uses axis 0 only).
///
/// Nodes are numbered with axis 0 fastest: flat = i + n_0 * j.
class Grid {
 public:
  Grid() = default;
  Grid(std::vector<double> extents, std::vector<int> nodes);

  static Grid line(double extent, int nodes) { return Grid({extent}, {nodes}); }
  static Grid box(double ex, double ey, int nx, int ny) { return Grid({ex, ey}, {nx, ny}); }

  int dim() const { return static_cast<int>(nodes_.size()); }
  int nodes(int axis) const { return nodes_.at(axis); }
  double extent(int axis) const { return extents_.at(axis); }
  double spacing(int axis) const { return extents_.at(axis) / (nodes_.at(axis) - 1); }
  int size() const;
  /// Uniform cell volume h_0 * ... * h_{dim-1}; the discrete L2 weight.
  double cell_volume() const;

  std::array<int, 2> index(int flat) const;
  int flat(int i, int j = 0) const { return i + nodes_[0] * j; }
  double coord(int flat, int axis) const;
  Point point(int flat) const;
  bool on_boundary(int flat) const;
  /// True when the node lies on a face normal to `axis`.
  bool on_face(int flat, int axis) const;
  double distance(int a, int b) const;

  /// Same node counts, extents multiplied by `factor`.
  Grid scaled(double factor) const;

  bool operator==(const Grid& other) const = default;

 private:
  std::vector<double> extents_;
  std::vector<int> nodes_;
};

/// Nodal scalar field on a grid (all nodes, boundary included).
struct GridFunction {
  Grid grid;
  Eigen::VectorXd values;

  GridFunction() = default;
  explicit GridFunction(Grid g) : grid(std::move(g)), values(Eigen::VectorXd::Zero(grid.size())) {}
  GridFunction(Grid g, Eigen::VectorXd v);

  static GridFunction sample(const Grid& g, const std::function<double(const Point&)>& fn);
  int size() const { return static_cast<int>(values.size()); }
};

using Matrix2 = Eigen::Matrix2d;

/// Symmetric coefficient matrix A(x) with declared ellipticity bounds.
///
/// In 1D only A(0,0) is used. Face values are arithmetic means of the two
/// adjacent nodal samples.
class CoefficientField {
 public:
  using Fn = std::function<Matrix2(const Point&)>;

  CoefficientField(Fn fn, double lambda1, double lambda2, std::string description = "custom");

  static CoefficientField identity();
  static CoefficientField scalar(std::function<double(const Point&)> a, double lambda1, double lambda2,
                                 std::string description = "scalar");
  static CoefficientField diagonal(double a11, double a22);
  /// (1 + amplitude * sin(2 pi x_0)) I, the standard oscillating test field.
  static CoefficientField sine(double amplitude = 0.5);

  Matrix2 at(const Point& x) const { return fn_(x); }
  double lambda1() const { return lambda1_; }
  double lambda2() const { return lambda2_; }
  const std::string& description() const { return description_; }

 private:
  Fn fn_;
  double lambda1_;
  double lambda2_;
  std::string description_;
};

enum class BcKind { Dirichlet, Neumann };

/// Boundary condition per axis. The uniform constructors cover the usual
/// case; mixed conditions are used for strips (Neumann in x', Dirichlet in x_n).
class BoundaryCondition {
 public:
  BoundaryCondition() = default;
  explicit BoundaryCondition(BcKind k) : axes_{k, k} {}
  static BoundaryCondition dirichlet() { return BoundaryCondition(BcKind::Dirichlet); }
  static BoundaryCondition neumann() { return BoundaryCondition(BcKind::Neumann); }
  static BoundaryCondition mixed(BcKind axis0, BcKind axis1) {
    BoundaryCondition bc;
    bc.axes_ = {axis0, axis1};
    return bc;
  }

  BcKind axis(int a) const { return axes_.at(a); }
  bool uniform(int dim) const { return dim == 1 || axes_[0] == axes_[1]; }
  /// The single kind; throws for mixed conditions.
  BcKind kind(int dim = 2) const;
  bool any_dirichlet(int dim) const;
  std::string name(int dim) const;

  bool operator==(const BoundaryCondition&) const = default;

 private:
  std::array<BcKind, 2> axes_{BcKind::Dirichlet, BcKind::Dirichlet};
};

BcKind parse_bc_kind(const std::string& s);
std::string to_string(BcKind k);

}  // namespace fracell
