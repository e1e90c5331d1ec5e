#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dowg/gauss.hpp"
#include "dowg/mesh.hpp"

namespace dowg {

using ElementMatrix = Eigen::MatrixXd;
using ElementVector = Eigen::VectorXd;

/// Tensor Gauss rules on the reference square [0,1]^2 and its edges.
struct ElementQuadrature {
  Rule1D line;  // per direction inside the cell
  Rule1D edge;  // along one edge, parameter t in [0,1]
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;

  /// Reference coordinates of edge point t on local face f.
  static std::array<double, 2> face_point(int face, double t);
};

/// Nodal tensor-product Q_k basis (k = 1, 2) on Gauss-Lobatto points of
/// [0,1]^2, with value and gradient tables at the element and edge
/// quadrature points. Dof index is iy * (k + 1) + ix.
class LocalBasis {
 public:
  /// Default quadrature: k+2 Gauss points per direction (degree 2k+3) in the
  /// cell and k+1 on edges (degree 2k+1). Oracles pass larger counts.
  explicit LocalBasis(int k, int cell_points = 0, int edge_points = 0);

  int order() const { return k_; }
  int dofs() const { return (k_ + 1) * (k_ + 1); }
  const ElementQuadrature& quadrature() const { return quad_; }

  double value(int i, double xi, double eta) const;
  std::array<double, 2> ref_gradient(int i, double xi, double eta) const;

  /// rows: quadrature points, columns: basis functions
  const Eigen::MatrixXd& values() const { return values_; }
  const Eigen::MatrixXd& dxi() const { return dxi_; }
  const Eigen::MatrixXd& deta() const { return deta_; }
  const Eigen::MatrixXd& face_values(int face) const { return face_values_[face]; }

  std::size_t num_cell_points() const { return quad_.points.size(); }
  std::size_t num_edge_points() const { return quad_.edge.points.size(); }

 private:
  double lagrange(int a, double x) const;
  double lagrange_derivative(int a, double x) const;

  int k_;
  std::vector<double> nodes_;
  ElementQuadrature quad_;
  Eigen::MatrixXd values_, dxi_, deta_;
  std::array<Eigen::MatrixXd, 4> face_values_;
};

/// Coefficient block of cell c inside a broken field vector.
inline std::span<const double> cell_coeffs(std::span<const double> field, int cell, int ndof) {
  return field.subspan(static_cast<std::size_t>(cell) * ndof, ndof);
}

/// Trace of a cell polynomial on local face f at the edge quadrature points.
ElementVector face_trace(const LocalBasis& basis, std::span<const double> coeffs, int face);

/// {v}_e at edge points: mean of both traces on interior edges, the single
/// trace on boundary edges. Throws TopologyError when an interior edge lacks
/// a side.
std::vector<double> average_on_edge(const Edge& edge, std::span<const double> plus, std::span<const double> minus);

/// [v] = v+ - v- at edge points; boundary edges return v.
std::vector<double> jump_on_edge(const Edge& edge, std::span<const double> plus, std::span<const double> minus);

/// Weak gradient on one cell, a field in [P_{k-1}]^2 expressed in monomials
/// of the local coordinates (xi, eta) in [0,1]^2: {1} for k = 1, {1, xi, eta}
/// for k = 2.
struct WeakGradient {
  int k = 1;
  Cell cell;
  Eigen::VectorXd gx, gy;

  std::array<double, 2> operator()(double x, double y) const;
  static int basis_size(int k) { return k == 1 ? 1 : 3; }
  static double monomial(int k, int j, double xi, double eta);
};

WeakGradient weak_gradient(const QuadMesh& mesh, const LocalBasis& basis, std::span<const double> field, int cell);

/// s . grad_w v on one cell as Q_k coefficients.
ElementVector weak_divergence(const QuadMesh& mesh, const LocalBasis& basis, std::span<const double> field, int cell,
                              const Direction& s);

/// Blocks of (v, w) -> -(v, s.grad w)_T + <{v}, s.n w>_{dT} for test
/// functions w on `cell`. `self` multiplies the cell's own coefficients,
/// `neighbor[f]` those of the neighbor across face f (interior faces only).
struct WeakConvectionBlocks {
  ElementMatrix self;
  std::array<std::optional<ElementMatrix>, 4> neighbor;
};

WeakConvectionBlocks weak_convection_matrix(const QuadMesh& mesh, const LocalBasis& basis, int cell,
                                            const Direction& s);

using ScalarFunction = std::function<double(double x, double y)>;

ElementMatrix mass_matrix(const Cell& cell, const LocalBasis& basis, const ScalarFunction& coefficient);
ElementMatrix mass_matrix(const Cell& cell, const LocalBasis& basis);

/// Coefficients of the L2 projection of f onto Q_k(cell).
ElementVector l2_project(const Cell& cell, const LocalBasis& basis, const ScalarFunction& f);

/// Element-wise projection of f over the whole mesh.
std::vector<double> l2_project(const QuadMesh& mesh, const LocalBasis& basis, const ScalarFunction& f);

/// Value of a broken field at a physical point of a given cell.
double eval_in_cell(const QuadMesh& mesh, const LocalBasis& basis, std::span<const double> field, int cell, double x,
                    double y);

}  // namespace dowg
