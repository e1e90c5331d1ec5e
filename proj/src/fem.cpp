#include "dowg/fem.hpp"

#include <stdexcept>
#include <string>

#include "dowg/errors.hpp"

namespace dowg {

namespace {

struct CellGeometry {
  double x0, y0, hx, hy;
  explicit CellGeometry(const Cell& c)
      : x0(c.lower[0]), y0(c.lower[1]), hx(c.upper[0] - c.lower[0]), hy(c.upper[1] - c.lower[1]) {}
  double jacobian() const { return hx * hy; }
  double face_length(int face) const { return (face == kLeft || face == kRight) ? hy : hx; }
  std::array<double, 2> to_physical(double xi, double eta) const { return {x0 + hx * xi, y0 + hy * eta}; }
};

}  // namespace

std::array<double, 2> ElementQuadrature::face_point(int face, double t) {
  switch (face) {
    case kLeft: return {0.0, t};
    case kRight: return {1.0, t};
    case kBottom: return {t, 0.0};
    default: return {t, 1.0};
  }
}

LocalBasis::LocalBasis(int k, int cell_points, int edge_points) : k_(k) {
  if (k != 1 && k != 2) throw std::invalid_argument("LocalBasis: order must be 1 or 2, got " + std::to_string(k));
  nodes_ = (k == 1) ? std::vector<double>{0.0, 1.0} : std::vector<double>{0.0, 0.5, 1.0};
  quad_.line = gauss_legendre_unit(cell_points > 0 ? cell_points : k + 2);
  quad_.edge = gauss_legendre_unit(edge_points > 0 ? edge_points : k + 1);
  const auto& line = quad_.line;
  for (std::size_t j = 0; j < line.points.size(); ++j)
    for (std::size_t i = 0; i < line.points.size(); ++i) {
      quad_.points.push_back({line.points[i], line.points[j]});
      quad_.weights.push_back(line.weights[i] * line.weights[j]);
    }

  const int nd = dofs();
  const auto nq = static_cast<Eigen::Index>(quad_.points.size());
  values_.resize(nq, nd);
  dxi_.resize(nq, nd);
  deta_.resize(nq, nd);
  for (Eigen::Index q = 0; q < nq; ++q)
    for (int i = 0; i < nd; ++i) {
      const auto [xi, eta] = quad_.points[q];
      values_(q, i) = value(i, xi, eta);
      const auto g = ref_gradient(i, xi, eta);
      dxi_(q, i) = g[0];
      deta_(q, i) = g[1];
    }
  const auto ne = static_cast<Eigen::Index>(quad_.edge.points.size());
  for (int f = 0; f < 4; ++f) {
    face_values_[f].resize(ne, nd);
    for (Eigen::Index q = 0; q < ne; ++q) {
      const auto p = ElementQuadrature::face_point(f, quad_.edge.points[q]);
      for (int i = 0; i < nd; ++i) face_values_[f](q, i) = value(i, p[0], p[1]);
    }
  }
}

double LocalBasis::lagrange(int a, double x) const {
  double v = 1.0;
  for (int b = 0; b <= k_; ++b)
    if (b != a) v *= (x - nodes_[b]) / (nodes_[a] - nodes_[b]);
  return v;
}

double LocalBasis::lagrange_derivative(int a, double x) const {
  double sum = 0.0;
  for (int c = 0; c <= k_; ++c) {
    if (c == a) continue;
    double term = 1.0 / (nodes_[a] - nodes_[c]);
    for (int b = 0; b <= k_; ++b)
      if (b != a && b != c) term *= (x - nodes_[b]) / (nodes_[a] - nodes_[b]);
    sum += term;
  }
  return sum;
}

double LocalBasis::value(int i, double xi, double eta) const {
  const int ix = i % (k_ + 1), iy = i / (k_ + 1);
  return lagrange(ix, xi) * lagrange(iy, eta);
}

std::array<double, 2> LocalBasis::ref_gradient(int i, double xi, double eta) const {
  const int ix = i % (k_ + 1), iy = i / (k_ + 1);
  return {lagrange_derivative(ix, xi) * lagrange(iy, eta), lagrange(ix, xi) * lagrange_derivative(iy, eta)};
}

ElementVector face_trace(const LocalBasis& basis, std::span<const double> coeffs, int face) {
  const Eigen::Map<const Eigen::VectorXd> c(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
  return basis.face_values(face) * c;
}

std::vector<double> average_on_edge(const Edge& edge, std::span<const double> plus, std::span<const double> minus) {
  if (!edge.interior()) return {plus.begin(), plus.end()};
  if (minus.size() != plus.size())
    throw TopologyError("average_on_edge: interior edge needs traces from both incident cells");
  std::vector<double> avg(plus.size());
  for (std::size_t q = 0; q < plus.size(); ++q) avg[q] = 0.5 * (plus[q] + minus[q]);
  return avg;
}

std::vector<double> jump_on_edge(const Edge& edge, std::span<const double> plus, std::span<const double> minus) {
  if (!edge.interior()) return {plus.begin(), plus.end()};
  if (minus.size() != plus.size())
    throw TopologyError("jump_on_edge: interior edge needs traces from both incident cells");
  std::vector<double> jump(plus.size());
  for (std::size_t q = 0; q < plus.size(); ++q) jump[q] = plus[q] - minus[q];
  return jump;
}

namespace {

/// {v} on local face f of `cell` at the edge points.
ElementVector face_average(const QuadMesh& mesh, const LocalBasis& basis, std::span<const double> field, int cell,
                           int face) {
  const int nd = basis.dofs();
  const ElementVector own = face_trace(basis, cell_coeffs(field, cell, nd), face);
  const int nb = mesh.cells[cell].neighbor[face];
  if (nb < 0) return own;
  const ElementVector other = face_trace(basis, cell_coeffs(field, nb, nd), opposite_face(face));
  return 0.5 * (own + other);
}

}  // namespace

double WeakGradient::monomial(int k, int j, double xi, double eta) {
  if (k == 1 || j == 0) return 1.0;
  return j == 1 ? xi : eta;
}

std::array<double, 2> WeakGradient::operator()(double x, double y) const {
  const CellGeometry g(cell);
  const double xi = (x - g.x0) / g.hx, eta = (y - g.y0) / g.hy;
  std::array<double, 2> out{0.0, 0.0};
  for (int j = 0; j < basis_size(k); ++j) {
    const double p = monomial(k, j, xi, eta);
    out[0] += gx[j] * p;
    out[1] += gy[j] * p;
  }
  return out;
}

WeakGradient weak_gradient(const QuadMesh& mesh, const LocalBasis& basis, std::span<const double> field, int cell) {
  const int k = basis.order();
  const int np = WeakGradient::basis_size(k);
  const int nd = basis.dofs();
  const Cell& c = mesh.cells[cell];
  const CellGeometry geo(c);
  const auto& quad = basis.quadrature();

  // d/dxi and d/deta of the monomials {1, xi, eta}
  auto dmono = [k](int j, int dir) -> double {
    if (k == 1 || j == 0) return 0.0;
    return (j == 1 && dir == 0) || (j == 2 && dir == 1) ? 1.0 : 0.0;
  };

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(np, np);
  Eigen::VectorXd rx = Eigen::VectorXd::Zero(np), ry = Eigen::VectorXd::Zero(np);
  const Eigen::Map<const Eigen::VectorXd> coeff(cell_coeffs(field, cell, nd).data(), nd);
  const Eigen::VectorXd vq = basis.values() * coeff;
  for (std::size_t q = 0; q < quad.points.size(); ++q) {
    const auto [xi, eta] = quad.points[q];
    const double w = quad.weights[q] * geo.jacobian();
    for (int a = 0; a < np; ++a) {
      const double pa = WeakGradient::monomial(k, a, xi, eta);
      for (int b = 0; b < np; ++b) gram(a, b) += w * pa * WeakGradient::monomial(k, b, xi, eta);
      rx[a] -= w * vq[q] * dmono(a, 0) / geo.hx;
      ry[a] -= w * vq[q] * dmono(a, 1) / geo.hy;
    }
  }
  for (int f = 0; f < 4; ++f) {
    const ElementVector avg = face_average(mesh, basis, field, cell, f);
    const double len = geo.face_length(f);
    for (std::size_t q = 0; q < basis.num_edge_points(); ++q) {
      const auto p = ElementQuadrature::face_point(f, quad.edge.points[q]);
      const double w = quad.edge.weights[q] * len * avg[static_cast<Eigen::Index>(q)];
      for (int a = 0; a < np; ++a) {
        const double pa = WeakGradient::monomial(k, a, p[0], p[1]);
        rx[a] += w * pa * kFaceNormal[f][0];
        ry[a] += w * pa * kFaceNormal[f][1];
      }
    }
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0.0)
    throw std::logic_error("weak_gradient: singular local Gram matrix");
  WeakGradient g;
  g.k = k;
  g.cell = c;
  g.gx = ldlt.solve(rx);
  g.gy = ldlt.solve(ry);
  return g;
}

ElementVector weak_divergence(const QuadMesh& mesh, const LocalBasis& basis, std::span<const double> field, int cell,
                              const Direction& s) {
  const int nd = basis.dofs();
  const WeakConvectionBlocks blocks = weak_convection_matrix(mesh, basis, cell, s);
  const Eigen::Map<const Eigen::VectorXd> own(cell_coeffs(field, cell, nd).data(), nd);
  ElementVector rhs = blocks.self * own;
  for (int f = 0; f < 4; ++f) {
    if (!blocks.neighbor[f]) continue;
    const int nb = mesh.cells[cell].neighbor[f];
    const Eigen::Map<const Eigen::VectorXd> other(cell_coeffs(field, nb, nd).data(), nd);
    rhs += *blocks.neighbor[f] * other;
  }
  return mass_matrix(mesh.cells[cell], basis).ldlt().solve(rhs);
}

WeakConvectionBlocks weak_convection_matrix(const QuadMesh& mesh, const LocalBasis& basis, int cell,
                                            const Direction& s) {
  const int nd = basis.dofs();
  const Cell& c = mesh.cells[cell];
  const CellGeometry geo(c);
  const auto& quad = basis.quadrature();
  WeakConvectionBlocks out;

  // -(v, s.grad w)_T, rows = test w, columns = trial v
  Eigen::MatrixXd sgrad(basis.num_cell_points(), nd);
  sgrad = s.unit[0] / geo.hx * basis.dxi() + s.unit[1] / geo.hy * basis.deta();
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(quad.weights.data(), static_cast<Eigen::Index>(quad.weights.size())) *
                            geo.jacobian();
  out.self = -(sgrad.transpose() * w.asDiagonal() * basis.values());

  const Eigen::VectorXd we =
      Eigen::Map<const Eigen::VectorXd>(quad.edge.weights.data(), static_cast<Eigen::Index>(quad.edge.weights.size()));
  for (int f = 0; f < 4; ++f) {
    const double sn = face_flux(s, f);
    const double len = geo.face_length(f);
    const Eigen::MatrixXd& own = basis.face_values(f);
    const bool interior = c.neighbor[f] >= 0;
    const double avg_weight = interior ? 0.5 : 1.0;
    out.self += (avg_weight * sn * len) * (own.transpose() * we.asDiagonal() * own);
    if (interior) {
      const Eigen::MatrixXd& other = basis.face_values(opposite_face(f));
      out.neighbor[f] = (0.5 * sn * len) * (own.transpose() * we.asDiagonal() * other);
    }
  }
  return out;
}

ElementMatrix mass_matrix(const Cell& cell, const LocalBasis& basis, const ScalarFunction& coefficient) {
  const CellGeometry geo(cell);
  const auto& quad = basis.quadrature();
  Eigen::VectorXd w(static_cast<Eigen::Index>(quad.points.size()));
  for (std::size_t q = 0; q < quad.points.size(); ++q) {
    const auto p = geo.to_physical(quad.points[q][0], quad.points[q][1]);
    w[static_cast<Eigen::Index>(q)] = quad.weights[q] * geo.jacobian() * coefficient(p[0], p[1]);
  }
  return basis.values().transpose() * w.asDiagonal() * basis.values();
}

ElementMatrix mass_matrix(const Cell& cell, const LocalBasis& basis) {
  return mass_matrix(cell, basis, [](double, double) { return 1.0; });
}

ElementVector l2_project(const Cell& cell, const LocalBasis& basis, const ScalarFunction& f) {
  const CellGeometry geo(cell);
  const auto& quad = basis.quadrature();
  ElementVector rhs = ElementVector::Zero(basis.dofs());
  for (std::size_t q = 0; q < quad.points.size(); ++q) {
    const auto p = geo.to_physical(quad.points[q][0], quad.points[q][1]);
    rhs += (quad.weights[q] * geo.jacobian() * f(p[0], p[1])) * basis.values().row(static_cast<Eigen::Index>(q)).transpose();
  }
  return mass_matrix(cell, basis).ldlt().solve(rhs);
}

std::vector<double> l2_project(const QuadMesh& mesh, const LocalBasis& basis, const ScalarFunction& f) {
  const int nd = basis.dofs();
  std::vector<double> out(mesh.num_cells() * nd);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const ElementVector v = l2_project(mesh.cells[c], basis, f);
    for (int i = 0; i < nd; ++i) out[c * nd + i] = v[i];
  }
  return out;
}

double eval_in_cell(const QuadMesh& mesh, const LocalBasis& basis, std::span<const double> field, int cell, double x,
                    double y) {
  const CellGeometry geo(mesh.cells[cell]);
  const double xi = (x - geo.x0) / geo.hx, eta = (y - geo.y0) / geo.hy;
  const int nd = basis.dofs();
  const auto c = cell_coeffs(field, cell, nd);
  double v = 0.0;
  for (int i = 0; i < nd; ++i) v += c[i] * basis.value(i, xi, eta);
  return v;
}

}  // namespace dowg
