#include "dowg/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dowg/errors.hpp"
#include "dowg/mutations.hpp"

namespace dowg {

void SchemeKind::validate() const {
  if (kind == Kind::DODG && !(cp > 0.0)) throw ValidationError("DODG penalty c_p must be > 0");
  if (kind == Kind::DODSD && !(sd_c > 0.0)) throw ValidationError("DODSD stabilization multiplier c must be > 0");
}

std::string SchemeKind::name() const {
  switch (kind) {
    case Kind::WG: return "wg";
    case Kind::DODG: return "dodg";
    default: return "dodsd";
  }
}

Discretization make_discretization(int level, int k, const AngularQuadrature& quad, const PhaseFunction& phase,
                                   Medium medium, bool renormalize_kernel) {
  if (quad.mode != QuadratureMode::CircleTrapezoid)
    throw ValidationError("spatial solves support the 2D circle quadrature only");
  return Discretization{build_mesh(level), LocalBasis(k), quad,
                        build_scatter_kernel(quad, phase, medium.sigma_t, medium.sigma_s, renormalize_kernel), medium};
}

RadianceField RadianceField::zeros(std::size_t num_ordinates, std::size_t ndof) {
  RadianceField f;
  f.ordinates.assign(num_ordinates, std::vector<double>(ndof, 0.0));
  return f;
}

void require_positive_margin(const ScatterKernel& kernel) {
  if (!(kernel.positivity_margin > 0.0)) {
    std::ostringstream msg;
    msg << "scattering kernel violates the positivity condition sigma_t - sigma_s * b >= C_* > 0: sigma_t = "
        << kernel.sigma_t << ", sigma_s = " << kernel.sigma_s << ", b = " << kernel.max_row_mass()
        << ", margin = " << kernel.positivity_margin;
    throw ValidationError(msg.str());
  }
}

namespace {

/// CSR builder for matrices coupling each cell with itself and its edge
/// neighbors only.
class BlockAssembler {
 public:
  BlockAssembler(const QuadMesh& mesh, int nd) : nd_(nd), ncells_(mesh.num_cells()) {
    cols_.resize(ncells_);
    for (std::size_t c = 0; c < ncells_; ++c) {
      auto& list = cols_[c];
      list.push_back(static_cast<int>(c));
      for (int nb : mesh.cells[c].neighbor)
        if (nb >= 0) list.push_back(nb);
      std::sort(list.begin(), list.end());
    }
    row_ptr_.assign(ncells_ * nd_ + 1, 0);
    for (std::size_t c = 0; c < ncells_; ++c)
      for (int a = 0; a < nd_; ++a) row_ptr_[c * nd_ + a + 1] = cols_[c].size() * nd_;
    for (std::size_t r = 0; r < ncells_ * nd_; ++r) row_ptr_[r + 1] += row_ptr_[r];
    col_.resize(row_ptr_.back());
    val_.assign(row_ptr_.back(), 0.0);
    for (std::size_t c = 0; c < ncells_; ++c)
      for (int a = 0; a < nd_; ++a) {
        std::size_t pos = row_ptr_[c * nd_ + a];
        for (int cc : cols_[c])
          for (int b = 0; b < nd_; ++b) col_[pos++] = static_cast<std::size_t>(cc) * nd_ + b;
      }
  }

  void add(int row_cell, int col_cell, const Eigen::MatrixXd& block, double scale = 1.0) {
    const auto& list = cols_[row_cell];
    const auto it = std::find(list.begin(), list.end(), col_cell);
    if (it == list.end()) throw TopologyError("BlockAssembler: coupling between non-adjacent cells");
    const std::size_t p = static_cast<std::size_t>(it - list.begin());
    for (int a = 0; a < nd_; ++a) {
      double* row = val_.data() + row_ptr_[static_cast<std::size_t>(row_cell) * nd_ + a] + p * nd_;
      for (int b = 0; b < nd_; ++b) row[b] += scale * block(a, b);
    }
  }

  SparseMatrix finish() {
    return SparseMatrix(ncells_ * nd_, std::move(row_ptr_), std::move(col_), std::move(val_));
  }

 private:
  int nd_;
  std::size_t ncells_;
  std::vector<std::vector<int>> cols_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_;
  std::vector<double> val_;
};

double cell_width(const Cell& c) { return c.upper[0] - c.lower[0]; }
double face_length(const Cell& c, int f) {
  return (f == kLeft || f == kRight) ? c.upper[1] - c.lower[1] : c.upper[0] - c.lower[0];
}

/// Reference edge mass F_f^T W F_g (unit edge length).
Eigen::MatrixXd edge_mass(const LocalBasis& basis, int f, int g) {
  const auto& we = basis.quadrature().edge.weights;
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(we.data(), static_cast<Eigen::Index>(we.size()));
  return basis.face_values(f).transpose() * w.asDiagonal() * basis.face_values(g);
}

/// S_ij = (phi_j, s.grad phi_i)_T
Eigen::MatrixXd streamline_matrix(const LocalBasis& basis, const Cell& cell, const Direction& s) {
  const double hx = cell.upper[0] - cell.lower[0], hy = cell.upper[1] - cell.lower[1];
  const auto& quad = basis.quadrature();
  const Eigen::VectorXd w =
      Eigen::Map<const Eigen::VectorXd>(quad.weights.data(), static_cast<Eigen::Index>(quad.weights.size())) * (hx * hy);
  const Eigen::MatrixXd sgrad = s.unit[0] / hx * basis.dxi() + s.unit[1] / hy * basis.deta();
  return sgrad.transpose() * w.asDiagonal() * basis.values();
}

/// (g, phi_i + delta s.grad phi_i)_T for a directional function g.
Eigen::VectorXd load_vector(const LocalBasis& basis, const Cell& cell, const Direction& s, const DirectionalFunction& g,
                            double delta) {
  const double hx = cell.upper[0] - cell.lower[0], hy = cell.upper[1] - cell.lower[1];
  const auto& quad = basis.quadrature();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(basis.dofs());
  for (std::size_t q = 0; q < quad.points.size(); ++q) {
    const auto qi = static_cast<Eigen::Index>(q);
    const double x = cell.lower[0] + hx * quad.points[q][0];
    const double y = cell.lower[1] + hy * quad.points[q][1];
    const double gw = g(x, y, s) * quad.weights[q] * hx * hy;
    out += gw * basis.values().row(qi).transpose();
    if (delta != 0.0)
      out += (gw * delta) * (s.unit[0] / hx * basis.dxi().row(qi) + s.unit[1] / hy * basis.deta().row(qi)).transpose();
  }
  return out;
}

/// <g, phi_i>_e on local face f.
Eigen::VectorXd edge_load(const LocalBasis& basis, const Cell& cell, int f, const Direction& s,
                          const DirectionalFunction& g) {
  const auto& quad = basis.quadrature();
  const double len = face_length(cell, f);
  const double hx = cell.upper[0] - cell.lower[0], hy = cell.upper[1] - cell.lower[1];
  Eigen::VectorXd out = Eigen::VectorXd::Zero(basis.dofs());
  for (std::size_t q = 0; q < basis.num_edge_points(); ++q) {
    const auto p = ElementQuadrature::face_point(f, quad.edge.points[q]);
    const double x = cell.lower[0] + hx * p[0], y = cell.lower[1] + hy * p[1];
    out += (quad.edge.weights[q] * len * g(x, y, s)) * basis.face_values(f).row(static_cast<Eigen::Index>(q)).transpose();
  }
  return out;
}

double inflow_sign() { return testing::mutations().flip_inflow_sign ? 1.0 : -1.0; }

std::shared_ptr<const SparseMatrix> shared_mass(const Discretization& disc) {
  return std::make_shared<const SparseMatrix>(assemble_mass(disc));
}

DirectionSystem make_system(const Discretization& disc, int m, const SchemeKind& scheme) {
  DirectionSystem sys;
  sys.m = m;
  sys.scheme = scheme;
  sys.rhs.assign(disc.ndof(), 0.0);
  sys.blocks.block_size = disc.dofs_per_cell();
  sys.blocks.order = sweep_order(disc.mesh, disc.quad.nodes[m]);
  return sys;
}

void check_ordinate(const Discretization& disc, int m) {
  if (m < 0 || static_cast<std::size_t>(m) >= disc.num_ordinates())
    throw std::invalid_argument("ordinate index out of range: " + std::to_string(m));
}

void add_to_rhs(std::vector<double>& rhs, int cell, int nd, const Eigen::VectorXd& v, double scale = 1.0) {
  for (int i = 0; i < nd; ++i) rhs[static_cast<std::size_t>(cell) * nd + i] += scale * v[i];
}

}  // namespace

SparseMatrix assemble_mass(const Discretization& disc) {
  const int nd = disc.dofs_per_cell();
  std::vector<SparseMatrix::Triplet> t;
  t.reserve(disc.mesh.num_cells() * nd * nd);
  for (std::size_t c = 0; c < disc.mesh.num_cells(); ++c) {
    const Eigen::MatrixXd M = mass_matrix(disc.mesh.cells[c], disc.basis);
    for (int a = 0; a < nd; ++a)
      for (int b = 0; b < nd; ++b) t.push_back({c * nd + a, c * nd + b, M(a, b)});
  }
  return SparseMatrix::from_triplets(disc.ndof(), std::move(t));
}

DirectionSystem assemble_wg(const Discretization& disc, const ProblemData& data, int m) {
  check_ordinate(disc, m);
  require_positive_margin(disc.kernel);
  const auto& mesh = disc.mesh;
  const auto& basis = disc.basis;
  const Direction& s = disc.quad.nodes[m];
  const int nd = basis.dofs();
  const DirectionalEdgeSets sets = classify_edges(mesh, s);

  DirectionSystem sys = make_system(disc, m, SchemeKind::wg());
  BlockAssembler A(mesh, nd);
  std::array<std::array<Eigen::MatrixXd, 4>, 4> E;
  for (int f = 0; f < 4; ++f)
    for (int g = 0; g < 4; ++g) E[f][g] = edge_mass(basis, f, g);

  for (std::size_t ci = 0; ci < mesh.num_cells(); ++ci) {
    const int c = static_cast<int>(ci);
    const Cell& cell = mesh.cells[ci];
    // convection through the weak-divergence identity
    const WeakConvectionBlocks conv = weak_convection_matrix(mesh, basis, c, s);
    A.add(c, c, conv.self);
    for (int f = 0; f < 4; ++f)
      if (conv.neighbor[f]) A.add(c, cell.neighbor[f], *conv.neighbor[f]);
    A.add(c, c, mass_matrix(cell, basis), disc.medium.sigma_t);

    for (int f = 0; f < 4; ++f) {
      const double sn = face_flux(s, f);
      const double len = face_length(cell, f);
      const int nb = cell.neighbor[f];
      if (nb < 0) {
        // weak inflow condition -<s.n u, v> on the inflow boundary
        if (sets.is_inflow(c, f)) {
          A.add(c, c, E[f][f], inflow_sign() * sn * len);
          add_to_rhs(sys.rhs, c, nd, edge_load(basis, cell, f, s, data.inflow), -sn);
        }
        continue;
      }
      // stabilization on outflow faces: <s.n (u - {u}), v - {v}>, both
      // differences equal half the one-sided jump
      if (sets.is_outflow(c, f) && sn != 0.0) {
        const int g = opposite_face(f);
        const double w = 0.25 * sn * len;
        A.add(c, c, E[f][f], w);
        A.add(c, nb, E[f][g], -w);
        A.add(nb, c, E[g][f], -w);
        A.add(nb, nb, E[g][g], w);
      }
    }
    add_to_rhs(sys.rhs, c, nd, load_vector(basis, cell, s, data.source, 0.0));
  }
  sys.matrix = A.finish();
  sys.mass = shared_mass(disc);
  sys.source_test = sys.mass;
  return sys;
}

DirectionSystem assemble_dodg(const Discretization& disc, const ProblemData& data, int m, double cp) {
  check_ordinate(disc, m);
  require_positive_margin(disc.kernel);
  const SchemeKind scheme = SchemeKind::dodg(cp);
  scheme.validate();
  const auto& mesh = disc.mesh;
  const auto& basis = disc.basis;
  const Direction& s = disc.quad.nodes[m];
  const int nd = basis.dofs();
  const DirectionalEdgeSets sets = classify_edges(mesh, s);

  DirectionSystem sys = make_system(disc, m, scheme);
  BlockAssembler A(mesh, nd);
  std::array<std::array<Eigen::MatrixXd, 4>, 4> E;
  for (int f = 0; f < 4; ++f)
    for (int g = 0; g < 4; ++g) E[f][g] = edge_mass(basis, f, g);

  for (std::size_t ci = 0; ci < mesh.num_cells(); ++ci) {
    const int c = static_cast<int>(ci);
    const Cell& cell = mesh.cells[ci];
    A.add(c, c, streamline_matrix(basis, cell, s), -1.0);
    A.add(c, c, mass_matrix(cell, basis), disc.medium.sigma_t);
    for (int f = 0; f < 4; ++f) {
      const double sn = face_flux(s, f);
      const double len = face_length(cell, f);
      const int nb = cell.neighbor[f];
      if (sets.is_outflow(c, f)) {
        A.add(c, c, E[f][f], sn * len);
      } else if (nb >= 0) {
        A.add(c, nb, E[f][opposite_face(f)], sn * len);
      } else {
        add_to_rhs(sys.rhs, c, nd, edge_load(basis, cell, f, s, data.inflow), -sn);
      }
      // jump penalty, each interior edge visited from its lower-index side
      if (nb > c) {
        const int g = opposite_face(f);
        A.add(c, c, E[f][f], cp * len);
        A.add(c, nb, E[f][g], -cp * len);
        A.add(nb, c, E[g][f], -cp * len);
        A.add(nb, nb, E[g][g], cp * len);
      }
    }
    add_to_rhs(sys.rhs, c, nd, load_vector(basis, cell, s, data.source, 0.0));
  }
  sys.matrix = A.finish();
  sys.mass = shared_mass(disc);
  sys.source_test = sys.mass;
  return sys;
}

DirectionSystem assemble_dodsd(const Discretization& disc, const ProblemData& data, int m, double c_sd) {
  check_ordinate(disc, m);
  require_positive_margin(disc.kernel);
  const SchemeKind scheme = SchemeKind::dodsd(c_sd);
  scheme.validate();
  const auto& mesh = disc.mesh;
  const auto& basis = disc.basis;
  const Direction& s = disc.quad.nodes[m];
  const int nd = basis.dofs();
  const DirectionalEdgeSets sets = classify_edges(mesh, s);
  const double delta = c_sd * mesh.h;

  DirectionSystem sys = make_system(disc, m, scheme);
  BlockAssembler A(mesh, nd);
  std::vector<SparseMatrix::Triplet> test_triplets;
  test_triplets.reserve(disc.ndof() * nd);

  for (std::size_t ci = 0; ci < mesh.num_cells(); ++ci) {
    const int c = static_cast<int>(ci);
    const Cell& cell = mesh.cells[ci];
    const Eigen::MatrixXd M = mass_matrix(cell, basis);
    const Eigen::MatrixXd S = streamline_matrix(basis, cell, s);  // (phi_j, s.grad phi_i)
    // (s.grad u + sigma_t u, v + delta s.grad v)
    const Eigen::MatrixXd G = S.transpose();                     // (s.grad phi_j, phi_i)
    const double hx = cell_width(cell), hy = cell.upper[1] - cell.lower[1];
    const auto& quad = basis.quadrature();
    const Eigen::MatrixXd sgrad = s.unit[0] / hx * basis.dxi() + s.unit[1] / hy * basis.deta();
    const Eigen::VectorXd w =
        Eigen::Map<const Eigen::VectorXd>(quad.weights.data(), static_cast<Eigen::Index>(quad.weights.size())) *
        (hx * hy);
    const Eigen::MatrixXd SS = sgrad.transpose() * w.asDiagonal() * sgrad;  // (s.grad phi_j, s.grad phi_i)
    const double st = disc.medium.sigma_t;
    A.add(c, c, G + st * M + delta * SS + (delta * st) * S);

    const Eigen::MatrixXd T = M + delta * S;
    for (int a = 0; a < nd; ++a)
      for (int b = 0; b < nd; ++b) test_triplets.push_back({ci * nd + a, ci * nd + b, T(a, b)});

    for (int f = 0; f < 4; ++f) {
      if (!sets.is_inflow(c, f)) continue;
      const double an = std::abs(face_flux(s, f));
      const double len = face_length(cell, f);
      const int nb = cell.neighbor[f];
      // <u+ - u-, v+ |s.n|> on the inflow part of the cell boundary
      A.add(c, c, edge_mass(basis, f, f), an * len);
      if (nb >= 0) {
        A.add(c, nb, edge_mass(basis, f, opposite_face(f)), -an * len);
      } else {
        add_to_rhs(sys.rhs, c, nd, edge_load(basis, cell, f, s, data.inflow), an);
      }
    }
    add_to_rhs(sys.rhs, c, nd, load_vector(basis, cell, s, data.source, delta));
  }
  sys.matrix = A.finish();
  sys.mass = shared_mass(disc);
  sys.source_test = std::make_shared<const SparseMatrix>(SparseMatrix::from_triplets(disc.ndof(), std::move(test_triplets)));
  return sys;
}

DirectionSystem assemble(const Discretization& disc, const SchemeKind& scheme, const ProblemData& data, int m) {
  scheme.validate();
  switch (scheme.kind) {
    case SchemeKind::Kind::WG: return assemble_wg(disc, data, m);
    case SchemeKind::Kind::DODG: return assemble_dodg(disc, data, m, scheme.cp);
    default: return assemble_dodsd(disc, data, m, scheme.sd_c);
  }
}

std::vector<DirectionSystem> assemble_all(const Discretization& disc, const SchemeKind& scheme,
                                          const ProblemData& data) {
  std::vector<DirectionSystem> out;
  out.reserve(disc.num_ordinates());
  for (std::size_t m = 0; m < disc.num_ordinates(); ++m) out.push_back(assemble(disc, scheme, data, static_cast<int>(m)));
  // one mass matrix is enough for all ordinates
  for (auto& sys : out) {
    const bool shared_test = sys.source_test == sys.mass;
    sys.mass = out.front().mass;
    if (shared_test) sys.source_test = sys.mass;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Matrix-free evaluation. These loops deliberately avoid the block helpers
// above so that they can serve as an independent check of the assembly.

namespace {

/// Basis values at the element and edge points, obtained by point
/// evaluation rather than from the precomputed basis tables.
struct PointTables {
  Eigen::MatrixXd value, dxi, deta;     // points x dofs
  std::array<Eigen::MatrixXd, 4> face;  // edge points x dofs, per local face

  explicit PointTables(const LocalBasis& basis) {
    const auto& quad = basis.quadrature();
    const int nd = basis.dofs();
    const auto nq = static_cast<Eigen::Index>(quad.points.size());
    value.resize(nq, nd);
    dxi.resize(nq, nd);
    deta.resize(nq, nd);
    for (Eigen::Index q = 0; q < nq; ++q) {
      const auto [xi, eta] = quad.points[q];
      for (int i = 0; i < nd; ++i) {
        const auto g = basis.ref_gradient(i, xi, eta);
        value(q, i) = basis.value(i, xi, eta);
        dxi(q, i) = g[0];
        deta(q, i) = g[1];
      }
    }
    const auto ne = static_cast<Eigen::Index>(quad.edge.points.size());
    for (int f = 0; f < 4; ++f) {
      face[f].resize(ne, nd);
      for (Eigen::Index q = 0; q < ne; ++q) {
        const auto p = ElementQuadrature::face_point(f, quad.edge.points[q]);
        for (int i = 0; i < nd; ++i) face[f](q, i) = basis.value(i, p[0], p[1]);
      }
    }
  }
};

/// One ordinate of a broken field at all points, one column per cell.
struct FieldPoints {
  Eigen::MatrixXd value, dx, dy;
  std::array<Eigen::MatrixXd, 4> face;
};

FieldPoints field_points(const PointTables& t, const QuadMesh& mesh, std::span<const double> field) {
  const auto nd = t.value.cols();
  const auto nc = static_cast<Eigen::Index>(mesh.num_cells());
  const Eigen::Map<const Eigen::MatrixXd> C(field.data(), nd, nc);
  Eigen::VectorXd inv_hx(nc), inv_hy(nc);
  for (Eigen::Index c = 0; c < nc; ++c) {
    inv_hx[c] = 1.0 / (mesh.cells[c].upper[0] - mesh.cells[c].lower[0]);
    inv_hy[c] = 1.0 / (mesh.cells[c].upper[1] - mesh.cells[c].lower[1]);
  }
  FieldPoints fp;
  fp.value = t.value * C;
  fp.dx = (t.dxi * C) * inv_hx.asDiagonal();
  fp.dy = (t.deta * C) * inv_hy.asDiagonal();
  for (int f = 0; f < 4; ++f) fp.face[f] = t.face[f] * C;
  return fp;
}

double ordinate_form(const Discretization& disc, const SchemeKind& scheme, const Direction& s, const FieldPoints& U,
                     const FieldPoints& V, const Eigen::MatrixXd& ku) {
  const auto& mesh = disc.mesh;
  const auto& quad = disc.basis.quadrature();
  const double st = disc.medium.sigma_t, ss = disc.medium.sigma_s;
  const double delta = scheme.kind == SchemeKind::Kind::DODSD ? scheme.sd_c * mesh.h : 0.0;
  double total = 0.0;

  for (std::size_t ci = 0; ci < mesh.num_cells(); ++ci) {
    const auto c = static_cast<Eigen::Index>(ci);
    const double jac = mesh.cells[ci].area();
    for (std::size_t qi = 0; qi < quad.points.size(); ++qi) {
      const auto q = static_cast<Eigen::Index>(qi);
      const double w = quad.weights[qi] * jac;
      const double uq = U.value(q, c), vq = V.value(q, c);
      const double sgu = s.x() * U.dx(q, c) + s.y() * U.dy(q, c);
      const double sgv = s.x() * V.dx(q, c) + s.y() * V.dy(q, c);
      const double reaction = st * uq - ss * ku(q, c);
      switch (scheme.kind) {
        case SchemeKind::Kind::WG:
        case SchemeKind::Kind::DODG:
          total += w * (-uq * sgv + reaction * vq);
          break;
        case SchemeKind::Kind::DODSD:
          total += w * (sgu + reaction) * (vq + delta * sgv);
          break;
      }
    }
  }

  const auto& we = quad.edge.weights;
  std::array<std::vector<double>, 2> ut, vt;
  for (const Edge& edge : mesh.edges) {
    const double len = edge.length();
    const int nsides = edge.interior() ? 2 : 1;
    for (int side = 0; side < nsides; ++side) {
      const auto c = static_cast<Eigen::Index>(edge.cells[side]);
      const int f = edge.local_face[side];
      ut[side].assign(U.face[f].col(c).data(), U.face[f].col(c).data() + we.size());
      vt[side].assign(V.face[f].col(c).data(), V.face[f].col(c).data() + we.size());
    }
    const auto uavg = average_on_edge(edge, ut[0], nsides == 2 ? std::span<const double>(ut[1]) : std::span<const double>());
    const auto vavg = average_on_edge(edge, vt[0], nsides == 2 ? std::span<const double>(vt[1]) : std::span<const double>());
    for (int side = 0; side < nsides; ++side) {
      const double sign = side == 0 ? 1.0 : -1.0;
      const double sn = sign * (s.x() * edge.normal[0] + s.y() * edge.normal[1]);
      const bool inflow = is_inflow_flux(sn);
      const int other = 1 - side;
      for (std::size_t q = 0; q < we.size(); ++q) {
        const double w = we[q] * len;
        const double uo = ut[side][q], vo = vt[side][q];
        switch (scheme.kind) {
          case SchemeKind::Kind::WG:
            total += w * uavg[q] * sn * vo;
            if (!inflow) total += w * sn * (uo - uavg[q]) * (vo - vavg[q]);
            if (!edge.interior() && inflow) total += w * inflow_sign() * sn * uo * vo;
            break;
          case SchemeKind::Kind::DODG: {
            double uhat = 0.0;
            if (!inflow) uhat = uo;
            else if (edge.interior()) uhat = ut[other][q];
            total += w * sn * uhat * vo;
            break;
          }
          case SchemeKind::Kind::DODSD:
            if (inflow) {
              const double uext = edge.interior() ? ut[other][q] : 0.0;
              total += w * (uo - uext) * vo * std::abs(sn);
            }
            break;
        }
      }
    }
    if (scheme.kind == SchemeKind::Kind::DODG && edge.interior()) {
      const auto ju = jump_on_edge(edge, ut[0], ut[1]);
      const auto jv = jump_on_edge(edge, vt[0], vt[1]);
      for (std::size_t q = 0; q < we.size(); ++q) total += scheme.cp * we[q] * len * ju[q] * jv[q];
    }
  }
  return total;
}

/// sum_l w_l Phi[m][l] u^l at every element quadrature point (points x cells),
/// per ordinate.
std::vector<Eigen::MatrixXd> scatter_points(const Discretization& disc, const std::vector<FieldPoints>& u) {
  const std::size_t nord = disc.num_ordinates();
  std::vector<Eigen::MatrixXd> out(nord);
  for (std::size_t m = 0; m < nord; ++m) {
    out[m] = Eigen::MatrixXd::Zero(u[0].value.rows(), u[0].value.cols());
    for (std::size_t l = 0; l < nord; ++l) out[m] += (disc.quad.weights[l] * disc.kernel(m, l)) * u[l].value;
  }
  return out;
}

std::vector<FieldPoints> all_points(const PointTables& t, const Discretization& disc, const RadianceField& f) {
  std::vector<FieldPoints> out;
  out.reserve(f.size());
  for (const auto& o : f.ordinates) out.push_back(field_points(t, disc.mesh, o));
  return out;
}

void check_field(const Discretization& disc, const RadianceField& f) {
  if (f.size() != disc.num_ordinates()) throw std::invalid_argument("field has wrong number of ordinates");
  for (const auto& v : f.ordinates)
    if (v.size() != disc.ndof()) throw std::invalid_argument("field ordinate has wrong length");
}

}  // namespace

double eval_bilinear(const Discretization& disc, const SchemeKind& scheme, const RadianceField& u,
                     const RadianceField& v) {
  check_field(disc, u);
  check_field(disc, v);
  const PointTables tables(disc.basis);
  const auto U = all_points(tables, disc, u);
  const auto V = all_points(tables, disc, v);
  const auto ku = scatter_points(disc, U);
  double total = 0.0;
  for (std::size_t m = 0; m < disc.num_ordinates(); ++m)
    total += disc.quad.weights[m] * ordinate_form(disc, scheme, disc.quad.nodes[m], U[m], V[m], ku[m]);
  return total;
}

double eval_bilinear_assembled(const Discretization& disc, const std::vector<DirectionSystem>& systems,
                               const RadianceField& u, const RadianceField& v) {
  check_field(disc, u);
  check_field(disc, v);
  const std::size_t nord = disc.num_ordinates();
  const std::size_t n = disc.ndof();
  double total = 0.0;
  for (std::size_t m = 0; m < nord; ++m) {
    std::vector<double> scat(n, 0.0);
    for (std::size_t l = 0; l < nord; ++l) {
      const double w = disc.medium.sigma_s * disc.quad.weights[l] * disc.kernel(m, l);
      for (std::size_t i = 0; i < n; ++i) scat[i] += w * u[l][i];
    }
    const double a = systems[m].matrix.bilinear(v[m], u[m]) - systems[m].source_test->bilinear(v[m], scat);
    total += disc.quad.weights[m] * a;
  }
  return total;
}

double eval_linear(const Discretization& disc, const SchemeKind& scheme, const ProblemData& data,
                   const RadianceField& v) {
  check_field(disc, v);
  const auto& mesh = disc.mesh;
  const auto& basis = disc.basis;
  const auto& quad = basis.quadrature();
  const PointTables tables(basis);
  const double delta = scheme.kind == SchemeKind::Kind::DODSD ? scheme.sd_c * mesh.h : 0.0;
  double total = 0.0;
  for (std::size_t m = 0; m < disc.num_ordinates(); ++m) {
    const Direction& s = disc.quad.nodes[m];
    const FieldPoints V = field_points(tables, mesh, v[m]);
    double fm = 0.0;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
      const Cell& cell = mesh.cells[c];
      const auto ci = static_cast<Eigen::Index>(c);
      for (std::size_t q = 0; q < quad.points.size(); ++q) {
        const double x = cell.lower[0] + (cell.upper[0] - cell.lower[0]) * quad.points[q][0];
        const double y = cell.lower[1] + (cell.upper[1] - cell.lower[1]) * quad.points[q][1];
        const auto qi = static_cast<Eigen::Index>(q);
        const double test = V.value(qi, ci) + delta * (s.x() * V.dx(qi, ci) + s.y() * V.dy(qi, ci));
        fm += quad.weights[q] * cell.area() * data.source(x, y, s) * test;
      }
    }
    for (const Edge& edge : mesh.edges) {
      if (edge.interior()) continue;
      const double sn = s.x() * edge.normal[0] + s.y() * edge.normal[1];
      if (!is_inflow_flux(sn)) continue;
      const auto vt = V.face[edge.local_face[0]].col(edge.cells[0]);
      for (std::size_t q = 0; q < quad.edge.points.size(); ++q) {
        const double t = quad.edge.points[q];
        const double x = edge.p0[0] + t * (edge.p1[0] - edge.p0[0]);
        const double y = edge.p0[1] + t * (edge.p1[1] - edge.p0[1]);
        fm -= quad.edge.weights[q] * edge.length() * sn * data.inflow(x, y, s) * vt[static_cast<Eigen::Index>(q)];
      }
    }
    total += disc.quad.weights[m] * fm;
  }
  return total;
}

double triple_norm(const Discretization& disc, const RadianceField& field) {
  check_field(disc, field);
  const auto& mesh = disc.mesh;
  const auto& basis = disc.basis;
  const auto& we = basis.quadrature().edge.weights;
  const PointTables tables(basis);
  const SparseMatrix mass = assemble_mass(disc);
  double total = 0.0;
  std::vector<double> a(we.size()), b(we.size());
  for (std::size_t m = 0; m < disc.num_ordinates(); ++m) {
    const Direction& s = disc.quad.nodes[m];
    const FieldPoints F = field_points(tables, mesh, field[m]);
    double nm = mass.bilinear(field[m], field[m]);
    for (const Edge& edge : mesh.edges) {
      const double an = std::abs(s.x() * edge.normal[0] + s.y() * edge.normal[1]);
      const auto ta = F.face[edge.local_face[0]].col(edge.cells[0]);
      a.assign(ta.data(), ta.data() + we.size());
      if (edge.interior()) {
        const auto tb = F.face[edge.local_face[1]].col(edge.cells[1]);
        b.assign(tb.data(), tb.data() + we.size());
        const auto avg = average_on_edge(edge, a, b);
        for (std::size_t q = 0; q < we.size(); ++q) {
          const double da = a[q] - avg[q], db = b[q] - avg[q];
          nm += we[q] * edge.length() * an * (da * da + db * db);
        }
      } else {
        for (std::size_t q = 0; q < we.size(); ++q) nm += we[q] * edge.length() * an * a[q] * a[q];
      }
    }
    total += disc.quad.weights[m] * nm;
  }
  return std::sqrt(total);
}

double l2_dom_norm(const Discretization& disc, const RadianceField& field) {
  check_field(disc, field);
  const SparseMatrix mass = assemble_mass(disc);
  double total = 0.0;
  for (std::size_t m = 0; m < disc.num_ordinates(); ++m) total += disc.quad.weights[m] * mass.bilinear(field[m], field[m]);
  return std::sqrt(std::max(total, 0.0));
}

}  // namespace dowg
