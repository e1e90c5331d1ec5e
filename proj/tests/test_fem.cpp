#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dowg/errors.hpp"
#include "dowg/fem.hpp"

using namespace dowg;
using std::numbers::pi;

namespace {

std::vector<double> random_field(const QuadMesh& mesh, int nd, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> v(mesh.num_cells() * nd);
  for (double& x : v) x = U(rng);
  return v;
}

// value of cell polynomial at reference point, evaluated through `basis`
double poly(const LocalBasis& basis, std::span<const double> c, double xi, double eta) {
  double s = 0.0;
  for (int j = 0; j < basis.dofs(); ++j) s += c[j] * basis.value(j, xi, eta);
  return s;
}

std::array<double, 2> node_xy(int k, int j) {
  const double t[3] = {0.0, k == 1 ? 1.0 : 0.5, 1.0};
  return {t[j % (k + 1)], t[j / (k + 1)]};
}

}  // namespace

TEST_CASE("basis is nodal and a partition of unity") {
  for (int k = 1; k <= 2; ++k) {
    const LocalBasis b(k);
    CHECK(b.dofs() == (k + 1) * (k + 1));
    for (int i = 0; i < b.dofs(); ++i)
      for (int j = 0; j < b.dofs(); ++j) {
        const auto p = node_xy(k, j);
        CHECK(b.value(i, p[0], p[1]) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-14));
      }
    for (auto [x, y] : {std::pair{0.13, 0.77}, std::pair{0.5, 0.25}, std::pair{0.91, 0.02}}) {
      double s = 0.0, gx = 0.0, gy = 0.0;
      for (int i = 0; i < b.dofs(); ++i) {
        s += b.value(i, x, y);
        gx += b.ref_gradient(i, x, y)[0];
        gy += b.ref_gradient(i, x, y)[1];
      }
      CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(std::abs(gx) < 1e-13);
      CHECK(std::abs(gy) < 1e-13);
    }
  }
}

TEST_CASE("reference gradients match central differences") {
  const double d = 1e-6;
  for (int k = 1; k <= 2; ++k) {
    const LocalBasis b(k);
    for (int i = 0; i < b.dofs(); ++i) {
      const double x = 0.37, y = 0.61;
      const auto g = b.ref_gradient(i, x, y);
      CHECK(g[0] == doctest::Approx((b.value(i, x + d, y) - b.value(i, x - d, y)) / (2 * d)).epsilon(1e-7));
      CHECK(g[1] == doctest::Approx((b.value(i, x, y + d) - b.value(i, x, y - d)) / (2 * d)).epsilon(1e-7));
    }
  }
}

TEST_CASE("tables agree with point evaluation") {
  const LocalBasis b(2);
  const auto& q = b.quadrature();
  for (std::size_t p = 0; p < q.points.size(); ++p)
    for (int i = 0; i < b.dofs(); ++i) {
      CHECK(b.values()(p, i) == doctest::Approx(b.value(i, q.points[p][0], q.points[p][1])));
      CHECK(b.dxi()(p, i) == doctest::Approx(b.ref_gradient(i, q.points[p][0], q.points[p][1])[0]));
    }
  for (int f = 0; f < 4; ++f)
    for (std::size_t p = 0; p < q.edge.points.size(); ++p) {
      const auto r = ElementQuadrature::face_point(f, q.edge.points[p]);
      for (int i = 0; i < b.dofs(); ++i) CHECK(b.face_values(f)(p, i) == doctest::Approx(b.value(i, r[0], r[1])));
    }
}

TEST_CASE("mass matrix") {
  const QuadMesh mesh = build_mesh(1);
  const Cell& cell = mesh.cells[0];
  const LocalBasis b(1);
  const ElementMatrix M = mass_matrix(cell, b);
  CHECK(M.sum() == doctest::Approx(0.25).epsilon(1e-14));
  CHECK((M - M.transpose()).norm() < 1e-15);
  // trace oracle with a finer rule
  const LocalBasis fine(1, 6, 6);
  double tr = 0.0;
  for (std::size_t p = 0; p < fine.quadrature().points.size(); ++p)
    for (int i = 0; i < 4; ++i) {
      const double v = fine.values()(p, i);
      tr += fine.quadrature().weights[p] * 0.25 * v * v;
    }
  CHECK(M.trace() == doctest::Approx(tr).epsilon(1e-14));
  // tensor Q1 mass on a square of side h: h^2/36 * [[4,2],[2,4]] x [[4,2],[2,4]] / ...
  CHECK(M(0, 0) == doctest::Approx(0.25 * 4.0 / 36.0).epsilon(1e-14));
  CHECK(M(0, 3) == doctest::Approx(0.25 * 1.0 / 36.0).epsilon(1e-14));
  CHECK(mass_matrix(cell, b, [](double, double) { return 0.0; }).norm() == 0.0);
  const ElementMatrix M2 = mass_matrix(cell, b, [](double, double) { return 2.0; });
  CHECK((M2 - 2 * M).norm() < 1e-15);
}

TEST_CASE("average and jump") {
  const QuadMesh mesh = build_mesh(1);
  const Edge* interior = nullptr;
  const Edge* boundary = nullptr;
  for (const Edge& e : mesh.edges) (e.interior() ? interior : boundary) = &e;
  const std::vector<double> one{1.0, 1.0}, three{3.0, 3.0}, g{0.4, -0.2};
  for (double a : average_on_edge(*interior, one, three)) CHECK(a == 2.0);
  for (double j : jump_on_edge(*interior, one, three)) CHECK(j == -2.0);
  for (double j : jump_on_edge(*interior, three, one)) CHECK(j == 2.0);
  for (double j : jump_on_edge(*interior, g, g)) CHECK(j == 0.0);
  const auto ag = average_on_edge(*interior, g, g);
  CHECK(ag[0] == g[0]);
  CHECK(ag[1] == g[1]);
  const auto b = average_on_edge(*boundary, g, {});
  CHECK(b[0] == g[0]);
  CHECK(b[1] == g[1]);
  CHECK_THROWS_AS(average_on_edge(*interior, one, {}), TopologyError);
  CHECK_THROWS_AS(jump_on_edge(*interior, one, {}), TopologyError);
}

TEST_CASE("weak gradient identity against a fine quadrature") {
  const QuadMesh mesh = build_mesh(1);
  for (int k = 1; k <= 2; ++k) {
    const LocalBasis basis(k);
    const LocalBasis fine(k, k + 5, k + 5);
    const auto& fq = fine.quadrature();
    const int nd = basis.dofs();
    const auto v = random_field(mesh, nd, 100 + k);
    for (std::size_t ci = 0; ci < mesh.num_cells(); ++ci) {
      const int c = static_cast<int>(ci);
      const Cell& cell = mesh.cells[ci];
      const double hx = cell.upper[0] - cell.lower[0], hy = cell.upper[1] - cell.lower[1];
      const WeakGradient g = weak_gradient(mesh, basis, v, c);
      const auto vc = cell_coeffs(v, c, nd);
      for (int comp = 0; comp < 2; ++comp)
        for (int j = 0; j < WeakGradient::basis_size(k); ++j) {
          // q = monomial_j e_comp; d/dx of xi is 1/hx
          auto mono = [&](double xi, double eta) { return WeakGradient::monomial(k, j, xi, eta); };
          auto div_q = [&](double, double) {
            if (j == 0) return 0.0;
            if (j == 1) return comp == 0 ? 1.0 / hx : 0.0;
            return comp == 1 ? 1.0 / hy : 0.0;
          };
          double lhs = 0.0, rhs = 0.0;
          for (std::size_t p = 0; p < fq.points.size(); ++p) {
            const auto [xi, eta] = fq.points[p];
            const double w = fq.weights[p] * hx * hy;
            const auto gv = g(cell.lower[0] + xi * hx, cell.lower[1] + eta * hy);
            lhs += w * gv[comp] * mono(xi, eta);
            rhs -= w * poly(fine, vc, xi, eta) * div_q(xi, eta);
          }
          for (int f = 0; f < 4; ++f) {
            const double n = kFaceNormal[f][comp];
            if (n == 0.0) continue;
            const double len = f < 2 ? hy : hx;
            const int nb = cell.neighbor[f];
            for (std::size_t p = 0; p < fq.edge.points.size(); ++p) {
              const auto r = ElementQuadrature::face_point(f, fq.edge.points[p]);
              double avg = poly(fine, vc, r[0], r[1]);
              if (nb >= 0) {
                const auto ro = ElementQuadrature::face_point(opposite_face(f), fq.edge.points[p]);
                avg = 0.5 * (avg + poly(fine, cell_coeffs(v, nb, nd), ro[0], ro[1]));
              }
              rhs += fq.edge.weights[p] * len * avg * n * mono(r[0], r[1]);
            }
          }
          CHECK(std::abs(lhs - rhs) <= 1e-12);
        }
    }
  }
}

TEST_CASE("weak gradient of constants and linears") {
  const QuadMesh mesh = build_mesh(3);
  for (int k = 1; k <= 2; ++k) {
    const LocalBasis basis(k);
    const auto c = l2_project(mesh, basis, [](double, double) { return 4.5; });
    const auto lin = l2_project(mesh, basis, [](double x, double y) { return 0.3 - 1.7 * x + 2.2 * y; });
    for (std::size_t ci = 0; ci < mesh.num_cells(); ++ci) {
      const WeakGradient g0 = weak_gradient(mesh, basis, c, static_cast<int>(ci));
      const WeakGradient g1 = weak_gradient(mesh, basis, lin, static_cast<int>(ci));
      const Cell& cell = mesh.cells[ci];
      for (auto [a, b] : {std::pair{0.1, 0.2}, std::pair{0.8, 0.5}}) {
        const double x = cell.lower[0] + a * mesh.h, y = cell.lower[1] + b * mesh.h;
        CHECK(std::abs(g0(x, y)[0]) < 1e-11);
        CHECK(std::abs(g0(x, y)[1]) < 1e-11);
        CHECK(g1(x, y)[0] == doctest::Approx(-1.7).epsilon(1e-12));
        CHECK(g1(x, y)[1] == doctest::Approx(2.2).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("weak gradient of a continuous Q1 field matches the classical gradient moments") {
  const QuadMesh mesh = build_mesh(2);
  const LocalBasis basis(1);
  auto f = [](double x, double y) { return std::sin(2 * x) + x * y * y; };
  // nodal interpolation is continuous across cells
  std::vector<double> v(mesh.num_cells() * 4);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c)
    for (int j = 0; j < 4; ++j) {
      const auto p = node_xy(1, j);
      v[c * 4 + j] = f(mesh.cells[c].lower[0] + p[0] * mesh.h, mesh.cells[c].lower[1] + p[1] * mesh.h);
    }
  const LocalBasis fine(1, 6, 6);
  for (std::size_t ci = 0; ci < mesh.num_cells(); ++ci) {
    const Cell& cell = mesh.cells[ci];
    bool interior = true;
    for (int nb : cell.neighbor) interior = interior && nb >= 0;
    if (!interior) continue;
    const WeakGradient g = weak_gradient(mesh, basis, v, static_cast<int>(ci));
    std::array<double, 2> mean{0.0, 0.0};
    const auto vc = cell_coeffs(v, static_cast<int>(ci), 4);
    for (std::size_t p = 0; p < fine.quadrature().points.size(); ++p)
      for (int j = 0; j < 4; ++j) {
        mean[0] += fine.quadrature().weights[p] * vc[j] * fine.dxi()(p, j) / mesh.h;
        mean[1] += fine.quadrature().weights[p] * vc[j] * fine.deta()(p, j) / mesh.h;
      }
    const auto gv = g(cell.lower[0], cell.lower[1]);
    CHECK(gv[0] == doctest::Approx(mean[0]).epsilon(1e-12));
    CHECK(gv[1] == doctest::Approx(mean[1]).epsilon(1e-12));
  }
}

TEST_CASE("weak divergence identity") {
  const QuadMesh mesh = build_mesh(1);
  for (int k = 1; k <= 2; ++k) {
    const LocalBasis basis(k);
    const LocalBasis fine(k, k + 5, k + 5);
    const auto& fq = fine.quadrature();
    const int nd = basis.dofs();
    const auto v = random_field(mesh, nd, 7 + k);
    for (double th : {0.0, 0.7, 2.4, 4.0}) {
      const Direction s = Direction::on_circle(th);
      for (std::size_t ci = 0; ci < mesh.num_cells(); ++ci) {
        const int c = static_cast<int>(ci);
        const Cell& cell = mesh.cells[ci];
        const double h = mesh.h;
        const ElementVector div = weak_divergence(mesh, basis, v, c, s);
        const auto vc = cell_coeffs(v, c, nd);
        for (int i = 0; i < nd; ++i) {
          double lhs = 0.0, rhs = 0.0;
          for (std::size_t p = 0; p < fq.points.size(); ++p) {
            const auto [xi, eta] = fq.points[p];
            const double w = fq.weights[p] * h * h;
            const auto gr = fine.ref_gradient(i, xi, eta);
            lhs += w * poly(fine, std::span<const double>(div.data(), nd), xi, eta) * fine.value(i, xi, eta);
            rhs -= w * poly(fine, vc, xi, eta) * (s.x() * gr[0] + s.y() * gr[1]) / h;
          }
          for (int f = 0; f < 4; ++f) {
            const int nb = cell.neighbor[f];
            for (std::size_t p = 0; p < fq.edge.points.size(); ++p) {
              const auto r = ElementQuadrature::face_point(f, fq.edge.points[p]);
              double avg = poly(fine, vc, r[0], r[1]);
              if (nb >= 0) {
                const auto ro = ElementQuadrature::face_point(opposite_face(f), fq.edge.points[p]);
                avg = 0.5 * (avg + poly(fine, cell_coeffs(v, nb, nd), ro[0], ro[1]));
              }
              rhs += fq.edge.weights[p] * h * avg * face_flux(s, f) * fine.value(i, r[0], r[1]);
            }
          }
          CHECK(std::abs(lhs - rhs) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("weak convection blocks") {
  const QuadMesh mesh = build_mesh(1);
  const Direction s = Direction::on_circle(1.1);
  for (int k = 1; k <= 2; ++k) {
    const LocalBasis basis(k);
    const int nd = basis.dofs();
    auto form = [&](const std::vector<double>& v, const std::vector<double>& w) {
      double total = 0.0;
      for (std::size_t ci = 0; ci < mesh.num_cells(); ++ci) {
        const int c = static_cast<int>(ci);
        const auto blocks = weak_convection_matrix(mesh, basis, c, s);
        Eigen::Map<const Eigen::VectorXd> vc(v.data() + c * nd, nd), wc(w.data() + c * nd, nd);
        Eigen::VectorXd r = blocks.self * vc;
        for (int f = 0; f < 4; ++f) {
          const int nb = mesh.cells[c].neighbor[f];
          CHECK(blocks.neighbor[f].has_value() == (nb >= 0));
          if (nb >= 0) r += *blocks.neighbor[f] * Eigen::Map<const Eigen::VectorXd>(v.data() + nb * nd, nd);
        }
        total += wc.dot(r);
      }
      return total;
    };

    SUBCASE("constants give zero") {
      const std::vector<double> ones(mesh.num_cells() * nd, 1.0);
      CHECK(std::abs(form(ones, ones)) < 1e-14);
    }
    SUBCASE("continuous polynomial reduces to (s.grad v, w)") {
      auto vf = [](double x, double y) { return 1 + x - 2 * y + 3 * x * y; };
      const auto v = l2_project(mesh, basis, vf);
      const auto w = random_field(mesh, nd, 3);
      const LocalBasis fine(k, k + 4, k + 4);
      double ref = 0.0;
      for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        const Cell& cell = mesh.cells[c];
        for (std::size_t p = 0; p < fine.quadrature().points.size(); ++p) {
          const auto [xi, eta] = fine.quadrature().points[p];
          const double x = cell.lower[0] + xi * mesh.h, y = cell.lower[1] + eta * mesh.h;
          const double sg = s.x() * (1 + 3 * y) + s.y() * (-2 + 3 * x);
          ref += fine.quadrature().weights[p] * mesh.h * mesh.h * sg *
                 poly(fine, cell_coeffs(w, static_cast<int>(c), nd), xi, eta);
        }
      }
      CHECK(std::abs(form(v, w) - ref) < 1e-12);
    }
    SUBCASE("random fields, term by term") {
      const auto v = random_field(mesh, nd, 21);
      const auto w = random_field(mesh, nd, 22);
      const LocalBasis fine(k, k + 4, k + 4);
      const auto& fq = fine.quadrature();
      double ref = 0.0;
      for (std::size_t ci = 0; ci < mesh.num_cells(); ++ci) {
        const int c = static_cast<int>(ci);
        const auto vc = cell_coeffs(v, c, nd), wc = cell_coeffs(w, c, nd);
        for (std::size_t p = 0; p < fq.points.size(); ++p) {
          const auto [xi, eta] = fq.points[p];
          double sgw = 0.0;
          for (int j = 0; j < nd; ++j) {
            const auto g = fine.ref_gradient(j, xi, eta);
            sgw += wc[j] * (s.x() * g[0] + s.y() * g[1]) / mesh.h;
          }
          ref -= fq.weights[p] * mesh.h * mesh.h * poly(fine, vc, xi, eta) * sgw;
        }
      }
      // edge terms, visiting each edge once and both of its sides
      for (const Edge& e : mesh.edges) {
        for (int side = 0; side < (e.interior() ? 2 : 1); ++side) {
          const int c = e.cells[side], f = e.local_face[side];
          const int o = e.interior() ? e.cells[1 - side] : -1;
          for (std::size_t p = 0; p < fq.edge.points.size(); ++p) {
            const auto r = ElementQuadrature::face_point(f, fq.edge.points[p]);
            double avg = poly(fine, cell_coeffs(v, c, nd), r[0], r[1]);
            if (o >= 0) {
              const auto ro = ElementQuadrature::face_point(opposite_face(f), fq.edge.points[p]);
              avg = 0.5 * (avg + poly(fine, cell_coeffs(v, o, nd), ro[0], ro[1]));
            }
            ref += fq.edge.weights[p] * e.length() * avg * face_flux(s, f) *
                   poly(fine, cell_coeffs(w, c, nd), r[0], r[1]);
          }
        }
      }
      CHECK(std::abs(form(v, w) - ref) < 1e-12);
    }
  }
}

TEST_CASE("L2 projection") {
  const QuadMesh mesh = build_mesh(2);
  SUBCASE("Q_k functions are reproduced") {
    for (int k = 1; k <= 2; ++k) {
      const LocalBasis basis(k);
      auto f = [k](double x, double y) { return k == 1 ? 2 - x + 3 * x * y : 1 + x * x * y * y - 2 * x * y * y; };
      for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        const ElementVector p = l2_project(mesh.cells[c], basis, f);
        for (int j = 0; j < basis.dofs(); ++j) {
          const auto r = node_xy(k, j);
          CHECK(p[j] ==
                doctest::Approx(f(mesh.cells[c].lower[0] + r[0] * mesh.h, mesh.cells[c].lower[1] + r[1] * mesh.h))
                    .epsilon(1e-12));
        }
      }
    }
  }
  SUBCASE("zero") {
    const auto z = l2_project(mesh, LocalBasis(2), [](double, double) { return 0.0; });
    for (double x : z) CHECK(x == 0.0);
  }
  SUBCASE("Q1 projection error of sin sin decays like h^2") {
    auto f = [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); };
    std::vector<double> err;
    for (int level = 3; level <= 6; ++level) {
      const QuadMesh m = build_mesh(level);
      const LocalBasis basis(1), fine(1, 6, 6);
      const auto v = l2_project(m, basis, f);
      double e2 = 0.0;
      for (std::size_t c = 0; c < m.num_cells(); ++c)
        for (std::size_t p = 0; p < fine.quadrature().points.size(); ++p) {
          const auto [xi, eta] = fine.quadrature().points[p];
          const double d = f(m.cells[c].lower[0] + xi * m.h, m.cells[c].lower[1] + eta * m.h) -
                           poly(fine, cell_coeffs(v, static_cast<int>(c), 4), xi, eta);
          e2 += fine.quadrature().weights[p] * m.h * m.h * d * d;
        }
      err.push_back(std::sqrt(e2));
    }
    for (std::size_t i = 1; i < err.size(); ++i) CHECK(std::log2(err[i - 1] / err[i]) == doctest::Approx(2.0).epsilon(0.03));
  }
  SUBCASE("eval_in_cell") {
    const LocalBasis basis(2);
    const auto v = l2_project(mesh, basis, [](double x, double y) { return x * x + y; });
    CHECK(eval_in_cell(mesh, basis, v, 5, 0.3, 0.4) == doctest::Approx(0.09 + 0.4).epsilon(1e-12));
  }
}
