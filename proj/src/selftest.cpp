#include "dowg/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "dowg/assembly.hpp"
#include "dowg/gauss.hpp"

namespace dowg {

namespace {

std::string sci(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

SelftestCheck run_check(const std::string& name, const std::function<std::string(bool&)>& body) {
  SelftestCheck c{name, false, ""};
  try {
    c.detail = body(c.passed);
  } catch (const std::exception& e) {
    c.passed = false;
    c.detail = std::string("exception: ") + e.what();
  }
  return c;
}

std::string check_trapezoid(bool& ok) {
  const auto q = build_circle_trapezoid(20);
  double w = 0.0, c2 = 0.0;
  for (std::size_t m = 0; m < q.size(); ++m) {
    w += q.weights[m];
    c2 += q.weights[m] * q.nodes[m].x() * q.nodes[m].x();
  }
  const double err = std::max(std::abs(w - 2 * std::numbers::pi), std::abs(c2 - std::numbers::pi));
  ok = err < 1e-12;
  return "max deviation " + sci(err);
}

std::string check_gauss(bool& ok) {
  // n points integrate x^(2n-1) exactly on [0,1]
  double worst = 0.0;
  for (int n = 1; n <= 6; ++n) {
    const Rule1D r = gauss_legendre_unit(n);
    double s = 0.0;
    for (std::size_t i = 0; i < r.points.size(); ++i) s += r.weights[i] * std::pow(r.points[i], 2 * n - 1);
    worst = std::max(worst, std::abs(s - 1.0 / (2 * n)));
  }
  ok = worst < 1e-14;
  return "max error " + sci(worst);
}

std::string check_kernel(bool& ok) {
  const auto q = build_circle_trapezoid(20);
  double worst = 0.0;
  for (const PhaseFunction p : {PhaseFunction{Isotropic{}}, PhaseFunction{LinearAnisotropic{}}}) {
    const auto k = build_scatter_kernel(q, p, 2.0, 0.5);
    for (double r : normalization_residual(k)) worst = std::max(worst, std::abs(r));
  }
  ok = worst < 1e-12;
  return "max |b_m - 1| " + sci(worst);
}

std::string check_weak_gradient(bool& ok) {
  const QuadMesh mesh = build_mesh(2);
  double worst = 0.0;
  for (int k = 1; k <= 2; ++k) {
    const LocalBasis basis(k);
    const auto v = l2_project(mesh, basis, [](double x, double y) { return 1.0 + 2.0 * x - 3.0 * y; });
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
      const WeakGradient g = weak_gradient(mesh, basis, v, static_cast<int>(c));
      const Cell& cell = mesh.cells[c];
      const auto val = g(0.5 * (cell.lower[0] + cell.upper[0]), 0.5 * (cell.lower[1] + cell.upper[1]));
      worst = std::max({worst, std::abs(val[0] - 2.0), std::abs(val[1] + 3.0)});
    }
  }
  ok = worst < 1e-12;
  return "max deviation from (2, -3): " + sci(worst);
}

std::string check_weak_divergence(bool& ok) {
  const QuadMesh mesh = build_mesh(1);
  const int k = 2;
  const LocalBasis basis(k);
  const LocalBasis fine(k, k + 4, k + 4);
  const auto& fq = fine.quadrature();
  const int nd = basis.dofs();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> v(mesh.num_cells() * nd);
  for (double& x : v) x = U(rng);
  const Direction s = Direction::on_circle(0.7);
  double worst = 0.0;
  for (std::size_t ci = 0; ci < mesh.num_cells(); ++ci) {
    const int c = static_cast<int>(ci);
    const Cell& cell = mesh.cells[ci];
    const double hx = cell.upper[0] - cell.lower[0], hy = cell.upper[1] - cell.lower[1];
    const ElementVector div = weak_divergence(mesh, basis, v, c, s);
    const auto vc = cell_coeffs(v, c, nd);
    for (int i = 0; i < nd; ++i) {
      double lhs = 0.0, rhs = 0.0;
      for (std::size_t q = 0; q < fq.points.size(); ++q) {
        const auto [xi, eta] = fq.points[q];
        double dv = 0.0, vv = 0.0;
        for (int j = 0; j < nd; ++j) {
          dv += div[j] * fine.value(j, xi, eta);
          vv += vc[j] * fine.value(j, xi, eta);
        }
        const auto g = fine.ref_gradient(i, xi, eta);
        const double w = fq.weights[q] * hx * hy;
        lhs += w * dv * fine.value(i, xi, eta);
        rhs -= w * vv * (s.x() * g[0] / hx + s.y() * g[1] / hy);
      }
      for (int f = 0; f < 4; ++f) {
        const int nb = cell.neighbor[f];
        const double sn = face_flux(s, f);
        const double len = (f < 2) ? hy : hx;
        for (std::size_t q = 0; q < fq.edge.points.size(); ++q) {
          const auto p = ElementQuadrature::face_point(f, fq.edge.points[q]);
          double own = 0.0, other = 0.0;
          for (int j = 0; j < nd; ++j) own += vc[j] * fine.value(j, p[0], p[1]);
          double avg = own;
          if (nb >= 0) {
            const auto po = ElementQuadrature::face_point(opposite_face(f), fq.edge.points[q]);
            const auto vn = cell_coeffs(v, nb, nd);
            for (int j = 0; j < nd; ++j) other += vn[j] * fine.value(j, po[0], po[1]);
            avg = 0.5 * (own + other);
          }
          rhs += fq.edge.weights[q] * len * avg * sn * fine.value(i, p[0], p[1]);
        }
      }
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  ok = worst < 1e-12;
  return "max identity residual " + sci(worst);
}

std::string check_coercivity(bool& ok) {
  const Medium medium{2.0, 0.5};
  const auto quad = build_circle_trapezoid(20);
  const Discretization disc = make_discretization(2, 1, quad, HenyeyGreenstein{0.5, 2}, medium);
  const double alpha = std::min(disc.kernel.positivity_margin, 0.5);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double worst = 1e300;
  for (int sample = 0; sample < 21; ++sample) {
    RadianceField v = RadianceField::zeros(disc.num_ordinates(), disc.ndof());
    for (auto& o : v.ordinates)
      for (double& x : o) x = sample == 0 ? 1.0 : U(rng);
    const double a = eval_bilinear(disc, SchemeKind::wg(), v, v);
    const double n = triple_norm(disc, v);
    worst = std::min(worst, a / (n * n));
  }
  ok = worst >= alpha * (1.0 - 1e-10);
  return "min A(v,v)/|||v|||^2 = " + sci(worst) + ", alpha = " + sci(alpha);
}

std::string check_constant_solution(bool& ok) {
  // sigma_s = 0 and u = 1: f = sigma_t, u_in = 1. M = 8 includes the four
  // axis directions, whose tangential boundary edges must stay outflow.
  const Medium medium{2.0, 0.0};
  const auto quad = build_circle_trapezoid(8);
  const Discretization disc = make_discretization(2, 1, quad, Isotropic{}, medium);
  const ProblemData data{[](double, double, const Direction&) { return 2.0; },
                         [](double, double, const Direction&) { return 1.0; }};
  double worst = 0.0;
  int misclassified = 0;
  for (const SchemeKind scheme : {SchemeKind::wg(), SchemeKind::dodg(0.1), SchemeKind::dodsd(1.0)}) {
    for (std::size_t m = 0; m < disc.num_ordinates(); ++m) {
      const DirectionSystem sys = assemble(disc, scheme, data, static_cast<int>(m));
      const std::vector<double> ones(disc.ndof(), 1.0);
      const std::vector<double> r = sys.matrix * std::span<const double>(ones);
      double scale = 1.0;
      for (double b : sys.rhs) scale = std::max(scale, std::abs(b));
      for (std::size_t i = 0; i < r.size(); ++i) worst = std::max(worst, std::abs(r[i] - sys.rhs[i]) / scale);
    }
  }
  for (std::size_t m = 0; m < disc.num_ordinates(); ++m) {
    const Direction& s = disc.quad.nodes[m];
    const auto sets = classify_edges(disc.mesh, s);
    std::size_t strict = 0;
    for (const Edge& e : disc.mesh.edges)
      if (!e.interior() && s.x() * e.normal[0] + s.y() * e.normal[1] < 0.0) ++strict;
    if (sets.inflow_boundary.size() != strict) ++misclassified;
  }
  ok = worst <= 1e-10 && misclassified == 0;
  return "max scaled residual " + sci(worst) + ", directions with wrong inflow boundary: " +
         std::to_string(misclassified);
}

}  // namespace

std::vector<SelftestCheck> run_selftest() {
  return {
      run_check("trapezoid rule weights", check_trapezoid),
      run_check("Gauss-Legendre exactness", check_gauss),
      run_check("kernel row normalization", check_kernel),
      run_check("weak gradient of a linear field", check_weak_gradient),
      run_check("weak divergence identity", check_weak_divergence),
      run_check("coercivity sample", check_coercivity),
      run_check("constant-solution residual", check_constant_solution),
  };
}

bool print_selftest(std::ostream& out, const std::vector<SelftestCheck>& checks) {
  bool all = true;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    all = all && c.passed;
  }
  return all;
}

}  // namespace dowg
