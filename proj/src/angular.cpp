#include "dowg/angular.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "dowg/gauss.hpp"

namespace dowg {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kCosineSlack = 1e-12;
}  // namespace

Direction Direction::on_circle(double theta) {
  Direction d;
  d.polar = theta;
  d.azimuth = 0.0;
  // Snap roundoff so axis-aligned ordinates hit s.n == 0 exactly.
  auto snap = [](double c) { return std::abs(c) < 1e-15 ? 0.0 : c; };
  d.unit = {snap(std::cos(theta)), snap(std::sin(theta)), 0.0};
  return d;
}

Direction Direction::on_sphere(double polar, double azimuth) {
  Direction d;
  d.polar = polar;
  d.azimuth = azimuth;
  const double st = std::sin(polar);
  d.unit = {st * std::cos(azimuth), st * std::sin(azimuth), std::cos(polar)};
  return d;
}

double AngularQuadrature::weight_sum() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

AngularQuadrature build_circle_trapezoid(int M) {
  if (M < 2) throw std::invalid_argument("build_circle_trapezoid: M must be >= 2, got " + std::to_string(M));
  AngularQuadrature q;
  q.mode = QuadratureMode::CircleTrapezoid;
  q.M = M;
  q.h_theta = 2.0 * kPi / M;
  q.nodes.reserve(M + 1);
  q.weights.reserve(M + 1);
  for (int m = 0; m <= M; ++m) {
    Direction d = Direction::on_circle(m * q.h_theta);
    q.nodes.push_back(d);
    q.weights.push_back((m == 0 || m == M) ? 0.5 * q.h_theta : q.h_theta);
  }
  // theta_M = 2pi must carry exactly the direction of theta_0.
  q.nodes.back().unit = q.nodes.front().unit;
  return q;
}

AngularQuadrature build_sphere_gauss(int m) {
  if (m < 1) throw std::invalid_argument("build_sphere_gauss: m must be >= 1, got " + std::to_string(m));
  const Rule1D gl = gauss_legendre(m);
  AngularQuadrature q;
  q.mode = QuadratureMode::SphereGauss;
  q.M = m;
  const double dpsi = kPi / m;
  for (int j = 0; j < 2 * m; ++j) {
    const double psi = (j + 0.5) * dpsi;
    for (int i = 0; i < m; ++i) {
      const double polar = std::acos(std::clamp(gl.points[i], -1.0, 1.0));
      q.nodes.push_back(Direction::on_sphere(polar, psi));
      q.weights.push_back(dpsi * gl.weights[i]);
    }
  }
  return q;
}

void validate_phase(const PhaseFunction& phase) {
  if (const auto* hg = std::get_if<HenyeyGreenstein>(&phase)) {
    if (!(hg->eta > -1.0 && hg->eta < 1.0))
      throw std::invalid_argument("Henyey-Greenstein anisotropy must lie in (-1, 1), got " + std::to_string(hg->eta));
    if (hg->dim != 2 && hg->dim != 3) throw std::invalid_argument("Henyey-Greenstein dimension must be 2 or 3");
  } else if (const auto* iso = std::get_if<Isotropic>(&phase)) {
    if (iso->dim != 2 && iso->dim != 3) throw std::invalid_argument("isotropic phase dimension must be 2 or 3");
  }
}

double eval_phase(const PhaseFunction& phase, double t) {
  if (!(t >= -1.0 - kCosineSlack && t <= 1.0 + kCosineSlack))
    throw std::invalid_argument("eval_phase: cosine outside [-1, 1]: " + std::to_string(t));
  t = std::clamp(t, -1.0, 1.0);
  return std::visit(
      [t](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, HenyeyGreenstein>) {
          const double eta = p.eta;
          const double denom = 1.0 + eta * eta - 2.0 * eta * t;
          const double norm = (p.dim == 2) ? 2.0 * kPi : 4.0 * kPi;
          return (1.0 - eta * eta) / (norm * denom * std::sqrt(denom));
        } else if constexpr (std::is_same_v<P, LinearAnisotropic>) {
          return (2.0 + t) / (4.0 * kPi);
        } else {
          return (p.dim == 2) ? 1.0 / (2.0 * kPi) : 1.0 / (4.0 * kPi);
        }
      },
      phase);
}

double ScatterKernel::max_row_mass() const {
  return row_mass.empty() ? 0.0 : *std::max_element(row_mass.begin(), row_mass.end());
}

ScatterKernel build_scatter_kernel(const AngularQuadrature& quad, const PhaseFunction& phase,
                                   double sigma_t, double sigma_s, bool renormalize) {
  validate_phase(phase);
  ScatterKernel k;
  k.n = quad.size();
  k.sigma_t = sigma_t;
  k.sigma_s = sigma_s;
  k.renormalized = renormalize;
  k.matrix.assign(k.n * k.n, 0.0);
  for (std::size_t m = 0; m < k.n; ++m) {
    for (std::size_t l = 0; l < k.n; ++l) {
      const auto& a = quad.nodes[m].unit;
      const auto& b = quad.nodes[l].unit;
      const double t = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
      k.matrix[m * k.n + l] = eval_phase(phase, std::clamp(t, -1.0, 1.0));
    }
  }
  k.row_mass.assign(k.n, 0.0);
  for (std::size_t m = 0; m < k.n; ++m) {
    double b = 0.0;
    for (std::size_t l = 0; l < k.n; ++l) b += quad.weights[l] * k(m, l);
    k.row_mass[m] = b;
  }
  if (renormalize) {
    for (std::size_t m = 0; m < k.n; ++m) {
      const double b = k.row_mass[m];
      for (std::size_t l = 0; l < k.n; ++l) k.matrix[m * k.n + l] /= b;
      double sum = 0.0;
      for (std::size_t l = 0; l < k.n; ++l) sum += quad.weights[l] * k(m, l);
      k.row_mass[m] = sum;
    }
  }
  k.positivity_margin = sigma_t - sigma_s * k.max_row_mass();
  return k;
}

std::vector<double> apply_scatter(const ScatterKernel& kernel, const AngularQuadrature& quad,
                                  std::span<const double> values) {
  if (values.size() != kernel.n || quad.size() != kernel.n)
    throw std::invalid_argument("apply_scatter: expected " + std::to_string(kernel.n) + " ordinate values, got " +
                                std::to_string(values.size()));
  std::vector<double> out(kernel.n, 0.0);
  for (std::size_t m = 0; m < kernel.n; ++m) {
    double acc = 0.0;
    for (std::size_t l = 0; l < kernel.n; ++l) acc += quad.weights[l] * kernel(m, l) * values[l];
    out[m] = acc;
  }
  return out;
}

std::vector<double> normalization_residual(const ScatterKernel& kernel) {
  std::vector<double> r(kernel.n);
  for (std::size_t m = 0; m < kernel.n; ++m) r[m] = std::abs(1.0 - kernel.row_mass[m]);
  return r;
}

}  // namespace dowg
