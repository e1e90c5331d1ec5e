#pragma once

#include <array>
#include <span>
#include <variant>
#include <vector>

namespace dowg {

/// A unit direction on the circle (2D) or sphere (3D generator only).
///
/// For circle nodes `polar` holds the parameter angle theta and `unit` is
/// (cos theta, sin theta, 0). For sphere nodes `polar` is the polar angle
/// and `azimuth` the azimuthal one.
struct Direction {
  double polar = 0.0;
  double azimuth = 0.0;
  std::array<double, 3> unit{1.0, 0.0, 0.0};

  double x() const { return unit[0]; }
  double y() const { return unit[1]; }
  double theta() const { return polar; }

  static Direction on_circle(double theta);
  static Direction on_sphere(double polar, double azimuth);
};

enum class QuadratureMode { CircleTrapezoid, SphereGauss };

struct AngularQuadrature {
  QuadratureMode mode = QuadratureMode::CircleTrapezoid;
  std::vector<Direction> nodes;
  std::vector<double> weights;
  int M = 0;             // circle: last node index; sphere: Gauss order m
  double h_theta = 0.0;  // circle only

  std::size_t size() const { return nodes.size(); }
  double weight_sum() const;
};

/// Composite trapezoid rule on [0, 2pi] with M+1 nodes theta_m = m*2pi/M.
/// The endpoints 0 and 2pi are kept as separate ordinates with half weights.
AngularQuadrature build_circle_trapezoid(int M);

/// Product rule on the unit sphere: m Gauss-Legendre nodes in cos(polar)
/// times 2m equispaced azimuths with spacing pi/m.
AngularQuadrature build_sphere_gauss(int m);

struct HenyeyGreenstein {
  double eta = 0.5;
  int dim = 2;
};
struct LinearAnisotropic {};
struct Isotropic {
  int dim = 2;
};

using PhaseFunction = std::variant<HenyeyGreenstein, LinearAnisotropic, Isotropic>;

/// Throws std::invalid_argument for eta outside (-1, 1) or a bad dimension.
void validate_phase(const PhaseFunction& phase);

/// Phase function value at the scattering cosine t.
double eval_phase(const PhaseFunction& phase, double t);

/// Discrete scattering operator Phi(s_m . s_l) over a quadrature node set.
struct ScatterKernel {
  std::size_t n = 0;
  std::vector<double> matrix;    // row-major n x n
  std::vector<double> row_mass;  // b_m = sum_l w_l Phi[m][l]
  double sigma_t = 0.0;
  double sigma_s = 0.0;
  double positivity_margin = 0.0;  // sigma_t - sigma_s * max_m b_m
  bool renormalized = false;

  double operator()(std::size_t m, std::size_t l) const { return matrix[m * n + l]; }
  double max_row_mass() const;
};

/// Builds the kernel and its diagnostics. The margin is recorded even when it
/// is not positive; solvers reject such kernels. With `renormalize` each row is
/// divided by its mass so that b_m = 1.
ScatterKernel build_scatter_kernel(const AngularQuadrature& quad, const PhaseFunction& phase,
                                   double sigma_t, double sigma_s, bool renormalize = false);

/// out[m] = sum_l w_l Phi[m][l] values[l]
std::vector<double> apply_scatter(const ScatterKernel& kernel, const AngularQuadrature& quad,
                                  std::span<const double> values);

/// |1 - b_m| per ordinate.
std::vector<double> normalization_residual(const ScatterKernel& kernel);

}  // namespace dowg
