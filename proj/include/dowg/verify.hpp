#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dowg/assembly.hpp"
#include "dowg/source_iteration.hpp"

namespace dowg {

using AngularFunction = std::function<double(double x, double y, double theta)>;

/// A closed-form solution of the transport problem with its scattering
/// integral and the matching source.
struct ManufacturedCase {
  std::string name;
  Medium medium;
  PhaseFunction phase;
  AngularFunction exact;
  AngularFunction exact_scatter;  // continuous (K u)(x, y, theta)
  AngularFunction source;         // s.grad u + sigma_t u - sigma_s K u
  double c = 0.0;                 // angular amplitude (example2 only)

  ProblemData data() const;
};

/// "example1": u = sin(pi x) sin(pi y), Henyey-Greenstein(eta), K u = u.
/// "example2": u = exp(-x/2 - y/2) (1 + c cos theta), c = 1 / (1 + 6 sigma_s),
/// linear anisotropic phase. Throws ValidationError for any other name.
ManufacturedCase build_case(const std::string& name, Medium medium = {}, double eta = 0.5);

/// Coefficients of the elementwise L2 projection of the exact solution.
RadianceField project_case(const Discretization& disc, const ManufacturedCase& mc);

struct ErrorNorms {
  double l2_dom = 0.0;
  double triple = 0.0;
};

/// Error e^m = u(., theta_m) - u_h^m measured with a Gauss rule of degree
/// 2k+5 per cell (k+3 points per direction).
ErrorNorms measure_error(const Discretization& disc, const RadianceField& field, const ManufacturedCase& mc);

/// Outer tolerance used by convergence runs: min(1e-3, 1e-5 h^(k+1/2)),
/// never below 1e-11. The factor leaves room for solutions whose error sits
/// far below h^(k+1/2), as in example2.
double study_outer_tolerance(double h, int k);

struct StudyConfig {
  std::string case_name = "example1";
  SchemeKind scheme;
  int k = 1;
  std::vector<int> levels{3, 4, 5, 6, 7};
  int M = 20;
  Medium medium;
  double eta = 0.5;
  bool renormalize_kernel = false;
  std::optional<double> outer_tol;  // unset: study_outer_tolerance per level
  int max_outer = 200;
  AngleOrdering ordering = AngleOrdering::Jacobi;
  LinearSolveConfig linear{SolveMethod::Auto};

  void validate() const;
};

struct LevelRow {
  int level = 0;
  int inv_h = 0;
  double error = 0.0;         // weighted broken L2 error
  double triple_error = 0.0;  // scheme norm of the error
  std::optional<double> eoc;
  int outer_iterations = 0;
  bool outer_converged = false;
  double seconds = 0.0;
};

struct ConvergenceReport {
  std::string case_name;
  SchemeKind scheme;
  int k = 1;
  int M = 20;
  std::vector<LevelRow> rows;

  /// Fills eoc from successive rows: log(e_i / e_{i+1}) / log(h_i / h_{i+1}).
  void compute_eoc();
};

/// Solution of one level: assembly plus source iteration.
struct LevelSolution {
  Discretization disc;
  SourceIterationResult result;
};

LevelSolution solve_level(const StudyConfig& cfg, const ManufacturedCase& mc, int level);

/// Solver failures are rethrown as SolverError naming the level.
ConvergenceReport run_convergence(const StudyConfig& cfg);

/// WG, DODG(cp) and DODSD(sd_c) on the same levels; cp and sd_c are taken
/// from cfg.scheme.
std::vector<ConvergenceReport> run_comparison(const StudyConfig& cfg);

struct AngularRow {
  int M = 0;
  double error = 0.0;
};

struct AngularStudy {
  std::string case_name;
  SchemeKind scheme;
  int k = 1;
  int level = 0;
  std::vector<AngularRow> rows;
  bool monotone = false;  // non-increasing in M up to the outer tolerance
};

/// Outer tolerance of angular studies unless one is given.
inline constexpr double kAngularStudyTol = 1e-12;

/// Error against M at a fixed level. `monotone` allows increases up to the
/// outer tolerance.
AngularStudy run_angular_study(const StudyConfig& cfg, int level, const std::vector<int>& Ms);

}  // namespace dowg
