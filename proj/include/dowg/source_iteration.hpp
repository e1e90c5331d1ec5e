#pragma once

#include <iosfwd>
#include <vector>

#include "dowg/assembly.hpp"
#include "dowg/linear_solver.hpp"

namespace dowg {

enum class AngleOrdering { Jacobi, GaussSeidel };

struct SourceIterationConfig {
  double tol = 1e-3;
  int max_outer = 200;
  AngleOrdering ordering = AngleOrdering::Jacobi;

  void validate() const;
};

struct IterationTrace {
  std::vector<double> errs;  // err of outer step i+1 at index i
  int iterations = 0;
  bool converged = false;
  int linear_iterations = 0;  // summed over all direction solves

  /// "iteration,err" rows.
  void write_csv(std::ostream& out) const;
};

struct SourceIterationResult {
  RadianceField field;
  IterationTrace trace;
};

/// Outer fixed-point loop on the lagged scattering source, starting from the
/// zero field. err is the weighted broken L2 norm of the update. An outer
/// loop that hits max_outer returns the last iterate with converged = false;
/// linear solver failures propagate as SolverError.
SourceIterationResult source_iteration(const std::vector<DirectionSystem>& systems, const Discretization& disc,
                                       const SourceIterationConfig& cfg, const LinearSolveConfig& linear = {});

/// sigma_s * sum_l w_l Phi[m][l] u^l as coefficient vectors, for every m.
RadianceField scattering_source(const Discretization& disc, const RadianceField& u);

}  // namespace dowg
