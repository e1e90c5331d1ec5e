#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

#include "dowg/sparse.hpp"

namespace dowg {

/// Auto picks SparseDirect for the weak Galerkin systems and Krylov with the
/// sweep preconditioner for the upwind-type schemes.
enum class SolveMethod { Krylov, DenseDirect, SparseDirect, Auto };
enum class PreconditionerKind { None, BlockJacobi, SweepGaussSeidel };

struct LinearSolveConfig {
  SolveMethod method = SolveMethod::Krylov;
  PreconditionerKind preconditioner = PreconditionerKind::BlockJacobi;
  double rel_tol = 1e-10;
  int max_iterations = 2000;
  int restart = 60;

  void validate() const;
};

/// Dense diagonal blocks of a matrix whose unknowns come in contiguous
/// groups of `block_size` (one group per mesh cell). `order` is the sweep
/// order of the groups used by the Gauss-Seidel variant.
struct BlockStructure {
  int block_size = 1;
  std::vector<int> order;
};

/// Block-Jacobi or sweep-ordered block Gauss-Seidel preconditioner. The
/// block inverses are computed once.
class BlockPreconditioner {
 public:
  BlockPreconditioner(const SparseMatrix& A, BlockStructure structure, PreconditionerKind kind);

  void apply(std::span<const double> r, std::span<double> z) const;
  PreconditionerKind kind() const { return kind_; }

 private:
  const SparseMatrix* A_;
  BlockStructure structure_;
  PreconditionerKind kind_;
  std::vector<int> rank_;  // position of each block in the sweep order
  std::vector<Eigen::MatrixXd> inverse_;
};

struct LinearSolveResult {
  std::vector<double> x;
  int iterations = 0;
  double rel_residual = 0.0;
};

/// Solves A x = b to ||Ax - b|| <= rel_tol ||b||. Krylov is restarted GMRES
/// with right preconditioning. Throws SolverError on non-convergence and
/// std::invalid_argument on dimension mismatch.
LinearSolveResult linear_solve(const SparseMatrix& A, std::span<const double> b, const LinearSolveConfig& cfg,
                               const BlockPreconditioner* preconditioner = nullptr,
                               std::optional<std::span<const double>> x0 = std::nullopt);

/// Sparse LU factorization (UMFPACK) kept for repeated solves with A or A^T.
class SparseLuFactor {
 public:
  explicit SparseLuFactor(const SparseMatrix& A);
  ~SparseLuFactor();
  SparseLuFactor(const SparseLuFactor&) = delete;
  SparseLuFactor& operator=(const SparseLuFactor&) = delete;

  /// Solves A x = b, or A^T x = b when `transpose` is set.
  void solve(std::span<const double> b, std::span<double> x, bool transpose = false) const;
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  std::vector<int> ptr_, idx_;
  std::vector<double> val_;
  void* numeric_ = nullptr;
};

/// Largest dense system the direct fallback accepts.
inline constexpr std::size_t kDenseDirectLimit = 5000;

/// Pivot diagnostics of a dense LU factorization with partial pivoting.
struct DenseFactorReport {
  double min_pivot_ratio = 0.0;  // min |U_ii| / max |U_ii|
  bool nonsingular = false;      // ratio above 1e-12
};

DenseFactorReport dense_factor_report(const SparseMatrix& A);

/// Number of worker threads for direction solves: DOWG_THREADS if set,
/// otherwise the hardware concurrency.
unsigned worker_threads();

}  // namespace dowg
