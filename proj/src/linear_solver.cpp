#include "dowg/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

#include <umfpack.h>

#include "dowg/errors.hpp"

namespace dowg {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

void LinearSolveConfig::validate() const {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw ValidationError("linear tolerance must lie in (0, 1)");
  if (max_iterations < 1) throw ValidationError("linear max iterations must be >= 1");
  if (restart < 1) throw ValidationError("GMRES restart length must be >= 1");
}

BlockPreconditioner::BlockPreconditioner(const SparseMatrix& A, BlockStructure structure, PreconditionerKind kind)
    : A_(&A), structure_(std::move(structure)), kind_(kind) {
  const int bs = structure_.block_size;
  if (bs < 1 || A.size() % static_cast<std::size_t>(bs) != 0)
    throw std::invalid_argument("BlockPreconditioner: block size does not divide the matrix dimension");
  const std::size_t nblocks = A.size() / bs;
  if (structure_.order.empty()) {
    structure_.order.resize(nblocks);
    std::iota(structure_.order.begin(), structure_.order.end(), 0);
  }
  if (structure_.order.size() != nblocks) throw std::invalid_argument("BlockPreconditioner: sweep order has wrong length");
  rank_.assign(nblocks, 0);
  for (std::size_t p = 0; p < nblocks; ++p) rank_[structure_.order[p]] = static_cast<int>(p);

  if (kind_ == PreconditionerKind::None) return;
  inverse_.resize(nblocks);
  const auto& rp = A.row_ptr();
  const auto& col = A.col();
  const auto& val = A.values();
  for (std::size_t blk = 0; blk < nblocks; ++blk) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(bs, bs);
    const std::size_t base = blk * bs;
    for (int a = 0; a < bs; ++a)
      for (std::size_t p = rp[base + a]; p < rp[base + a + 1]; ++p)
        if (col[p] >= base && col[p] < base + bs) D(a, static_cast<Eigen::Index>(col[p] - base)) = val[p];
    inverse_[blk] = D.partialPivLu().inverse();
  }
}

void BlockPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  const int bs = structure_.block_size;
  if (kind_ == PreconditionerKind::None) {
    std::copy(r.begin(), r.end(), z.begin());
    return;
  }
  Eigen::VectorXd local(bs);
  if (kind_ == PreconditionerKind::BlockJacobi) {
    for (std::size_t blk = 0; blk < inverse_.size(); ++blk) {
      const std::size_t base = blk * bs;
      for (int a = 0; a < bs; ++a) local[a] = r[base + a];
      const Eigen::VectorXd y = inverse_[blk] * local;
      for (int a = 0; a < bs; ++a) z[base + a] = y[a];
    }
    return;
  }
  // Forward block Gauss-Seidel in sweep order: only already visited blocks
  // contribute to the right side of the current one.
  const auto& rp = A_->row_ptr();
  const auto& col = A_->col();
  const auto& val = A_->values();
  for (int blk : structure_.order) {
    const std::size_t base = static_cast<std::size_t>(blk) * bs;
    const int my_rank = rank_[blk];
    for (int a = 0; a < bs; ++a) {
      double acc = r[base + a];
      for (std::size_t p = rp[base + a]; p < rp[base + a + 1]; ++p) {
        const std::size_t other = col[p] / bs;
        if (rank_[other] < my_rank) acc -= val[p] * z[col[p]];
      }
      local[a] = acc;
    }
    const Eigen::VectorXd y = inverse_[blk] * local;
    for (int a = 0; a < bs; ++a) z[base + a] = y[a];
  }
}

namespace {

LinearSolveResult dense_solve(const SparseMatrix& A, std::span<const double> b) {
  if (A.size() > kDenseDirectLimit)
    throw std::invalid_argument("dense-direct solve limited to N <= " + std::to_string(kDenseDirectLimit));
  const Eigen::MatrixXd D = A.to_dense();
  const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
  const Eigen::VectorXd x = D.partialPivLu().solve(rhs);
  LinearSolveResult out;
  out.x.assign(x.data(), x.data() + x.size());
  const double bn = rhs.norm();
  out.rel_residual = bn > 0.0 ? (D * x - rhs).norm() / bn : (D * x).norm();
  out.iterations = 1;
  return out;
}

LinearSolveResult gmres(const SparseMatrix& A, std::span<const double> b, const LinearSolveConfig& cfg,
                        const BlockPreconditioner* pre, std::optional<std::span<const double>> x0) {
  const std::size_t n = A.size();
  LinearSolveResult out;
  out.x.assign(n, 0.0);
  if (x0) std::copy(x0->begin(), x0->end(), out.x.begin());

  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(out.x.begin(), out.x.end(), 0.0);
    return out;
  }
  const double target = cfg.rel_tol * bnorm;
  const int m = cfg.restart;

  std::vector<std::vector<double>> V(m + 1, std::vector<double>(n));
  std::vector<std::vector<double>> Z(m, std::vector<double>(n));
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
  std::vector<double> cs(m), sn(m), g(m + 1);
  std::vector<double> r(n), w(n);

  auto residual = [&]() {
    A.multiply(out.x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    return norm2(r);
  };

  double rnorm = residual();
  int total = 0;
  while (rnorm > target && total < cfg.max_iterations) {
    for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / rnorm;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = rnorm;
    H.setZero();
    int j = 0;
    for (; j < m && total < cfg.max_iterations; ++j, ++total) {
      if (pre) {
        pre->apply(V[j], Z[j]);
      } else {
        Z[j] = V[j];
      }
      A.multiply(Z[j], w);
      // modified Gram-Schmidt
      for (int i = 0; i <= j; ++i) {
        const double hij = dot(w, V[i]);
        H(i, j) = hij;
        for (std::size_t t = 0; t < n; ++t) w[t] -= hij * V[i][t];
      }
      const double hnext = norm2(w);
      H(j + 1, j) = hnext;
      if (hnext > 0.0)
        for (std::size_t t = 0; t < n; ++t) V[j + 1][t] = w[t] / hnext;
      for (int i = 0; i < j; ++i) {
        const double tmp = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = tmp;
      }
      const double denom = std::hypot(H(j, j), H(j + 1, j));
      cs[j] = denom > 0.0 ? H(j, j) / denom : 1.0;
      sn[j] = denom > 0.0 ? H(j + 1, j) / denom : 0.0;
      H(j, j) = denom;
      H(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      if (std::abs(g[j + 1]) <= target || hnext == 0.0) {
        ++j;
        ++total;
        break;
      }
    }
    // back substitution for the least-squares coefficients
    std::vector<double> y(j, 0.0);
    for (int i = j - 1; i >= 0; --i) {
      double acc = g[i];
      for (int t = i + 1; t < j; ++t) acc -= H(i, t) * y[t];
      y[i] = acc / H(i, i);
    }
    for (int i = 0; i < j; ++i)
      for (std::size_t t = 0; t < n; ++t) out.x[t] += y[i] * Z[i][t];
    rnorm = residual();
  }
  out.iterations = total;
  out.rel_residual = rnorm / bnorm;
  if (rnorm > target)
    throw SolverError("GMRES did not converge in " + std::to_string(total) +
                          " iterations (relative residual " + std::to_string(out.rel_residual) + ")",
                      out.rel_residual);
  return out;
}

LinearSolveResult sparse_direct_solve(const SparseMatrix& A, std::span<const double> b) {
  const SparseLuFactor lu(A);
  LinearSolveResult out;
  out.x.assign(A.size(), 0.0);
  lu.solve(b, out.x);
  std::vector<double> r = A * std::span<const double>(out.x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  const double bn = norm2(b);
  out.rel_residual = bn > 0.0 ? norm2(r) / bn : norm2(r);
  out.iterations = 1;
  return out;
}

}  // namespace

SparseLuFactor::SparseLuFactor(const SparseMatrix& A) : n_(A.size()) {
  if (A.nnz() > static_cast<std::size_t>(std::numeric_limits<int>::max()))
    throw std::invalid_argument("SparseLuFactor: matrix too large for 32-bit indices");
  // The CSR arrays of A are the CSC arrays of A^T; solves swap the roles.
  ptr_.assign(A.row_ptr().begin(), A.row_ptr().end());
  idx_.assign(A.col().begin(), A.col().end());
  val_ = A.values();
  const int n = static_cast<int>(n_);
  void* symbolic = nullptr;
  int status = umfpack_di_symbolic(n, n, ptr_.data(), idx_.data(), val_.data(), &symbolic, nullptr, nullptr);
  if (status != UMFPACK_OK) throw SolverError("sparse LU symbolic analysis failed (status " + std::to_string(status) + ")", 1.0);
  status = umfpack_di_numeric(ptr_.data(), idx_.data(), val_.data(), symbolic, &numeric_, nullptr, nullptr);
  umfpack_di_free_symbolic(&symbolic);
  if (status != UMFPACK_OK) {
    if (numeric_) umfpack_di_free_numeric(&numeric_);
    throw SolverError("sparse LU factorization failed (status " + std::to_string(status) + ")", 1.0);
  }
}

SparseLuFactor::~SparseLuFactor() {
  if (numeric_) umfpack_di_free_numeric(&numeric_);
}

void SparseLuFactor::solve(std::span<const double> b, std::span<double> x, bool transpose) const {
  if (b.size() != n_ || x.size() != n_) throw std::invalid_argument("SparseLuFactor::solve: dimension mismatch");
  const int sys = transpose ? UMFPACK_A : UMFPACK_At;
  const int status =
      umfpack_di_solve(sys, ptr_.data(), idx_.data(), val_.data(), x.data(), b.data(), numeric_, nullptr, nullptr);
  if (status != UMFPACK_OK) throw SolverError("sparse LU solve failed (status " + std::to_string(status) + ")", 1.0);
}

LinearSolveResult linear_solve(const SparseMatrix& A, std::span<const double> b, const LinearSolveConfig& cfg,
                               const BlockPreconditioner* preconditioner, std::optional<std::span<const double>> x0) {
  cfg.validate();
  if (b.size() != A.size()) throw std::invalid_argument("linear_solve: right side has wrong dimension");
  if (x0 && x0->size() != A.size()) throw std::invalid_argument("linear_solve: initial guess has wrong dimension");
  if (cfg.method == SolveMethod::DenseDirect) return dense_solve(A, b);
  if (cfg.method == SolveMethod::SparseDirect || cfg.method == SolveMethod::Auto) return sparse_direct_solve(A, b);
  return gmres(A, b, cfg, preconditioner, x0);
}

DenseFactorReport dense_factor_report(const SparseMatrix& A) {
  if (A.size() > kDenseDirectLimit)
    throw std::invalid_argument("dense_factor_report: limited to N <= " + std::to_string(kDenseDirectLimit));
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A.to_dense());
  const Eigen::VectorXd diag = lu.matrixLU().diagonal().cwiseAbs();
  DenseFactorReport rep;
  const double big = diag.maxCoeff();
  rep.min_pivot_ratio = big > 0.0 ? diag.minCoeff() / big : 0.0;
  rep.nonsingular = rep.min_pivot_ratio > 1e-12;
  return rep;
}

unsigned worker_threads() {
  if (const char* env = std::getenv("DOWG_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace dowg
