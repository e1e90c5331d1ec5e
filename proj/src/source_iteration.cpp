#include "dowg/source_iteration.hpp"

#include <atomic>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <memory>
#include <mutex>
#include <ostream>
#include <thread>

#include "dowg/errors.hpp"

namespace dowg {

void SourceIterationConfig::validate() const {
  if (!(tol > 0.0)) throw ValidationError("outer tolerance must be > 0");
  if (max_outer < 1) throw ValidationError("max outer iterations must be >= 1");
}

void IterationTrace::write_csv(std::ostream& out) const {
  out << "iteration,err\n";
  char buf[64];
  for (std::size_t i = 0; i < errs.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.6e\n", i + 1, errs[i]);
    out << buf;
  }
}

RadianceField scattering_source(const Discretization& disc, const RadianceField& u) {
  const std::size_t nord = disc.num_ordinates();
  const std::size_t n = disc.ndof();
  RadianceField q = RadianceField::zeros(nord, n);
  // Nodal basis: the kernel applied to the nodal values gives the nodal
  // values of K_d u, exactly, at every point of the cell.
  std::vector<double> vals(nord);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < nord; ++l) vals[l] = u[l][i];
    const auto ku = apply_scatter(disc.kernel, disc.quad, vals);
    for (std::size_t m = 0; m < nord; ++m) q[m][i] = disc.medium.sigma_s * ku[m];
  }
  return q;
}

namespace {

std::vector<double> scattering_source_one(const Discretization& disc, const RadianceField& u, std::size_t m) {
  const std::size_t n = disc.ndof();
  std::vector<double> q(n, 0.0);
  for (std::size_t l = 0; l < disc.num_ordinates(); ++l) {
    const double w = disc.medium.sigma_s * disc.quad.weights[l] * disc.kernel(m, l);
    if (w == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) q[i] += w * u[l][i];
  }
  return q;
}

std::vector<double> full_rhs(const DirectionSystem& sys, const std::vector<double>& q) {
  std::vector<double> b = *sys.source_test * q;
  for (std::size_t i = 0; i < b.size(); ++i) b[i] += sys.rhs[i];
  return b;
}

/// Runs body(m) for m in [0, count) on up to worker_threads() threads.
template <class Body>
void for_each_direction(std::size_t count, Body body) {
  const unsigned nthreads = std::min<unsigned>(worker_threads(), static_cast<unsigned>(count));
  if (nthreads <= 1) {
    for (std::size_t m = 0; m < count; ++m) body(m);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < nthreads; ++t)
    pool.emplace_back([&] {
      for (std::size_t m = next++; m < count; m = next++) {
        try {
          body(m);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_lock);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

SourceIterationResult source_iteration(const std::vector<DirectionSystem>& systems, const Discretization& disc,
                                       const SourceIterationConfig& cfg, const LinearSolveConfig& linear) {
  cfg.validate();
  linear.validate();
  require_positive_margin(disc.kernel);
  const std::size_t nord = disc.num_ordinates();
  const std::size_t n = disc.ndof();
  if (systems.size() != nord) throw std::invalid_argument("source_iteration: one system per ordinate required");

  LinearSolveConfig lin = linear;
  if (lin.method == SolveMethod::Auto) {
    if (systems.front().scheme.kind == SchemeKind::Kind::WG) {
      lin.method = SolveMethod::SparseDirect;
    } else {
      lin.method = SolveMethod::Krylov;
      lin.preconditioner = PreconditionerKind::SweepGaussSeidel;
    }
  }

  std::vector<std::unique_ptr<BlockPreconditioner>> pre(nord);
  if (lin.method == SolveMethod::Krylov)
    for_each_direction(nord, [&](std::size_t m) {
      pre[m] = std::make_unique<BlockPreconditioner>(systems[m].matrix, systems[m].blocks, lin.preconditioner);
    });

  // Sparse LU per ordinate. The weak Galerkin matrix of -s is the transpose
  // of the one of s, so antipodal ordinates share one factorization.
  std::vector<std::unique_ptr<SparseLuFactor>> factors(nord);
  std::vector<int> factor_of(nord, -1);
  std::vector<bool> transposed(nord, false);
  if (lin.method == SolveMethod::SparseDirect) {
    std::vector<std::size_t> owners;
    for (std::size_t m = 0; m < nord; ++m) {
      factor_of[m] = static_cast<int>(m);
      if (systems[m].scheme.kind == SchemeKind::Kind::WG) {
        const Direction& s = disc.quad.nodes[m];
        for (std::size_t o : owners) {
          const Direction& t = disc.quad.nodes[o];
          if (std::abs(s.x() + t.x()) < 1e-12 && std::abs(s.y() + t.y()) < 1e-12) {
            factor_of[m] = static_cast<int>(o);
            transposed[m] = true;
            break;
          }
        }
      }
      if (factor_of[m] == static_cast<int>(m)) owners.push_back(m);
    }
    for_each_direction(owners.size(), [&](std::size_t i) {
      factors[owners[i]] = std::make_unique<SparseLuFactor>(systems[owners[i]].matrix);
    });
  }

  SourceIterationResult res;
  res.field = RadianceField::zeros(nord, n);
  const SparseMatrix& mass = *systems.front().mass;
  std::atomic<int> linear_its{0};

  auto solve_one = [&](std::size_t m, const std::vector<double>& q, std::vector<double>& out) {
    const std::vector<double> b = full_rhs(systems[m], q);
    if (lin.method == SolveMethod::SparseDirect) {
      out.assign(n, 0.0);
      factors[factor_of[m]]->solve(b, out, transposed[m]);
      ++linear_its;
      return;
    }
    LinearSolveResult r = linear_solve(systems[m].matrix, b, lin, pre[m].get(), std::span<const double>(res.field[m]));
    linear_its += r.iterations;
    out = std::move(r.x);
  };

  for (int it = 0; it < cfg.max_outer; ++it) {
    RadianceField next = res.field;
    if (cfg.ordering == AngleOrdering::Jacobi) {
      const RadianceField q = scattering_source(disc, res.field);
      for_each_direction(nord, [&](std::size_t m) { solve_one(m, q[m], next[m]); });
    } else {
      // already updated ordinates feed the source of later ones
      for (std::size_t m = 0; m < nord; ++m) solve_one(m, scattering_source_one(disc, next, m), next[m]);
    }

    double err2 = 0.0;
    std::vector<double> diff(n);
    for (std::size_t m = 0; m < nord; ++m) {
      for (std::size_t i = 0; i < n; ++i) diff[i] = next[m][i] - res.field[m][i];
      err2 += disc.quad.weights[m] * mass.bilinear(diff, diff);
    }
    const double err = std::sqrt(std::max(err2, 0.0));
    res.field = std::move(next);
    res.trace.errs.push_back(err);
    res.trace.iterations = it + 1;
    if (err < cfg.tol) {
      res.trace.converged = true;
      break;
    }
  }
  res.trace.linear_iterations = linear_its;
  return res;
}

}  // namespace dowg
