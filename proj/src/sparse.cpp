#include "dowg/sparse.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace dowg {

SparseMatrix::SparseMatrix(std::size_t n, std::vector<std::size_t> row_ptr, std::vector<std::size_t> col,
                           std::vector<double> val)
    : n_(n), row_ptr_(std::move(row_ptr)), col_(std::move(col)), val_(std::move(val)) {
  if (row_ptr_.size() != n_ + 1 || col_.size() != val_.size() || row_ptr_.back() != col_.size())
    throw std::invalid_argument("SparseMatrix: inconsistent CSR arrays");
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      if (col_[p] >= n_) throw std::invalid_argument("SparseMatrix: column index out of range");
      if (p > row_ptr_[i] && col_[p] <= col_[p - 1])
        throw std::invalid_argument("SparseMatrix: column indices must increase within a row");
    }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t n, std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(),
            [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  std::vector<std::size_t> row_ptr(n + 1, 0), col;
  std::vector<double> val;
  col.reserve(triplets.size());
  val.reserve(triplets.size());
  for (std::size_t t = 0; t < triplets.size(); ++t) {
    const Triplet& tr = triplets[t];
    if (tr.row >= n || tr.col >= n) throw std::invalid_argument("SparseMatrix::from_triplets: index out of range");
    if (!col.empty() && t > 0 && triplets[t - 1].row == tr.row && triplets[t - 1].col == tr.col) {
      val.back() += tr.value;
      continue;
    }
    col.push_back(tr.col);
    val.push_back(tr.value);
    ++row_ptr[tr.row + 1];
  }
  for (std::size_t i = 0; i < n; ++i) row_ptr[i + 1] += row_ptr[i];
  return SparseMatrix(n, std::move(row_ptr), std::move(col), std::move(val));
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<std::size_t> row_ptr(n + 1), col(n);
  for (std::size_t i = 0; i <= n; ++i) row_ptr[i] = i;
  for (std::size_t i = 0; i < n; ++i) col[i] = i;
  return SparseMatrix(n, std::move(row_ptr), std::move(col), std::vector<double>(n, 1.0));
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  const auto begin = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto end = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(begin, end, j);
  return (it != end && *it == j) ? val_[static_cast<std::size_t>(it - col_.begin())] : 0.0;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != n_ || y.size() != n_) throw std::invalid_argument("SparseMatrix::multiply: dimension mismatch");
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) acc += val_[p] * x[col_[p]];
    y[i] = acc;
  }
}

std::vector<double> SparseMatrix::operator*(std::span<const double> x) const {
  std::vector<double> y(n_);
  multiply(x, y);
  return y;
}

double SparseMatrix::bilinear(std::span<const double> y, std::span<const double> x) const {
  const std::vector<double> ax = *this * x;
  double acc = 0.0;
  for (std::size_t i = 0; i < n_; ++i) acc += y[i] * ax[i];
  return acc;
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col_[p])) = val_[p];
  return d;
}

void SparseMatrix::write_coordinate(std::ostream& out) const {
  out << n_ << ' ' << nnz() << '\n';
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) out << i << ' ' << col_[p] << ' ' << val_[p] << '\n';
  out.precision(old);
}

}  // namespace dowg
