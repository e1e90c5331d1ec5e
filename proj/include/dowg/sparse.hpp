#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <span>
#include <vector>

namespace dowg {

/// Square matrix in compressed-row storage. Column indices are strictly
/// increasing within each row.
class SparseMatrix {
 public:
  struct Triplet {
    std::size_t row, col;
    double value;
  };

  SparseMatrix() = default;
  SparseMatrix(std::size_t n, std::vector<std::size_t> row_ptr, std::vector<std::size_t> col, std::vector<double> val);

  /// Duplicate entries are summed.
  static SparseMatrix from_triplets(std::size_t n, std::vector<Triplet> triplets);
  static SparseMatrix identity(std::size_t n);

  std::size_t size() const { return n_; }
  std::size_t nnz() const { return val_.size(); }
  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::size_t>& col() const { return col_; }
  const std::vector<double>& values() const { return val_; }
  std::vector<double>& values() { return val_; }

  double at(std::size_t i, std::size_t j) const;
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;
  /// y^T A x
  double bilinear(std::span<const double> y, std::span<const double> x) const;

  Eigen::MatrixXd to_dense() const;

  /// "row col value" lines, zero-based, preceded by a "n nnz" header.
  void write_coordinate(std::ostream& out) const;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_;
  std::vector<double> val_;
};

}  // namespace dowg
