#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "relsim/dense_matrix.hpp"

namespace relsim {

/// Square matrix in compressed-sparse-row form.
///
/// Invariants (checked on construction): `row_offsets` has dim+1 monotone
/// entries starting at 0 and ending at nnz; column indices lie in [0, dim)
/// and are strictly increasing within each row.
class SparseMatrix {
 public:
  struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
  };

  SparseMatrix() = default;
  SparseMatrix(std::size_t dim, std::vector<std::size_t> row_offsets,
               std::vector<std::size_t> column_indices, std::vector<double> values);

  /// Builds from unordered triplets; duplicate (row, col) entries are summed.
  /// Explicit zeros are kept as stored entries.
  static SparseMatrix from_triplets(std::size_t dim, std::vector<Triplet> triplets);

  static SparseMatrix from_dense(const DenseMatrix& dense);

  std::size_t dim() const { return dim_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const std::size_t> row_offsets() const { return row_offsets_; }
  std::span<const std::size_t> column_indices() const { return column_indices_; }
  std::span<const double> values() const { return values_; }

  /// Stored value at (i, j), zero if not stored. O(log row length).
  double at(std::size_t i, std::size_t j) const;

  /// Structural and exact numerical symmetry.
  bool is_symmetric() const;

  DenseMatrix to_dense() const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> column_indices_;
  std::vector<double> values_;
};

/// y = m x. Throws std::invalid_argument on dimension mismatch.
std::vector<double> spmv(const SparseMatrix& m, std::span<const double> x);
void spmv(const SparseMatrix& m, std::span<const double> x, std::span<double> y);

/// Row sums of `a`.
std::vector<double> degrees(const SparseMatrix& a);

/// D^{-1/2} A D^{-1/2} with D = diag(row sums of A). Rows and columns of
/// zero-degree vertices come out empty (all zero).
///
/// Precondition: `a` symmetric with nonnegative entries.
SparseMatrix normalized_laplacian(const SparseMatrix& a);

}  // namespace relsim
