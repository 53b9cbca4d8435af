#include "relsim/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace relsim {

SparseMatrix::SparseMatrix(std::size_t dim, std::vector<std::size_t> row_offsets,
                           std::vector<std::size_t> column_indices, std::vector<double> values)
    : dim_(dim),
      row_offsets_(std::move(row_offsets)),
      column_indices_(std::move(column_indices)),
      values_(std::move(values)) {
  if (row_offsets_.size() != dim_ + 1 || row_offsets_.front() != 0) {
    throw std::invalid_argument("SparseMatrix: row_offsets must have dim+1 entries starting at 0");
  }
  if (column_indices_.size() != values_.size() || row_offsets_.back() != values_.size()) {
    throw std::invalid_argument("SparseMatrix: index/value arrays disagree with row_offsets");
  }
  for (std::size_t i = 0; i < dim_; ++i) {
    const std::size_t lo = row_offsets_[i];
    const std::size_t hi = row_offsets_[i + 1];
    if (hi < lo) throw std::invalid_argument("SparseMatrix: row_offsets not monotone");
    for (std::size_t p = lo; p < hi; ++p) {
      if (column_indices_[p] >= dim_) {
        throw std::invalid_argument("SparseMatrix: column index out of range in row " +
                                    std::to_string(i));
      }
      if (p > lo && column_indices_[p] <= column_indices_[p - 1]) {
        throw std::invalid_argument("SparseMatrix: column indices not strictly increasing in row " +
                                    std::to_string(i));
      }
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t dim, std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row >= dim || t.col >= dim) {
      throw std::invalid_argument("SparseMatrix::from_triplets: index out of range");
    }
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::size_t> offsets(dim + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<double> vals;
  cols.reserve(triplets.size());
  vals.reserve(triplets.size());
  for (std::size_t p = 0; p < triplets.size(); ++p) {
    const auto& t = triplets[p];
    if (p > 0 && triplets[p - 1].row == t.row && triplets[p - 1].col == t.col) {
      vals.back() += t.value;
      continue;
    }
    cols.push_back(t.col);
    vals.push_back(t.value);
    ++offsets[t.row + 1];
  }
  for (std::size_t i = 0; i < dim; ++i) offsets[i + 1] += offsets[i];
  return SparseMatrix(dim, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& dense) {
  if (dense.rows() != dense.cols()) {
    throw std::invalid_argument("SparseMatrix::from_dense: matrix must be square");
  }
  const std::size_t n = dense.rows();
  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<double> vals;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (dense(i, j) != 0.0) {
        cols.push_back(j);
        vals.push_back(dense(i, j));
      }
    }
    offsets[i + 1] = cols.size();
  }
  return SparseMatrix(n, std::move(offsets), std::move(cols), std::move(vals));
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= dim_ || j >= dim_) throw std::out_of_range("SparseMatrix::at");
  const auto first = column_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
  const auto last = column_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - column_indices_.begin())];
}

bool SparseMatrix::is_symmetric() const {
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      const std::size_t j = column_indices_[p];
      const auto first = column_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[j]);
      const auto last = column_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[j + 1]);
      const auto it = std::lower_bound(first, last, i);
      if (it == last || *it != i) return false;
      if (values_[static_cast<std::size_t>(it - column_indices_.begin())] != values_[p]) return false;
    }
  }
  return true;
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix out(dim_, dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      out(i, column_indices_[p]) = values_[p];
    }
  }
  return out;
}

void spmv(const SparseMatrix& m, std::span<const double> x, std::span<double> y) {
  if (x.size() != m.dim() || y.size() != m.dim()) {
    throw std::invalid_argument("spmv: vector length " + std::to_string(x.size()) +
                                " does not match matrix dimension " + std::to_string(m.dim()));
  }
  const auto offsets = m.row_offsets();
  const auto cols = m.column_indices();
  const auto vals = m.values();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    double acc = 0.0;
    for (std::size_t p = offsets[i]; p < offsets[i + 1]; ++p) acc += vals[p] * x[cols[p]];
    y[i] = acc;
  }
}

std::vector<double> spmv(const SparseMatrix& m, std::span<const double> x) {
  std::vector<double> y(m.dim());
  spmv(m, x, y);
  return y;
}

std::vector<double> degrees(const SparseMatrix& a) {
  std::vector<double> d(a.dim(), 0.0);
  const auto offsets = a.row_offsets();
  const auto vals = a.values();
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t p = offsets[i]; p < offsets[i + 1]; ++p) d[i] += vals[p];
  }
  return d;
}

SparseMatrix normalized_laplacian(const SparseMatrix& a) {
  const auto vals = a.values();
  if (std::any_of(vals.begin(), vals.end(), [](double v) { return !(v >= 0.0); })) {
    throw std::invalid_argument("normalized_laplacian: adjacency entries must be nonnegative");
  }
  if (!a.is_symmetric()) {
    throw std::invalid_argument("normalized_laplacian: adjacency must be symmetric");
  }
  const std::vector<double> d = degrees(a);
  const auto offsets = a.row_offsets();
  const auto cols = a.column_indices();

  std::vector<std::size_t> out_offsets(a.dim() + 1, 0);
  std::vector<std::size_t> out_cols;
  std::vector<double> out_vals;
  out_cols.reserve(a.nnz());
  out_vals.reserve(a.nnz());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    if (d[i] > 0.0) {
      for (std::size_t p = offsets[i]; p < offsets[i + 1]; ++p) {
        const std::size_t j = cols[p];
        if (d[j] <= 0.0) continue;
        out_cols.push_back(j);
        out_vals.push_back(vals[p] / std::sqrt(d[i] * d[j]));
      }
    }
    out_offsets[i + 1] = out_cols.size();
  }
  return SparseMatrix(a.dim(), std::move(out_offsets), std::move(out_cols), std::move(out_vals));
}

}  // namespace relsim
