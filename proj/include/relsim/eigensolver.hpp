#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "relsim/dense_matrix.hpp"
#include "relsim/sparse_matrix.hpp"

namespace relsim {

/// Eigenvalues sorted descending by algebraic value, with matching unit
/// eigenvectors stored as the columns of `vectors` (dim x k).
struct EigenPairs {
  std::vector<double> values;
  DenseMatrix vectors;
  /// ||A v_j - lambda_j v_j||_2 for each pair, measured after the solve.
  std::vector<double> residuals;
};

struct SolverConfig {
  /// Residual bound ||L v - lambda v||_2 every returned pair must meet.
  double tol = 1e-8;
  /// Restart cycles allowed per Lanczos run before giving up.
  std::size_t max_restarts = 300;
  /// Krylov subspace dimension; 0 selects max(2k+1, 20).
  std::size_t krylov_dim = 0;
  std::uint64_t seed = 0;
};

/// The k algebraically largest eigenpairs of a symmetric sparse matrix.
///
/// Thick-restart Lanczos with full reorthogonalization. Converged pairs are
/// locked and deflated; once k pairs are locked, a fresh random start in the
/// deflated space checks that no larger eigenvalue was missed, which is how
/// repeated eigenvalues (e.g. one eigenvalue 1 per connected component) are
/// recovered. Output is bit-identical for a fixed seed. Each eigenvector's
/// largest-magnitude entry is positive (ties go to the lowest index).
///
/// Throws std::invalid_argument unless 1 <= k < dim and `l` is symmetric;
/// throws ConvergenceError when a run exhausts `max_restarts`.
EigenPairs top_k_eigenpairs(const SparseMatrix& l, std::size_t k, const SolverConfig& config = {});

/// Full eigendecomposition of a dense symmetric matrix by cyclic Jacobi
/// rotations. Test-scale only: throws std::invalid_argument for dim > 512 or
/// a non-symmetric input.
EigenPairs dense_eigen_oracle(const DenseMatrix& a);

/// Flip each column so its largest-magnitude entry is positive.
void canonicalize_signs(DenseMatrix& vectors);

/// Debug dump, one row per pair: `index,lambda,v_0,...,v_{dim-1}`.
void write_eigenpairs_csv(std::ostream& out, const EigenPairs& pairs);

namespace detail {

/// In-place cyclic Jacobi on a row-major symmetric n x n matrix. On return
/// `values` holds eigenvalues sorted descending and `vectors` (n x n,
/// row-major) holds the matching eigenvectors as columns.
void jacobi_eigen(std::vector<double>& a, std::size_t n, std::vector<double>& values,
                  std::vector<double>& vectors);

}  // namespace detail

}  // namespace relsim
