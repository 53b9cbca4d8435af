#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "relsim/eigensolver.hpp"
#include "relsim/error.hpp"

using namespace relsim;

namespace {

SparseMatrix laplacian_of(const BipartiteGraph& g) { return normalized_laplacian(adjacency_matrix(g)); }

std::vector<double> eigen_spectrum(const DenseMatrix& a) {
  const auto n = static_cast<Eigen::Index>(a.rows());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(v.rbegin(), v.rend());
  return v;
}

double max_residual(const SparseMatrix& l, const EigenPairs& p) {
  double worst = 0.0;
  for (std::size_t j = 0; j < p.values.size(); ++j) {
    const auto v = p.vectors.column(j);
    const auto lv = spmv(l, v);
    double r = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) r += std::pow(lv[i] - p.values[j] * v[i], 2);
    worst = std::max(worst, std::sqrt(r));
  }
  return worst;
}

}  // namespace

TEST_CASE("dense oracle: diagonal and star") {
  DenseMatrix d(3, 3);
  d(0, 0) = 3;
  d(1, 1) = 1;
  d(2, 2) = 2;
  CHECK(dense_eigen_oracle(d).values == std::vector<double>{3, 2, 1});

  const auto star = SparseMatrix::from_triplets(3, {{0, 1, 1}, {1, 0, 1}, {0, 2, 1}, {2, 0, 1}});
  const auto p = dense_eigen_oracle(normalized_laplacian(star).to_dense());
  REQUIRE(p.values.size() == 3);
  CHECK(p.values[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(p.values[1]) <= 1e-14);
  CHECK(p.values[2] == doctest::Approx(-1.0).epsilon(1e-14));
  for (double r : p.residuals) CHECK(r <= 1e-10);

  DenseMatrix asym(2, 2);
  asym(0, 1) = 1;
  CHECK_THROWS_AS(dense_eigen_oracle(asym), std::invalid_argument);
}

TEST_CASE("star K_{1,2}, k=2: values (1, 0) and the degree-root vector") {
  const auto star = SparseMatrix::from_triplets(3, {{0, 1, 1}, {1, 0, 1}, {0, 2, 1}, {2, 0, 1}});
  const auto p = top_k_eigenpairs(normalized_laplacian(star), 2);
  REQUIRE(p.values.size() == 2);
  CHECK(p.values[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(p.values[1]) <= 1e-10);
  CHECK(p.vectors(0, 0) == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-10));
  CHECK(p.vectors(1, 0) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(p.vectors(2, 0) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("4-vertex example has spectrum {1, 1/sqrt3, -1/sqrt3, -1}") {
  const BipartiteGraph g("t", {"c1", "c2"}, {"p1", "p2"}, {{0, 0, 2}, {0, 1, 1}, {1, 1, 1}});
  const auto l = laplacian_of(g);
  const double s = 1.0 / std::sqrt(3.0);
  const std::vector<double> expected = {1.0, s, -s, -1.0};
  const auto dense = dense_eigen_oracle(l.to_dense());
  for (std::size_t i = 0; i < 4; ++i) CHECK(dense.values[i] == doctest::Approx(expected[i]).epsilon(1e-13));
  // k must stay below dim, so take three pairs from the iterative solver.
  const auto p = top_k_eigenpairs(l, 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(p.values[i] == doctest::Approx(expected[i]).epsilon(1e-10));
}

TEST_CASE("argument checks") {
  const auto star = SparseMatrix::from_triplets(3, {{0, 1, 1}, {1, 0, 1}, {0, 2, 1}, {2, 0, 1}});
  CHECK_THROWS_AS(top_k_eigenpairs(star, 0), std::invalid_argument);
  CHECK_THROWS_AS(top_k_eigenpairs(star, 3), std::invalid_argument);
  const auto asym = SparseMatrix::from_triplets(3, {{0, 1, 1}});
  CHECK_THROWS_AS(top_k_eigenpairs(asym, 1), std::invalid_argument);
}

TEST_CASE("restart cap raises ConvergenceError with best residuals") {
  const auto g = oracle::random_connected_bipartite(3, 200);
  SolverConfig cfg;
  cfg.tol = 1e-15;
  cfg.max_restarts = 1;
  cfg.krylov_dim = 12;
  try {
    top_k_eigenpairs(laplacian_of(g), 5, cfg);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.best_residuals().size() == 5);
  }
}

TEST_CASE("full spectrum is symmetric about zero and agrees with Eigen") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto g = oracle::random_connected_bipartite(seed, 40 + 10 * seed);
    const auto dense_l = laplacian_of(g).to_dense();
    const auto ours = dense_eigen_oracle(dense_l).values;
    const auto ref = eigen_spectrum(dense_l);
    REQUIRE(ours.size() == ref.size());
    for (std::size_t i = 0; i < ours.size(); ++i) {
      CHECK(std::abs(ours[i] - ref[i]) <= 1e-12);
      CHECK(std::abs(ours[i] + ours[ours.size() - 1 - i]) <= 1e-10);
    }
  }
}

TEST_CASE("top-5 from Lanczos match the dense oracle, residuals under tol") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = oracle::random_connected_bipartite(seed, 30 + 25 * seed);
    const auto l = laplacian_of(g);
    const auto p = top_k_eigenpairs(l, 5, {.tol = 1e-10, .seed = seed});
    const auto ref = dense_eigen_oracle(l.to_dense());
    for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(p.values[j] - ref.values[j]) <= 1e-9);
    CHECK(max_residual(l, p) <= 1e-10);
    for (std::size_t j = 0; j < 5; ++j) CHECK(p.residuals[j] <= 1e-10);
    // Orthonormal columns.
    const auto gram = oracle::matmul(oracle::transpose(p.vectors), p.vectors);
    for (std::size_t a = 0; a < 5; ++a)
      for (std::size_t b = 0; b < 5; ++b) CHECK(std::abs(gram(a, b) - (a == b ? 1.0 : 0.0)) <= 1e-10);
  }
}

TEST_CASE("repeated eigenvalue 1 is found once per connected component") {
  // Two disjoint stars: eigenvalue 1 twice.
  const BipartiteGraph g("t", {"a", "b"}, {"p", "q", "r", "s"},
                         {{0, 0, 1}, {0, 1, 2}, {1, 2, 1}, {1, 3, 3}});
  const auto p = top_k_eigenpairs(laplacian_of(g), 3);
  CHECK(p.values[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(p.values[1] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(p.values[2]) <= 1e-8);
}

TEST_CASE("sign rule and determinism") {
  const auto g = oracle::random_connected_bipartite(42, 120);
  const auto l = laplacian_of(g);
  const auto a = top_k_eigenpairs(l, 5, {.seed = 7});
  const auto b = top_k_eigenpairs(l, 5, {.seed = 7});
  CHECK(a.values == b.values);
  CHECK(a.vectors == b.vectors);
  for (std::size_t j = 0; j < 5; ++j) {
    const auto col = a.vectors.column(j);
    std::size_t arg = 0;
    for (std::size_t i = 1; i < col.size(); ++i)
      if (std::abs(col[i]) > std::abs(col[arg])) arg = i;
    CHECK(col[arg] > 0.0);
  }
  DenseMatrix v(3, 1);
  v(0, 0) = 0.5;
  v(1, 0) = -0.5;
  v(2, 0) = 0.1;
  canonicalize_signs(v);
  CHECK(v(0, 0) == 0.5);  // tie goes to the lowest index
  v(0, 0) = -0.5;
  v(1, 0) = 0.5;
  canonicalize_signs(v);
  CHECK(v(0, 0) == 0.5);
  CHECK(v(1, 0) == -0.5);
}

TEST_CASE("vertex relabeling permutes eigenvectors and keeps eigenvalues") {
  const auto g = oracle::random_connected_bipartite(9, 80);
  // Reverse the patient order.
  std::vector<std::string> patients(g.patients().rbegin(), g.patients().rend());
  std::vector<BipartiteGraph::Edge> edges;
  const std::size_t n = g.num_patients();
  for (const auto& e : g.edges()) edges.push_back({e.clinician, n - 1 - e.patient, e.weight});
  const BipartiteGraph h("t", g.clinicians(), patients, edges);
  const auto pg = top_k_eigenpairs(laplacian_of(g), 4, {.tol = 1e-11});
  const auto ph = top_k_eigenpairs(laplacian_of(h), 4, {.tol = 1e-11});
  for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(pg.values[j] - ph.values[j]) <= 1e-10);
  // Leading vector (simple eigenvalue 1) maps across up to sign.
  const std::size_t m = g.num_clinicians();
  for (std::size_t j = 0; j < n; ++j)
    CHECK(std::abs(std::abs(pg.vectors(m + j, 0)) - std::abs(ph.vectors(m + n - 1 - j, 0))) <= 1e-9);
}

TEST_CASE("eigenpair CSV dump has one row per pair") {
  const auto star = SparseMatrix::from_triplets(3, {{0, 1, 1}, {1, 0, 1}, {0, 2, 1}, {2, 0, 1}});
  std::ostringstream out;
  write_eigenpairs_csv(out, top_k_eigenpairs(normalized_laplacian(star), 2));
  const std::string s = out.str();
  CHECK(std::count(s.begin(), s.end(), '\n') >= 2);
}
