#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "relsim/sparse_matrix.hpp"

using namespace relsim;

namespace {

SparseMatrix example3() {
  return SparseMatrix::from_triplets(3, {{0, 1, 2}, {1, 0, 2}, {0, 2, 1}, {2, 0, 1}});
}

}  // namespace

TEST_CASE("CSR invariants are enforced") {
  CHECK_NOTHROW(SparseMatrix(2, {0, 1, 2}, {1, 0}, {1.0, 1.0}));
  CHECK_THROWS_AS(SparseMatrix(2, {0, 1}, {1}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(SparseMatrix(2, {0, 2, 1}, {1, 0}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(SparseMatrix(2, {0, 2, 2}, {1, 0}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(SparseMatrix(2, {0, 1, 2}, {2, 0}, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("triplets sum duplicates") {
  const auto m = SparseMatrix::from_triplets(2, {{0, 1, 1.5}, {0, 1, 2.0}, {1, 1, 3.0}});
  CHECK(m.nnz() == 2);
  CHECK(m.at(0, 1) == 3.5);
  CHECK(m.at(1, 0) == 0.0);
  CHECK_FALSE(m.is_symmetric());
}

TEST_CASE("spmv examples") {
  DenseMatrix id(4, 4);
  for (std::size_t i = 0; i < 4; ++i) id(i, i) = 1.0;
  const std::vector<double> x = {1.5, -2.0, 0.25, 7.0};
  CHECK(spmv(SparseMatrix::from_dense(id), x) == x);
  CHECK(spmv(example3(), std::vector<double>{1, 0, 0}) == std::vector<double>{0, 2, 1});
  CHECK_THROWS_AS(spmv(example3(), std::vector<double>{1, 0}), std::invalid_argument);
}

TEST_CASE("spmv matches dense multiply on random symmetric matrices") {
  std::mt19937_64 rng(50);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    DenseMatrix d(50, 50);
    for (std::size_t i = 0; i < 50; ++i)
      for (std::size_t j = i; j < 50; ++j)
        if (rng() % 5 == 0) d(i, j) = d(j, i) = u(rng);
    const auto s = SparseMatrix::from_dense(d);
    CHECK(s.is_symmetric());
    CHECK(s.to_dense() == d);
    std::vector<double> x(50);
    for (double& v : x) v = u(rng);
    const auto y = spmv(s, x);
    const auto ref = oracle::matvec(d, x);
    for (std::size_t i = 0; i < 50; ++i) CHECK(std::abs(y[i] - ref[i]) <= 1e-13);
  }
}

TEST_CASE("normalized Laplacian of the star K_{1,2}") {
  const auto a = SparseMatrix::from_triplets(3, {{0, 1, 1}, {1, 0, 1}, {0, 2, 1}, {2, 0, 1}});
  CHECK(degrees(a) == std::vector<double>{2, 1, 1});
  const auto l = normalized_laplacian(a);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(l.at(0, 1) == doctest::Approx(r).epsilon(1e-15));
  CHECK(l.at(0, 2) == doctest::Approx(r).epsilon(1e-15));
  CHECK(l.at(1, 2) == 0.0);
  CHECK(l.at(0, 0) == 0.0);
}

TEST_CASE("isolated vertex keeps an empty row and column") {
  const auto a = SparseMatrix::from_triplets(4, {{0, 1, 3}, {1, 0, 3}});
  const auto l = normalized_laplacian(a).to_dense();
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 2; j < 4; ++j) {
      CHECK(l(i, j) == 0.0);
      CHECK(l(j, i) == 0.0);
    }
  }
  CHECK(l(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("4-vertex example matches the dense oracle") {
  const BipartiteGraph g("t", {"c1", "c2"}, {"p1", "p2"}, {{0, 0, 2}, {0, 1, 1}, {1, 1, 1}});
  const auto l = normalized_laplacian(adjacency_matrix(g));
  CHECK(l.at(0, 2) == doctest::Approx(2.0 / std::sqrt(6.0)).epsilon(1e-15));
  CHECK(l.at(0, 3) == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-15));
  CHECK(l.at(1, 3) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  const auto ref = oracle::dense_normalized(oracle::dense_adjacency(g));
  const auto dense = l.to_dense();
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(dense(i, j) - ref(i, j)) <= 1e-15);
}

TEST_CASE("Laplacian of random graphs is symmetric with entries in [0, 1]") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = oracle::random_connected_bipartite(seed, 60);
    const auto l = normalized_laplacian(adjacency_matrix(g));
    CHECK(l.is_symmetric());
    const auto ref = oracle::dense_normalized(oracle::dense_adjacency(g));
    const auto dense = l.to_dense();
    double worst = 0.0;
    for (std::size_t i = 0; i < dense.rows(); ++i)
      for (std::size_t j = 0; j < dense.cols(); ++j) {
        worst = std::max(worst, std::abs(dense(i, j) - ref(i, j)));
        CHECK(dense(i, j) >= 0.0);
        CHECK(dense(i, j) <= 1.0);
      }
    CHECK(worst <= 1e-15);
  }
}
