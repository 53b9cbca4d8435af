#pragma once
// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library code under test except for plain
// data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "relsim/bipartite_graph.hpp"
#include "relsim/dense_matrix.hpp"

namespace oracle {

using relsim::DenseMatrix;

inline DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) t(c, r) = a(r, c);
  return t;
}

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
  return out;
}

inline std::vector<double> matvec(const DenseMatrix& a, const std::vector<double>& x) {
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

/// Dense adjacency straight from the edge list.
inline DenseMatrix dense_adjacency(const relsim::BipartiteGraph& g) {
  const std::size_t m = g.num_clinicians();
  DenseMatrix a(m + g.num_patients(), m + g.num_patients());
  for (const auto& e : g.edges()) {
    a(e.clinician, m + e.patient) = static_cast<double>(e.weight);
    a(m + e.patient, e.clinician) = static_cast<double>(e.weight);
  }
  return a;
}

/// D^{-1/2} A D^{-1/2} by explicit diagonal scaling; zero-degree rows stay zero.
inline DenseMatrix dense_normalized(const DenseMatrix& a) {
  const std::size_t n = a.rows();
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i] += a(i, j);
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (d[i] > 0 && d[j] > 0) out(i, j) = a(i, j) / std::sqrt(d[i] * d[j]);
  return out;
}

/// Random connected weighted bipartite graph with m + n == dim: a random
/// spanning tree across the two sides plus extra random edges.
inline relsim::BipartiteGraph random_connected_bipartite(std::uint64_t seed, std::size_t dim) {
  std::mt19937_64 rng(seed * 7919 + 17);
  auto uni = [&](std::size_t lo, std::size_t hi) {  // inclusive
    return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
  };
  const std::size_t m = uni(std::max<std::size_t>(2, dim / 6), dim / 2);
  const std::size_t n = dim - m;
  std::set<std::pair<std::size_t, std::size_t>> keys;
  // Spanning tree: attach vertices in random order to an already-placed
  // vertex of the other side.
  std::vector<std::size_t> order(dim);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin() + 1, order.end(), rng);
  // Ensure the first two vertices come from different sides.
  if (order[0] < m) {
    auto it = std::find_if(order.begin(), order.end(), [&](std::size_t v) { return v >= m; });
    std::iter_swap(order.begin() + 1, it);
  } else {
    auto it = std::find_if(order.begin(), order.end(), [&](std::size_t v) { return v < m; });
    std::iter_swap(order.begin() + 1, it);
  }
  std::vector<std::size_t> placed_c, placed_p;
  for (std::size_t v : order) {
    if (v < m) {
      if (!placed_p.empty()) keys.insert({v, placed_p[uni(0, placed_p.size() - 1)] - m});
      placed_c.push_back(v);
    } else {
      if (!placed_c.empty()) keys.insert({placed_c[uni(0, placed_c.size() - 1)], v - m});
      placed_p.push_back(v);
    }
  }
  const std::size_t extra = uni(dim / 2, 2 * dim);
  for (std::size_t e = 0; e < extra; ++e) keys.insert({uni(0, m - 1), uni(0, n - 1)});

  std::vector<std::string> clinicians, patients;
  for (std::size_t i = 0; i < m; ++i) clinicians.push_back("c" + std::to_string(1000 + i));
  for (std::size_t j = 0; j < n; ++j) patients.push_back("p" + std::to_string(1000 + j));
  std::vector<relsim::BipartiteGraph::Edge> edges;
  for (const auto& [i, j] : keys) edges.push_back({i, j, uni(1, 5)});
  return relsim::BipartiteGraph("rand", clinicians, patients, edges);
}

/// Upper bound on the sine of the largest principal angle between span(v)
/// and span(u), both with orthonormal columns: ||(I - U U^T) V||_F, which is
/// at least the spectral norm that equals the sine itself.
inline double subspace_sin_angle(const DenseMatrix& v, const DenseMatrix& u) {
  const DenseMatrix proj = matmul(u, matmul(transpose(u), v));
  double frob = 0.0;
  for (std::size_t i = 0; i < v.rows(); ++i)
    for (std::size_t j = 0; j < v.cols(); ++j) {
      const double d = v(i, j) - proj(i, j);
      frob += d * d;
    }
  return std::sqrt(frob);
}

/// Exact average precision as a reduced fraction: for every positive, the
/// precision over all items scoring at least as high, averaged.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

inline Fraction add(Fraction a, Fraction b) {
  const std::int64_t g = std::gcd(a.den, b.den);
  Fraction out{a.num * (b.den / g) + b.num * (a.den / g), a.den / g * b.den};
  const std::int64_t h = std::gcd(out.num, out.den);
  return {out.num / h, out.den / h};
}

inline Fraction exact_average_precision(const std::vector<double>& scores, const std::vector<int>& labels) {
  Fraction sum;
  std::int64_t n_pos = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    ++n_pos;
    std::int64_t at_least = 0, pos_at_least = 0;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (scores[j] >= scores[i]) {
        ++at_least;
        pos_at_least += labels[j];
      }
    }
    sum = add(sum, {pos_at_least, at_least});
  }
  Fraction out{sum.num, sum.den * n_pos};
  const std::int64_t h = std::gcd(out.num, out.den);
  return {out.num / h, out.den / h};
}

/// Correctly rounded double of the fraction (IEEE division of exact operands).
inline double to_double(Fraction f) { return static_cast<double>(f.num) / static_cast<double>(f.den); }

}  // namespace oracle
