#include "relsim/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "relsim/csv.hpp"
#include "relsim/error.hpp"

namespace relsim {

namespace detail {

void jacobi_eigen(std::vector<double>& a, std::size_t n, std::vector<double>& values,
                  std::vector<double>& vectors) {
  // vt holds the eigenvector estimates as rows so both rotation updates
  // touch contiguous memory.
  std::vector<double> vt(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) vt[i * n + i] = 1.0;

  double frob2 = 0.0;
  for (double v : a) frob2 += v * v;

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
    }
    if (off <= 1e-34 * frob2) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double app = a[p * n + p];
        const double aqq = a[q * n + q];
        const double theta = (aqq - app) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        double* rowp = &a[p * n];
        double* rowq = &a[q * n];
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = rowp[k];
          const double akq = rowq[k];
          const double np = c * akp - s * akq;
          const double nq = s * akp + c * akq;
          rowp[k] = np;
          rowq[k] = nq;
          a[k * n + p] = np;
          a[k * n + q] = nq;
        }
        rowp[p] = app - t * apq;
        rowq[q] = aqq + t * apq;
        rowp[q] = 0.0;
        rowq[p] = 0.0;

        double* vp = &vt[p * n];
        double* vq = &vt[q * n];
        for (std::size_t k = 0; k < n; ++k) {
          const double x = vp[k];
          const double y = vq[k];
          vp[k] = c * x - s * y;
          vq[k] = s * x + c * y;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a[i * n + i] > a[j * n + j]; });
  values.assign(n, 0.0);
  vectors.assign(n * n, 0.0);
  for (std::size_t col = 0; col < n; ++col) {
    const std::size_t src = order[col];
    values[col] = a[src * n + src];
    for (std::size_t k = 0; k < n; ++k) vectors[k * n + col] = vt[src * n + k];
  }
}

}  // namespace detail

namespace {

using Vec = std::vector<double>;

/// Uniform doubles in [-1, 1) straight from the engine's bits, so the stream
/// does not depend on the standard library's distribution implementations.
class UnitRng {
 public:
  explicit UnitRng(std::uint64_t seed) : engine_(seed) {}
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53 * 2.0 - 1.0; }

 private:
  std::mt19937_64 engine_;
};

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const Vec& x, Vec& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

double norm(const Vec& v) { return std::sqrt(dot(v, v)); }

void scale(Vec& v, double s) {
  for (double& x : v) x *= s;
}

/// Two passes of modified Gram-Schmidt against `locked` and basis[0..count).
/// Projections onto the basis are accumulated into `coef` when given.
void orthogonalize(Vec& w, const std::vector<Vec>& locked, const std::vector<Vec>& basis,
                   std::size_t count, double* coef) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const Vec& q : locked) axpy(-dot(q, w), q, w);
    for (std::size_t i = 0; i < count; ++i) {
      const double d = dot(basis[i], w);
      axpy(-d, basis[i], w);
      if (coef) coef[i] += d;
    }
  }
}

bool random_orthogonal_unit(Vec& out, const std::vector<Vec>& locked, const std::vector<Vec>& basis,
                            std::size_t count, UnitRng& rng) {
  for (int attempt = 0; attempt < 5; ++attempt) {
    for (double& x : out) x = rng.next();
    const double before = norm(out);
    orthogonalize(out, locked, basis, count, nullptr);
    const double after = norm(out);
    if (after > 1e-8 * before) {
      scale(out, 1.0 / after);
      return true;
    }
  }
  return false;
}

struct RunResult {
  std::vector<double> values;
  std::vector<Vec> vectors;
};

/// When `threshold` is set the run first only probes for a Ritz value above
/// it; if none shows up within `probe_budget` restarts (or the top pair
/// converges below it) the run returns no pairs.
struct RunOptions {
  std::size_t nev = 1;
  std::size_t krylov_dim = 20;
  bool probe = false;
  double threshold = 0.0;
  std::size_t probe_budget = 10;
};

RunResult lanczos_run(const SparseMatrix& l, const std::vector<Vec>& locked, const RunOptions& opt,
                      const SolverConfig& cfg, UnitRng& rng) {
  const std::size_t n = l.dim();
  const std::size_t avail = n - locked.size();
  const std::size_t m = std::min(opt.krylov_dim, avail);
  const std::size_t nev = std::min(opt.nev, m);

  std::vector<Vec> basis(m + 1, Vec(n, 0.0));
  DenseMatrix h(m, m);
  Vec w(n);
  std::vector<double> coef(m + 1);
  std::vector<double> best(nev, std::numeric_limits<double>::infinity());

  if (!random_orthogonal_unit(basis[0], locked, basis, 0, rng)) {
    throw NumericalError("top_k_eigenpairs: could not draw a start vector in the deflated space");
  }

  bool probing = opt.probe;
  std::size_t m_eff = m;
  std::size_t j = 0;
  double beta = 0.0;
  double anorm = 0.0;

  std::vector<double> theta;
  std::vector<double> y;
  std::vector<double> hcopy;

  for (std::size_t restart = 0;; ++restart) {
    // Extend the Krylov basis from column j to m_eff.
    for (; j < m_eff; ++j) {
      spmv(l, basis[j], w);
      std::fill(coef.begin(), coef.end(), 0.0);
      orthogonalize(w, locked, basis, j + 1, coef.data());
      for (std::size_t i = 0; i <= j; ++i) {
        h(i, j) = coef[i];
        h(j, i) = coef[i];
      }
      beta = norm(w);
      double col2 = beta * beta;
      for (std::size_t i = 0; i <= j; ++i) col2 += coef[i] * coef[i];
      anorm = std::max(anorm, std::sqrt(col2));
      const double breakdown = 1e-13 * std::max(anorm, 1.0);

      if (j + 1 == m_eff) {
        if (beta > breakdown) {
          basis[m_eff] = w;
          scale(basis[m_eff], 1.0 / beta);
        } else {
          beta = 0.0;
        }
        break;
      }
      if (beta > breakdown) {
        basis[j + 1] = w;
        scale(basis[j + 1], 1.0 / beta);
      } else if (!random_orthogonal_unit(basis[j + 1], locked, basis, j + 1, rng)) {
        // The whole deflated space is spanned: the projection is exact.
        m_eff = j + 1;
        beta = 0.0;
        break;
      }
    }
    j = m_eff;

    // Rayleigh-Ritz on the projected matrix.
    hcopy.assign(m_eff * m_eff, 0.0);
    for (std::size_t r = 0; r < m_eff; ++r) {
      for (std::size_t c = 0; c < m_eff; ++c) hcopy[r * m_eff + c] = h(r, c);
    }
    detail::jacobi_eigen(hcopy, m_eff, theta, y);
    auto ycoef = [&](std::size_t row, std::size_t col) { return y[row * m_eff + col]; };

    const std::size_t want = probing ? 1 : nev;
    bool all_small = true;
    for (std::size_t i = 0; i < want; ++i) {
      const double est = std::abs(beta * ycoef(m_eff - 1, i));
      if (i < best.size()) best[i] = std::min(best[i], est);
      if (est > cfg.tol) all_small = false;
    }

    if (probing) {
      if (theta[0] > opt.threshold) {
        probing = false;  // something was missed; converge it
      } else if (all_small || restart >= opt.probe_budget) {
        return {};
      }
    }

    if (!probing && all_small) {
      RunResult out;
      bool verified = true;
      Vec lx(n);
      for (std::size_t i = 0; i < want; ++i) {
        Vec x(n, 0.0);
        for (std::size_t c = 0; c < m_eff; ++c) axpy(ycoef(c, i), basis[c], x);
        scale(x, 1.0 / norm(x));
        spmv(l, x, lx);
        const double rq = dot(x, lx);
        axpy(-rq, x, lx);
        if (norm(lx) > cfg.tol) verified = false;
        out.values.push_back(rq);
        out.vectors.push_back(std::move(x));
      }
      if (verified) return out;
    }

    if (restart >= cfg.max_restarts) {
      std::ostringstream msg;
      msg << "top_k_eigenpairs: no convergence after " << cfg.max_restarts
          << " restarts; best residuals:";
      for (double r : best) msg << ' ' << r;
      throw ConvergenceError(msg.str(), best);
    }

    // Thick restart: keep the leading Ritz vectors plus the residual direction.
    if (m_eff <= want) {
      throw NumericalError("top_k_eigenpairs: exact projection failed verification");
    }
    const std::size_t keep = std::min(want + (m_eff - want) / 2, m_eff - 1);
    std::vector<Vec> kept(keep, Vec(n, 0.0));
    for (std::size_t i = 0; i < keep; ++i) {
      for (std::size_t c = 0; c < m_eff; ++c) axpy(ycoef(c, i), basis[c], kept[i]);
    }
    const bool have_residual = beta > 0.0;
    if (have_residual) std::swap(basis[keep], basis[m_eff]);
    for (std::size_t i = 0; i < keep; ++i) basis[i] = std::move(kept[i]);
    if (!have_residual && !random_orthogonal_unit(basis[keep], locked, basis, keep, rng)) {
      throw NumericalError("top_k_eigenpairs: Krylov space collapsed during restart");
    }
    for (double& v : h.data()) v = 0.0;
    for (std::size_t i = 0; i < keep; ++i) {
      h(i, i) = theta[i];
      const double s = have_residual ? beta * ycoef(m_eff - 1, i) : 0.0;
      h(i, keep) = s;
      h(keep, i) = s;
    }
    j = keep;
    m_eff = m;
  }
}

}  // namespace

void canonicalize_signs(DenseMatrix& vectors) {
  for (std::size_t c = 0; c < vectors.cols(); ++c) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t r = 0; r < vectors.rows(); ++r) {
      const double v = std::abs(vectors(r, c));
      if (v > best) {
        best = v;
        arg = r;
      }
    }
    if (vectors.rows() > 0 && vectors(arg, c) < 0.0) {
      for (std::size_t r = 0; r < vectors.rows(); ++r) vectors(r, c) = -vectors(r, c);
    }
  }
}

EigenPairs top_k_eigenpairs(const SparseMatrix& l, std::size_t k, const SolverConfig& config) {
  const std::size_t n = l.dim();
  if (k < 1 || k >= n) {
    throw std::invalid_argument("top_k_eigenpairs: need 1 <= k < dim (k=" + std::to_string(k) +
                                ", dim=" + std::to_string(n) + ")");
  }
  if (!l.is_symmetric()) throw std::invalid_argument("top_k_eigenpairs: matrix is not symmetric");
  if (!(config.tol > 0.0)) throw std::invalid_argument("top_k_eigenpairs: tol must be positive");

  const std::size_t krylov = config.krylov_dim ? config.krylov_dim : std::max<std::size_t>(2 * k + 1, 20);
  UnitRng rng(config.seed);
  std::vector<Vec> locked;
  std::vector<double> locked_values;

  while (locked.size() < n) {
    const std::size_t need = k > locked.size() ? k - locked.size() : 0;
    RunOptions opt;
    opt.nev = std::max<std::size_t>(need, 1);
    opt.krylov_dim = std::max(krylov, opt.nev + 2);
    if (need == 0) {
      std::vector<double> sorted = locked_values;
      std::sort(sorted.begin(), sorted.end(), std::greater<>());
      opt.probe = true;
      opt.threshold = sorted[k - 1] + config.tol;
    }
    RunResult run = lanczos_run(l, locked, opt, config, rng);
    if (run.values.empty()) break;
    for (std::size_t i = 0; i < run.values.size(); ++i) {
      locked.push_back(std::move(run.vectors[i]));
      locked_values.push_back(run.values[i]);
    }
  }

  std::vector<std::size_t> order(locked.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return locked_values[a] > locked_values[b];
  });

  EigenPairs out;
  out.vectors = DenseMatrix(n, k);
  for (std::size_t c = 0; c < k; ++c) {
    const Vec& v = locked[order[c]];
    const double inv = 1.0 / norm(v);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v[r] * inv;
  }
  canonicalize_signs(out.vectors);

  Vec x(n), lx(n);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t r = 0; r < n; ++r) x[r] = out.vectors(r, c);
    spmv(l, x, lx);
    const double rq = dot(x, lx);
    axpy(-rq, x, lx);
    out.values.push_back(rq);
    out.residuals.push_back(norm(lx));
  }
  return out;
}

EigenPairs dense_eigen_oracle(const DenseMatrix& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("dense_eigen_oracle: matrix must be square");
  if (n > 512) throw std::invalid_argument("dense_eigen_oracle: dim > 512 is beyond test scale");
  double amax = 0.0;
  for (double v : a.data()) amax = std::max(amax, std::abs(v));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(a(i, j) - a(j, i)) > 1e-12 * std::max(amax, 1.0)) {
        throw std::invalid_argument("dense_eigen_oracle: matrix is not symmetric");
      }
    }
  }
  std::vector<double> work(a.data().begin(), a.data().end());
  std::vector<double> values, vectors;
  detail::jacobi_eigen(work, n, values, vectors);

  EigenPairs out;
  out.values = values;
  out.vectors = DenseMatrix(n, n);
  std::copy(vectors.begin(), vectors.end(), out.vectors.data().begin());
  canonicalize_signs(out.vectors);
  out.residuals.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = -values[c] * out.vectors(i, c);
      for (std::size_t j = 0; j < n; ++j) acc += a(i, j) * out.vectors(j, c);
      r2 += acc * acc;
    }
    out.residuals[c] = std::sqrt(r2);
  }
  return out;
}

void write_eigenpairs_csv(std::ostream& out, const EigenPairs& pairs) {
  const std::size_t dim = pairs.vectors.rows();
  out << "index,lambda";
  for (std::size_t i = 0; i < dim; ++i) out << ",v_" << i;
  out << '\n';
  for (std::size_t c = 0; c < pairs.values.size(); ++c) {
    out << c << ',' << csv::format_double(pairs.values[c]);
    for (std::size_t r = 0; r < dim; ++r) out << ',' << csv::format_double(pairs.vectors(r, c));
    out << '\n';
  }
}

}  // namespace relsim
