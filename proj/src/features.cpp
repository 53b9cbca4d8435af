#include "relsim/features.hpp"

#include <cmath>
#include <iostream>
#include <ostream>
#include <stdexcept>

#include "relsim/csv.hpp"
#include "relsim/error.hpp"

namespace relsim {

EmbeddingMatrix row_normalize(EmbeddingMatrix x) {
  if (x.row_norm_applied) {
    throw std::logic_error("row_normalize: embedding '" + x.graph_tag + "' is already normalized");
  }
  for (std::size_t r = 0; r < x.rows.rows(); ++r) {
    auto row = x.rows.row(r);
    double ss = 0.0;
    for (double v : row) ss += v * v;
    if (ss == 0.0) continue;
    const double inv = 1.0 / std::sqrt(ss);
    for (double& v : row) v *= inv;
  }
  x.row_norm_applied = true;
  return x;
}

EmbeddingMatrix spectral_embedding(const BipartiteGraph& g, std::size_t k, const SolverConfig& solver) {
  if (k == 0) throw std::invalid_argument("spectral_embedding: k must be >= 1");
  const SparseMatrix lap = normalized_laplacian(adjacency_matrix(g));
  const std::size_t dim = lap.dim();

  // Restrict to vertices with at least one edge.
  std::vector<std::size_t> active;
  std::vector<std::size_t> compact(dim, 0);
  const auto offsets = lap.row_offsets();
  for (std::size_t i = 0; i < dim; ++i) {
    if (offsets[i + 1] > offsets[i]) {
      compact[i] = active.size();
      active.push_back(i);
    }
  }

  EmbeddingMatrix out{g.tag(), DenseMatrix(dim, k), false};
  const std::size_t n = active.size();
  if (n == 0) {
    std::clog << "warning: graph '" << g.tag() << "' has no edges; its feature block is zero\n";
    return out;
  }

  std::vector<SparseMatrix::Triplet> triplets;
  triplets.reserve(lap.nnz());
  const auto cols = lap.column_indices();
  const auto vals = lap.values();
  for (std::size_t i : active) {
    for (std::size_t p = offsets[i]; p < offsets[i + 1]; ++p) {
      triplets.push_back({compact[i], compact[cols[p]], vals[p]});
    }
  }
  const SparseMatrix sub = SparseMatrix::from_triplets(n, std::move(triplets));

  EigenPairs pairs;
  std::size_t used = k;
  if (n <= k) {
    std::clog << "warning: graph '" << g.tag() << "' has only " << n
              << " connected vertices; padding its feature block from " << n << " to " << k
              << " columns\n";
    pairs = dense_eigen_oracle(sub.to_dense());
    used = n;
  } else {
    pairs = top_k_eigenpairs(sub, k, solver);
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t c = 0; c < used; ++c) out.rows(active[a], c) = pairs.vectors(a, c);
  }
  return out;
}

std::vector<SimilarityFeature> extract_similarity_features(std::span<const BipartiteGraph> graphs,
                                                           std::size_t k, const SolverConfig& solver) {
  if (k == 0) throw std::invalid_argument("extract_similarity_features: k must be >= 1");
  if (graphs.empty()) throw std::invalid_argument("extract_similarity_features: no graphs given");
  const auto& patients = graphs.front().patients();
  for (const auto& g : graphs) {
    if (g.patients() != patients) {
      throw std::invalid_argument("extract_similarity_features: graph '" + g.tag() +
                                  "' does not share the patient list of '" +
                                  graphs.front().tag() + "'");
    }
  }

  std::vector<SimilarityFeature> features(patients.size());
  for (std::size_t j = 0; j < patients.size(); ++j) {
    features[j].patient_id = patients[j];
    features[j].vector.reserve(graphs.size() * k);
  }
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const BipartiteGraph& g = graphs[gi];
    SolverConfig cfg = solver;
    cfg.seed = solver.seed + gi;
    EmbeddingMatrix x;
    try {
      x = row_normalize(spectral_embedding(g, k, cfg));
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("graph '" + g.tag() + "': " + e.what(), e.best_residuals());
    } catch (const NumericalError& e) {
      throw NumericalError("graph '" + g.tag() + "': " + e.what());
    }
    const std::size_t m = g.num_clinicians();
    for (std::size_t j = 0; j < patients.size(); ++j) {
      const auto row = x.rows.row(m + j);
      features[j].vector.insert(features[j].vector.end(), row.begin(), row.end());
    }
  }
  return features;
}

void write_features_csv(std::ostream& out, std::span<const SimilarityFeature> features) {
  const std::size_t d = features.empty() ? 0 : features.front().vector.size();
  out << "patient_id";
  for (std::size_t i = 0; i < d; ++i) out << ",f" << i;
  out << '\n';
  for (const auto& f : features) {
    if (f.vector.size() != d) throw std::invalid_argument("write_features_csv: ragged feature rows");
    out << f.patient_id;
    for (double v : f.vector) out << ',' << csv::format_double(v);
    out << '\n';
  }
}

void save_features(const std::filesystem::path& path, std::span<const SimilarityFeature> features) {
  auto out = csv::open_output(path);
  write_features_csv(out, features);
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

std::vector<SimilarityFeature> load_features(const std::filesystem::path& path) {
  auto in = csv::open_input(path);
  const std::string source = path.string();
  std::string header;
  if (!std::getline(in, header)) throw DataError(source + ": missing header row");
  const auto names = csv::split(header);
  if (names.empty() || names[0] != "patient_id") {
    throw DataError(source + ": line 1: header must start with 'patient_id'");
  }
  for (std::size_t i = 1; i < names.size(); ++i) {
    if (names[i] != "f" + std::to_string(i - 1)) {
      throw DataError(source + ": line 1: unexpected column '" + std::string(names[i]) + "'");
    }
  }
  const std::size_t d = names.size() - 1;
  std::vector<SimilarityFeature> out;
  csv::LineReader reader(in, 1);
  std::string line;
  while (reader.next(line)) {
    const std::string where = source + ": line " + std::to_string(reader.line_number());
    const auto f = csv::split(line);
    if (f.size() != d + 1) throw DataError(where + ": expected " + std::to_string(d + 1) + " columns");
    SimilarityFeature feat;
    feat.patient_id = std::string(f[0]);
    feat.vector.reserve(d);
    for (std::size_t i = 1; i <= d; ++i) feat.vector.push_back(csv::parse_double(f[i], where));
    out.push_back(std::move(feat));
  }
  return out;
}

}  // namespace relsim
