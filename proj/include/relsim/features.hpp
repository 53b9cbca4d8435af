#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "relsim/bipartite_graph.hpp"
#include "relsim/dense_matrix.hpp"
#include "relsim/eigensolver.hpp"

namespace relsim {

/// Spectral embedding of one graph: one row per vertex (clinicians first,
/// then patients), one column per eigenvector.
struct EmbeddingMatrix {
  std::string graph_tag;
  DenseMatrix rows;
  bool row_norm_applied = false;
};

/// Relational-similarity vector of one patient: its embedding rows from each
/// graph, concatenated in graph order.
struct SimilarityFeature {
  std::string patient_id;
  std::vector<double> vector;

  friend bool operator==(const SimilarityFeature&, const SimilarityFeature&) = default;
};

/// Scales every nonzero row to unit L2 norm; zero rows stay zero.
/// Throws std::logic_error if the matrix was already normalized.
EmbeddingMatrix row_normalize(EmbeddingMatrix x);

/// Top-k eigenvectors of D^{-1/2} A D^{-1/2} for one graph, before row
/// normalization. Zero-degree vertices are left out of the eigenproblem and
/// get zero rows. When fewer than k+1 vertices carry edges, every available
/// eigenvector is used and the remaining columns are zero-padded.
EmbeddingMatrix spectral_embedding(const BipartiteGraph& g, std::size_t k,
                                   const SolverConfig& solver = {});

/// Runs the full extraction over all graphs: adjacency, normalized
/// Laplacian, top-k eigenvectors, row normalization, patient rows. Returns
/// one feature of length graphs.size() * k per patient, in universe order.
///
/// Throws std::invalid_argument if the graphs do not share one patient list
/// or k == 0. Solver failures are rethrown with the graph tag prepended.
std::vector<SimilarityFeature> extract_similarity_features(std::span<const BipartiteGraph> graphs,
                                                           std::size_t k,
                                                           const SolverConfig& solver = {});

/// Header `patient_id,f0,...,f{d-1}`, values with 17 significant digits.
void write_features_csv(std::ostream& out, std::span<const SimilarityFeature> features);
void save_features(const std::filesystem::path& path, std::span<const SimilarityFeature> features);
std::vector<SimilarityFeature> load_features(const std::filesystem::path& path);

}  // namespace relsim
