#include <cmath>
#include <filesystem>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "relsim/error.hpp"
#include "relsim/features.hpp"

using namespace relsim;

namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Second graph over the same patients with different clinicians.
BipartiteGraph companion(const BipartiteGraph& g, std::uint64_t seed) {
  const auto other = oracle::random_connected_bipartite(seed, g.num_patients() + 12);
  // Keep the clinician side of `other`, remap its patient indices onto g's.
  std::vector<BipartiteGraph::Edge> edges;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& e : other.edges()) {
    const std::size_t p = e.patient % g.num_patients();
    if (seen.insert({e.clinician, p}).second) edges.push_back({e.clinician, p, e.weight});
  }
  return BipartiteGraph("follow", other.clinicians(), g.patients(), edges);
}

}  // namespace

TEST_CASE("row_normalize examples") {
  EmbeddingMatrix x{"t", DenseMatrix(2, 2), false};
  x.rows(0, 0) = 3;
  x.rows(0, 1) = 4;
  const auto y = row_normalize(x);
  CHECK(y.rows(0, 0) == doctest::Approx(0.6));
  CHECK(y.rows(0, 1) == doctest::Approx(0.8));
  CHECK(y.rows(1, 0) == 0.0);
  CHECK(y.rows(1, 1) == 0.0);
  CHECK(y.row_norm_applied);
  CHECK_THROWS_AS(row_normalize(y), std::logic_error);
}

TEST_CASE("row_normalize gives unit rows on random matrices") {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 20; ++rep) {
    EmbeddingMatrix x{"t", DenseMatrix(10, 5), false};
    for (double& v : x.rows.data()) v = nd(rng) * std::pow(10.0, static_cast<int>(rng() % 9) - 4);
    for (std::size_t c = 0; c < 5; ++c) x.rows(3, c) = 0.0;
    const auto y = row_normalize(x);
    for (std::size_t r = 0; r < 10; ++r) {
      if (r == 3) {
        CHECK(norm(y.rows.row(r)) == 0.0);
      } else {
        CHECK(std::abs(norm(y.rows.row(r)) - 1.0) <= 1e-12);
      }
    }
  }
}

TEST_CASE("K=2, k=5 gives 10-entry vectors in universe order") {
  const auto g = oracle::random_connected_bipartite(1, 80);
  const auto f = companion(g, 2);
  const std::vector<BipartiteGraph> graphs = {g, f};
  const auto feats = extract_similarity_features(graphs, 5);
  REQUIRE(feats.size() == g.num_patients());
  for (std::size_t j = 0; j < feats.size(); ++j) {
    CHECK(feats[j].patient_id == g.patients()[j]);
    CHECK(feats[j].vector.size() == 10);
  }
}

TEST_CASE("each graph block is a unit row of the embedding or zero") {
  const auto g = oracle::random_connected_bipartite(4, 90);
  const std::vector<BipartiteGraph> graphs = {g, companion(g, 5)};
  for (const auto& f : extract_similarity_features(graphs, 5)) {
    for (std::size_t b = 0; b < 2; ++b) {
      const double n = norm(std::span<const double>(f.vector).subspan(5 * b, 5));
      CHECK((n == 0.0 || std::abs(n - 1.0) <= 1e-12));
    }
  }
}

TEST_CASE("patient isolated in both graphs gets the zero vector") {
  auto g = oracle::random_connected_bipartite(6, 50);
  auto patients = g.patients();
  patients.push_back("zz_isolated");
  const BipartiteGraph gi("diag", g.clinicians(), patients, g.edges());
  const std::vector<BipartiteGraph> graphs = {gi, companion(gi, 8)};
  // companion() may connect the extra patient; rebuild it without those edges.
  std::vector<BipartiteGraph::Edge> edges;
  for (const auto& e : graphs[1].edges())
    if (e.patient != patients.size() - 1) edges.push_back(e);
  const std::vector<BipartiteGraph> both = {
      gi, BipartiteGraph("follow", graphs[1].clinicians(), patients, edges)};
  const auto feats = extract_similarity_features(both, 5);
  CHECK(feats.back().patient_id == "zz_isolated");
  CHECK(feats.back().vector == std::vector<double>(10, 0.0));
}

TEST_CASE("patients with identical visit profiles get identical vectors") {
  const auto base = oracle::random_connected_bipartite(12, 70);
  // Duplicate patient 0 as a new patient with the same clinician counts.
  auto patients = base.patients();
  patients.push_back("p_twin");
  auto edges = base.edges();
  for (const auto& e : base.edges())
    if (e.patient == 0) edges.push_back({e.clinician, patients.size() - 1, e.weight});
  const BipartiteGraph g("diag", base.clinicians(), patients, edges);
  const auto f = companion(g, 13);
  const std::size_t twin = patients.size() - 1;
  std::vector<BipartiteGraph::Edge> fe;
  for (const auto& e : f.edges())
    if (e.patient != twin) fe.push_back(e);
  for (const auto& e : f.edges())
    if (e.patient == 0) fe.push_back({e.clinician, twin, e.weight});
  const std::vector<BipartiteGraph> graphs = {g, BipartiteGraph("follow", f.clinicians(), patients, fe)};
  const auto feats = extract_similarity_features(graphs, 5);
  for (std::size_t c = 0; c < 10; ++c) CHECK(std::abs(feats.front().vector[c] - feats.back().vector[c]) <= 1e-8);
}

TEST_CASE("scaling every weight leaves the features unchanged") {
  const auto g = oracle::random_connected_bipartite(20, 60);
  auto edges = g.edges();
  for (auto& e : edges) e.weight *= 3;
  const BipartiteGraph h("rand", g.clinicians(), g.patients(), edges);
  const std::vector<BipartiteGraph> a = {g};
  const std::vector<BipartiteGraph> b = {h};
  const auto fa = extract_similarity_features(a, 5);
  const auto fb = extract_similarity_features(b, 5);
  for (std::size_t j = 0; j < fa.size(); ++j)
    for (std::size_t c = 0; c < 5; ++c) CHECK(std::abs(fa[j].vector[c] - fb[j].vector[c]) <= 1e-8);
}

TEST_CASE("small graphs pad the missing eigenvectors with zeros") {
  const BipartiteGraph g("diag", {"c1"}, {"p1", "p2", "p3"}, {{0, 0, 1}, {0, 1, 2}});
  const auto emb = spectral_embedding(g, 5);
  CHECK(emb.rows.cols() == 5);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 3; c < 5; ++c) CHECK(emb.rows(r, c) == 0.0);
  for (std::size_t c = 0; c < 5; ++c) CHECK(emb.rows(3, c) == 0.0);  // p3 isolated

  const BipartiteGraph empty("follow", {}, {"p1", "p2", "p3"}, {});
  const std::vector<BipartiteGraph> graphs = {g, empty};
  const auto feats = extract_similarity_features(graphs, 5);
  for (const auto& f : feats) {
    CHECK(f.vector.size() == 10);
    for (std::size_t c = 5; c < 10; ++c) CHECK(f.vector[c] == 0.0);
  }
}

TEST_CASE("extraction is deterministic and argument errors are reported") {
  const auto g = oracle::random_connected_bipartite(30, 100);
  const std::vector<BipartiteGraph> graphs = {g, companion(g, 31)};
  CHECK(extract_similarity_features(graphs, 5) == extract_similarity_features(graphs, 5));
  CHECK_THROWS_AS(extract_similarity_features(graphs, 0), std::invalid_argument);
  const std::vector<BipartiteGraph> none;
  CHECK_THROWS_AS(extract_similarity_features(none, 5), std::invalid_argument);
  const BipartiteGraph other("x", {"c"}, {"q"}, {{0, 0, 1}});
  const std::vector<BipartiteGraph> mismatched = {g, other};
  CHECK_THROWS_AS(extract_similarity_features(mismatched, 5), std::invalid_argument);
}

TEST_CASE("features CSV round-trips exactly") {
  const auto g = oracle::random_connected_bipartite(40, 60);
  const std::vector<BipartiteGraph> graphs = {g, companion(g, 41)};
  const auto feats = extract_similarity_features(graphs, 5);
  const auto path = std::filesystem::temp_directory_path() / "relsim_features_rt.csv";
  save_features(path, feats);
  CHECK(load_features(path) == feats);
  std::ostringstream out;
  write_features_csv(out, feats);
  CHECK(out.str().substr(0, out.str().find('\n')) == "patient_id,f0,f1,f2,f3,f4,f5,f6,f7,f8,f9");
  std::filesystem::remove(path);
}
