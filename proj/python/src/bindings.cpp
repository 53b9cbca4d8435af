#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "relsim/eigensolver.hpp"
#include "relsim/error.hpp"
#include "relsim/features.hpp"
#include "relsim/metrics.hpp"
#include "relsim/pipeline.hpp"
#include "relsim/run_config.hpp"

namespace py = pybind11;
using namespace relsim;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

DenseMatrix to_dense(const Array& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-d array");
  DenseMatrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), m.data().begin());
  return m;
}

Array to_array(const DenseMatrix& m) {
  Array out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

py::tuple pairs_tuple(const EigenPairs& p) { return py::make_tuple(p.values, to_array(p.vectors)); }

SparseMatrix square_sparse(const Array& a) {
  const DenseMatrix d = to_dense(a);
  if (d.rows() != d.cols()) throw std::invalid_argument("expected a square matrix");
  return SparseMatrix::from_dense(d);
}

using EdgeList = std::vector<std::tuple<std::size_t, std::size_t, std::uint64_t>>;

BipartiteGraph make_graph(const std::string& tag, std::vector<std::string> clinicians,
                          std::vector<std::string> patients, const EdgeList& edges) {
  std::vector<BipartiteGraph::Edge> e;
  e.reserve(edges.size());
  for (const auto& [c, p, w] : edges) e.push_back({c, p, w});
  return BipartiteGraph(tag, std::move(clinicians), std::move(patients), std::move(e));
}

RunConfig config_from(const std::map<std::string, std::string>& overrides) {
  RunConfig cfg;
  for (const auto& [k, v] : overrides) cfg.set(k, v);
  return cfg;
}

py::dict report_dict(const EvalReport& r) {
  py::dict hits, precision;
  for (const auto& [k, p] : r.at_k) {
    hits[py::int_(k)] = p.hits;
    precision[py::int_(k)] = p.precision;
  }
  py::dict d;
  d["pr_auc"] = r.pr_auc;
  d["hits"] = hits;
  d["precision"] = precision;
  d["n_pos"] = r.n_pos;
  d["n_neg"] = r.n_neg;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Graph-based relational-similarity features and evaluation metrics";

  auto base = py::register_exception<Error>(m, "RelsimError", PyExc_RuntimeError);
  py::register_exception<UsageError>(m, "UsageError", base.ptr());
  auto data = py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<UndefinedMetricError>(m, "UndefinedMetricError", data.ptr());
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", numerical.ptr());

  m.def("normalized_laplacian", [](const Array& a) { return to_array(normalized_laplacian(square_sparse(a)).to_dense()); },
        py::arg("adjacency"), "D^{-1/2} A D^{-1/2} of a dense symmetric adjacency matrix.");

  m.def(
      "top_k_eigenpairs",
      [](const Array& l, std::size_t k, double tol, std::size_t max_restarts, std::uint64_t seed) {
        SolverConfig cfg;
        cfg.tol = tol;
        cfg.max_restarts = max_restarts;
        cfg.seed = seed;
        return pairs_tuple(top_k_eigenpairs(square_sparse(l), k, cfg));
      },
      py::arg("matrix"), py::arg("k"), py::arg("tol") = 1e-8, py::arg("max_restarts") = 300, py::arg("seed") = 0,
      "(values, vectors) of the k algebraically largest eigenpairs, values descending.");

  m.def("dense_eigen", [](const Array& a) { return pairs_tuple(dense_eigen_oracle(to_dense(a))); },
        py::arg("matrix"), "Full eigendecomposition by cyclic Jacobi (small matrices only).");

  m.def(
      "extract_similarity_features",
      [](const std::vector<std::string>& patients,
         const std::vector<std::tuple<std::string, std::vector<std::string>, EdgeList>>& graphs, std::size_t k,
         std::uint64_t seed) {
        std::vector<BipartiteGraph> gs;
        for (const auto& [tag, clinicians, edges] : graphs) gs.push_back(make_graph(tag, clinicians, patients, edges));
        SolverConfig cfg;
        cfg.seed = seed;
        std::vector<SimilarityFeature> feats;
        {
          py::gil_scoped_release release;
          feats = extract_similarity_features(gs, k, cfg);
        }
        const std::size_t d = feats.empty() ? 0 : feats.front().vector.size();
        Array out({feats.size(), d});
        double* dst = out.mutable_data();
        for (const auto& f : feats) dst = std::copy(f.vector.begin(), f.vector.end(), dst);
        return out;
      },
      py::arg("patients"), py::arg("graphs"), py::arg("k") = 5, py::arg("seed") = 0,
      "Similarity matrix (patients x len(graphs)*k). Each graph is (tag, clinicians, "
      "[(clinician_index, patient_index, weight), ...]).");

  m.def("pr_auc", [](const std::vector<double>& s, const std::vector<int>& y) { return pr_auc(s, y); },
        py::arg("scores"), py::arg("labels"));
  m.def(
      "precision_at_k",
      [](const std::vector<double>& s, const std::vector<int>& y, const std::vector<std::string>& ids, std::size_t k) {
        const auto p = precision_at_k(s, y, ids, k);
        return py::make_tuple(p.hits, p.precision);
      },
      py::arg("scores"), py::arg("labels"), py::arg("ids"), py::arg("k"), "(hits, precision); ties go to the smaller id.");
  m.def("improvement_percent", &improvement_percent, py::arg("baseline_hits"), py::arg("proposed_hits"));
  m.def("format_improvement", &format_improvement, py::arg("pct"));

  m.def(
      "default_config",
      [] {
        const RunConfig cfg;
        py::dict d;
        for (const auto& info : describe_keys()) d[py::str(std::string(info.key))] = cfg.get(info.key);
        return d;
      },
      "Every configuration key with its default value as text.");

  m.def(
      "run_experiment",
      [](const std::map<std::string, std::string>& overrides) {
        const RunConfig cfg = config_from(overrides);
        ExperimentResult r;
        {
          py::gil_scoped_release release;
          r = run_experiment(cfg);
        }
        py::dict d;
        d["baseline"] = report_dict(r.baseline);
        d["proposed"] = report_dict(r.proposed);
        d["table"] = render_comparison_table(r.comparison, cfg.model_name);
        d["n_train_rows"] = r.n_train_rows;
        d["n_holdout_rows"] = r.n_holdout_rows;
        d["positive_rate"] = r.positive_rate;
        return d;
      },
      py::arg("overrides") = std::map<std::string, std::string>{},
      "In-memory synth-to-evaluation run. Overrides use config key names with text values.");
}
