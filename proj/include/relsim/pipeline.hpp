#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "relsim/bipartite_graph.hpp"
#include "relsim/cohort.hpp"
#include "relsim/eigensolver.hpp"
#include "relsim/features.hpp"
#include "relsim/logistic.hpp"
#include "relsim/metrics.hpp"
#include "relsim/run_config.hpp"

namespace relsim {

// ---------------------------------------------------------------------------
// Building blocks shared by the file-based stages and the in-memory runner.

std::vector<Interval> study_intervals(const RunConfig& cfg);

/// Graph window used for features of interval `t`. Snapshot mode always
/// returns the look-back before the hold-out interval.
Interval graph_window(const RunConfig& cfg, std::span<const Interval> intervals, std::size_t t);

/// Sorted, de-duplicated patient ids of the cohort rows.
std::vector<std::string> cohort_universe(std::span<const CohortRow> rows);

std::vector<BipartiteGraph> build_graphs(std::span<const VisitEvent> events, const RunConfig& cfg,
                                         std::span<const std::string> universe, Interval window);

SolverConfig solver_config(const RunConfig& cfg);

/// Similarity features per graph window: one entry in snapshot mode, one
/// per interval otherwise.
using SimilaritySets = std::vector<std::vector<SimilarityFeature>>;

/// "<role>:<clinician>" keys of the `n` most visited clinicians per role in
/// the given windows (count descending, id ascending).
std::vector<std::string> top_clinicians(std::span<const VisitEvent> events, std::span<const Interval> windows,
                                        std::span<const Role> roles, std::size_t n);

/// Column names of the baseline design. Demographic columns appear only
/// `with_profiles`.
std::vector<std::string> baseline_schema(const BowVocabulary& vocab, bool with_profiles,
                                         std::span<const std::string> clinician_keys);
/// `sim:f0` .. `sim:f{dim-1}`.
std::vector<std::string> similarity_schema(std::size_t dim);

/// Assembles design matrices from a schema of column names, so a saved model
/// file alone determines how hold-out rows are encoded.
class DesignBuilder {
 public:
  DesignBuilder(std::span<const VisitEvent> events, std::vector<Interval> intervals,
                std::int32_t lookback_days, std::size_t n_quarters);

  void set_profiles(std::span<const PatientProfile> profiles);
  void set_similarity(const SimilaritySets& sets);

  /// Throws DataError on unknown column names or missing patient data.
  DenseMatrix build(std::span<const std::string> schema, std::span<const CohortRow> rows) const;

 private:
  std::span<const VisitEvent> events_;
  std::vector<Interval> intervals_;
  std::int32_t lookback_days_;
  std::size_t n_quarters_;
  std::map<std::string, PatientProfile> profiles_;
  std::vector<std::map<std::string, std::vector<double>>> similarity_;
};

struct TrainedModel {
  LinearModel model;
  Standardizer standardizer;
};

struct TrainedPair {
  BowVocabulary vocabulary;
  TrainedModel baseline;
  TrainedModel proposed;
};

/// Fits the vocabulary and clinician columns on training intervals, then
/// trains the baseline and the similarity-augmented model.
TrainedPair train_models(const RunConfig& cfg, std::span<const VisitEvent> events,
                         std::span<const Interval> intervals, std::span<const CohortRow> rows,
                         std::span<const PatientProfile> profiles, const SimilaritySets& similarity);

struct HoldoutScores {
  std::vector<std::string> ids;
  std::vector<int> labels;
  std::vector<double> scores;
};

HoldoutScores score_holdout(const TrainedModel& m, const DesignBuilder& builder,
                            std::span<const CohortRow> holdout_rows);

/// Metric ks that fit in `n` rows; the others are dropped with a warning.
std::vector<std::size_t> usable_ks(std::span<const std::size_t> ks, std::size_t n);

// ---------------------------------------------------------------------------
// In-memory end-to-end run.

struct ExperimentResult {
  EvalReport baseline;
  EvalReport proposed;
  Comparison comparison;
  std::size_t n_train_rows = 0;
  std::size_t n_holdout_rows = 0;
  double positive_rate = 0.0;  // over every cohort row
};

/// synth, cohort, graphs, features, training and evaluation without files.
ExperimentResult run_experiment(const RunConfig& cfg);

// ---------------------------------------------------------------------------
// File-based stages. Each reads its inputs from the work directory and
// writes documented artifacts; progress lines go to `log`.

void cmd_synth(const RunConfig& cfg, std::ostream& log);
void cmd_graphs(const RunConfig& cfg, std::ostream& log);
void cmd_extract(const RunConfig& cfg, std::ostream& log);
void cmd_train(const RunConfig& cfg, std::ostream& log);
void cmd_evaluate(const RunConfig& cfg, std::ostream& log);
void cmd_compare(const RunConfig& cfg, std::ostream& out);
void cmd_all(const RunConfig& cfg, std::ostream& log);

/// Artifact paths inside the work directory.
namespace artifacts {
std::filesystem::path demographics(const RunConfig& cfg);
std::filesystem::path cohort(const RunConfig& cfg);
std::filesystem::path universe(const RunConfig& cfg);
/// `t` is ignored in snapshot mode.
std::filesystem::path graph(const RunConfig& cfg, Role role, std::size_t t);
std::filesystem::path features(const RunConfig& cfg, std::size_t t);
std::filesystem::path vocabulary(const RunConfig& cfg);
std::filesystem::path model(const RunConfig& cfg, std::string_view which);
std::filesystem::path report(const RunConfig& cfg, std::string_view which);
}  // namespace artifacts

}  // namespace relsim
