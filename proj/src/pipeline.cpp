#include "relsim/pipeline.hpp"

#include <algorithm>
#include <iostream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "relsim/csv.hpp"
#include "relsim/error.hpp"
#include "relsim/random.hpp"
#include "relsim/synth.hpp"

namespace relsim {

namespace {

// Re-raises `f`'s library errors with the stage name prepended, keeping the
// exception type so the CLI maps it to the right exit code.
template <class F>
auto in_stage(std::string_view stage, F&& f) {
  const std::string p = std::string(stage) + ": ";
  try {
    return f();
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(p + e.what(), e.best_residuals());
  } catch (const NumericalError& e) {
    throw NumericalError(p + e.what());
  } catch (const UndefinedMetricError& e) {
    throw UndefinedMetricError(p + e.what());
  } catch (const DataError& e) {
    throw DataError(p + e.what());
  } catch (const UsageError& e) {
    throw UsageError(p + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(p + e.what());
  }
}

std::size_t holdout_index(std::span<const Interval> intervals) { return intervals.size() - 1; }

std::size_t n_windows(const RunConfig& cfg) {
  return cfg.graph_window == GraphWindow::Snapshot ? 1 : cfg.n_intervals;
}

std::vector<CohortRow> rows_where(std::span<const CohortRow> rows, bool holdout, std::size_t h) {
  std::vector<CohortRow> out;
  for (const auto& r : rows) {
    if ((r.interval_index == h) == holdout) out.push_back(r);
  }
  return out;
}

std::vector<int> labels_of(std::span<const CohortRow> rows) {
  std::vector<int> y;
  y.reserve(rows.size());
  for (const auto& r : rows) y.push_back(r.label);
  return y;
}

SynthConfig synth_config(const RunConfig& cfg) {
  SynthConfig s = cfg.synth;
  s.study_start = cfg.study_start;
  s.study_end = cfg.study_end;
  s.n_intervals = cfg.n_intervals;
  s.seed = cfg.seed;
  return s;
}

SimilaritySets compute_similarity(const RunConfig& cfg, std::span<const VisitEvent> events,
                                  std::span<const Interval> intervals, std::span<const std::string> universe) {
  SimilaritySets sets;
  for (std::size_t w = 0; w < n_windows(cfg); ++w) {
    const auto graphs = build_graphs(events, cfg, universe, graph_window(cfg, intervals, w));
    SolverConfig solver = solver_config(cfg);
    solver.seed += w * cfg.graphs.size();
    sets.push_back(extract_similarity_features(graphs, cfg.k, solver));
  }
  return sets;
}

std::vector<PatientProfile> load_profiles_if_present(const RunConfig& cfg) {
  const auto path = artifacts::demographics(cfg);
  if (!std::filesystem::exists(path)) {
    std::clog << "warning: " << path.string() << " not found; demographic columns are left out\n";
    return {};
  }
  return load_profiles(path);
}

SimilaritySets load_similarity(const RunConfig& cfg) {
  SimilaritySets sets;
  for (std::size_t w = 0; w < n_windows(cfg); ++w) sets.push_back(load_features(artifacts::features(cfg, w)));
  return sets;
}

void save_scores(const std::filesystem::path& path, const HoldoutScores& s) {
  auto out = csv::open_output(path);
  out << "patient_id,label,score\n";
  for (std::size_t i = 0; i < s.ids.size(); ++i) {
    out << s.ids[i] << ',' << s.labels[i] << ',' << csv::format_double(s.scores[i]) << '\n';
  }
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

void save_curves(const RunConfig& cfg, std::string_view which, const HoldoutScores& s) {
  {
    auto out = csv::open_output(cfg.workdir / ("pr_curve_" + std::string(which) + ".csv"));
    out << "threshold,precision,recall\n";
    for (const auto& p : pr_curve(s.scores, s.labels)) {
      out << csv::format_double(p.threshold) << ',' << csv::format_double(p.precision) << ','
          << csv::format_double(p.recall) << '\n';
    }
  }
  auto out = csv::open_output(cfg.workdir / ("precision_at_k_" + std::string(which) + ".csv"));
  out << "k,hits,precision\n";
  const auto hits = hits_curve(s.scores, s.labels, s.ids);
  for (std::size_t k = 1; k <= hits.size(); ++k) {
    out << k << ',' << hits[k - 1] << ','
        << csv::format_double(static_cast<double>(hits[k - 1]) / static_cast<double>(k)) << '\n';
  }
}

constexpr std::string_view kModels[] = {"baseline", "proposed"};

}  // namespace

// ---------------------------------------------------------------------------

std::vector<Interval> study_intervals(const RunConfig& cfg) {
  return split_intervals(cfg.study_start, cfg.study_end, cfg.n_intervals);
}

Interval graph_window(const RunConfig& cfg, std::span<const Interval> intervals, std::size_t t) {
  const std::size_t anchor = cfg.graph_window == GraphWindow::Snapshot ? holdout_index(intervals) : t;
  return lookback_window(intervals[anchor], cfg.lookback_days);
}

std::vector<std::string> cohort_universe(std::span<const CohortRow> rows) {
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  for (const auto& r : rows) ids.push_back(r.patient_id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::vector<BipartiteGraph> build_graphs(std::span<const VisitEvent> events, const RunConfig& cfg,
                                         std::span<const std::string> universe, Interval window) {
  std::vector<BipartiteGraph> graphs;
  for (Role role : cfg.graphs) graphs.push_back(build_bipartite_graph(events, role, universe, window));
  return graphs;
}

SolverConfig solver_config(const RunConfig& cfg) {
  SolverConfig s;
  s.tol = cfg.solver_tol;
  s.max_restarts = cfg.solver_max_restarts;
  s.krylov_dim = cfg.solver_krylov_dim;
  s.seed = derive_seed(cfg.seed, "eigensolver");
  return s;
}

std::vector<std::string> top_clinicians(std::span<const VisitEvent> events, std::span<const Interval> windows,
                                        std::span<const Role> roles, std::size_t n) {
  std::vector<std::string> keys;
  for (Role role : roles) {
    std::unordered_map<std::string_view, std::size_t> counts;
    for (const auto& e : events) {
      if (e.role != role || e.clinician_id.empty()) continue;
      const bool inside = std::any_of(windows.begin(), windows.end(),
                                      [&](const Interval& w) { return w.contains(e.date); });
      if (inside) ++counts[e.clinician_id];
    }
    std::vector<std::pair<std::string_view, std::size_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    for (std::size_t i = 0; i < std::min(n, ranked.size()); ++i) {
      keys.push_back(std::string(role_tag(role)) + ":" + std::string(ranked[i].first));
    }
  }
  return keys;
}

std::vector<std::string> baseline_schema(const BowVocabulary& vocab, bool with_profiles,
                                         std::span<const std::string> clinician_keys) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < vocab.size(); ++i) names.push_back(vocab.feature_name(i));
  if (with_profiles) {
    for (std::size_t b = 0; b < kAgeBuckets; ++b) names.push_back("age:" + std::to_string(b));
    for (int g = 0; g < 2; ++g) names.push_back("gender:" + std::to_string(g));
    for (std::size_t j = 0; j < kMedicalCovariates; ++j) {
      names.push_back((j < 10 ? "cov:0" : "cov:") + std::to_string(j));
    }
  }
  for (const auto& key : clinician_keys) names.push_back("clin:" + key);
  return names;
}

std::vector<std::string> similarity_schema(std::size_t dim) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < dim; ++i) names.push_back("sim:f" + std::to_string(i));
  return names;
}

// ---------------------------------------------------------------------------

DesignBuilder::DesignBuilder(std::span<const VisitEvent> events, std::vector<Interval> intervals,
                             std::int32_t lookback_days, std::size_t n_quarters)
    : events_(events), intervals_(std::move(intervals)), lookback_days_(lookback_days), n_quarters_(n_quarters) {}

void DesignBuilder::set_profiles(std::span<const PatientProfile> profiles) {
  profiles_.clear();
  for (const auto& p : profiles) profiles_.emplace(p.patient_id, p);
}

void DesignBuilder::set_similarity(const SimilaritySets& sets) {
  similarity_.clear();
  for (const auto& set : sets) {
    auto& m = similarity_.emplace_back();
    for (const auto& f : set) m.emplace(f.patient_id, f.vector);
  }
}

namespace {

struct Column {
  enum Kind { Bow, Age, Gender, Cov, Clin, Sim } kind;
  std::size_t index = 0;    // quarter, bucket, covariate, or similarity slot
  std::string key;          // code or clinician key
};

std::size_t parse_index(std::string_view s, const std::string& name) {
  const long long v = csv::parse_int(s, "feature '" + name + "'");
  if (v < 0) throw DataError("feature '" + name + "': negative index");
  return static_cast<std::size_t>(v);
}

Column parse_column(const std::string& name, std::size_t n_quarters) {
  const std::string_view s = name;
  auto after = [&](std::string_view prefix) { return s.substr(prefix.size()); };
  if (s.starts_with("bow:q")) {
    const auto rest = after("bow:q");
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw DataError("malformed feature name '" + name + "'");
    const std::size_t q = parse_index(rest.substr(0, colon), name);
    if (q < 1 || q > n_quarters) throw DataError("feature '" + name + "': quarter out of range");
    return {Column::Bow, q - 1, std::string(rest.substr(colon + 1))};
  }
  if (s.starts_with("age:")) {
    const std::size_t b = parse_index(after("age:"), name);
    if (b >= kAgeBuckets) throw DataError("feature '" + name + "': age bucket out of range");
    return {Column::Age, b, {}};
  }
  if (s.starts_with("gender:")) {
    const std::size_t g = parse_index(after("gender:"), name);
    if (g > 1) throw DataError("feature '" + name + "': gender out of range");
    return {Column::Gender, g, {}};
  }
  if (s.starts_with("cov:")) {
    const std::size_t j = parse_index(after("cov:"), name);
    if (j >= kMedicalCovariates) throw DataError("feature '" + name + "': covariate out of range");
    return {Column::Cov, j, {}};
  }
  if (s.starts_with("clin:")) return {Column::Clin, 0, std::string(after("clin:"))};
  if (s.starts_with("sim:f")) return {Column::Sim, parse_index(after("sim:f"), name), {}};
  throw DataError("unknown feature name '" + name + "'");
}

}  // namespace

DenseMatrix DesignBuilder::build(std::span<const std::string> schema, std::span<const CohortRow> rows) const {
  std::vector<Column> cols;
  cols.reserve(schema.size());
  for (const auto& name : schema) cols.push_back(parse_column(name, n_quarters_));

  BowVocabulary vocab;
  vocab.n_quarters = n_quarters_;
  std::unordered_map<std::string, std::size_t> clin_col;
  bool need_profiles = false;
  bool need_similarity = false;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    switch (cols[c].kind) {
      case Column::Bow: vocab.codes.push_back(cols[c].key); break;
      case Column::Clin: clin_col.emplace(cols[c].key, c); break;
      case Column::Sim: need_similarity = true; break;
      default: need_profiles = true; break;
    }
  }
  std::sort(vocab.codes.begin(), vocab.codes.end());
  vocab.codes.erase(std::unique(vocab.codes.begin(), vocab.codes.end()), vocab.codes.end());
  std::vector<std::ptrdiff_t> bow_col(vocab.size(), -1);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c].kind == Column::Bow) bow_col[*vocab.index(cols[c].index, cols[c].key)] = static_cast<std::ptrdiff_t>(c);
  }
  if (need_similarity && similarity_.empty()) throw DataError("design: similarity features were not provided");

  DenseMatrix x(rows.size(), cols.size());
  const BowOptions bow_opts{lookback_days_, n_quarters_, 0.0};

  for (std::size_t t = 0; t < intervals_.size(); ++t) {
    std::unordered_map<std::string_view, std::size_t> row_of;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].interval_index == t) row_of.emplace(rows[r].patient_id, r);
    }
    if (row_of.empty()) continue;
    const Interval window = lookback_window(intervals_[t], lookback_days_);

    if (!vocab.codes.empty()) {
      for (const auto& [patient, counts] : build_bow_features(events_, intervals_[t], vocab, bow_opts)) {
        const auto it = row_of.find(patient);
        if (it == row_of.end()) continue;
        for (const auto& [idx, v] : counts) x(it->second, static_cast<std::size_t>(bow_col[idx])) = v;
      }
    }
    if (!clin_col.empty()) {
      std::string key;
      for (const auto& e : events_) {
        if (e.role == Role::NA || e.clinician_id.empty() || !window.contains(e.date)) continue;
        const auto it = row_of.find(e.patient_id);
        if (it == row_of.end()) continue;
        key.assign(role_tag(e.role));
        key += ':';
        key += e.clinician_id;
        const auto c = clin_col.find(key);
        if (c != clin_col.end()) x(it->second, c->second) = 1.0;
      }
    }
    const auto* sim = need_similarity ? &similarity_[similarity_.size() == 1 ? 0 : t] : nullptr;
    if (need_similarity && similarity_.size() != 1 && t >= similarity_.size()) {
      throw DataError("design: no similarity set for interval " + std::to_string(t));
    }
    for (const auto& [patient, r] : row_of) {
      const PatientProfile* prof = nullptr;
      if (need_profiles) {
        const auto it = profiles_.find(std::string(patient));
        if (it == profiles_.end()) {
          throw DataError("design: no demographics for patient '" + std::string(patient) + "'");
        }
        prof = &it->second;
      }
      const std::vector<double>* vec = nullptr;
      if (sim) {
        const auto it = sim->find(std::string(patient));
        if (it == sim->end()) {
          throw DataError("design: no similarity feature for patient '" + std::string(patient) + "'");
        }
        vec = &it->second;
      }
      for (std::size_t c = 0; c < cols.size(); ++c) {
        const Column& col = cols[c];
        switch (col.kind) {
          case Column::Age: x(r, c) = prof->age_bucket == static_cast<int>(col.index); break;
          case Column::Gender: x(r, c) = prof->gender == static_cast<int>(col.index); break;
          case Column::Cov: x(r, c) = prof->covariates[col.index]; break;
          case Column::Sim:
            if (col.index >= vec->size()) {
              throw DataError("design: similarity feature of '" + std::string(patient) + "' is too short");
            }
            x(r, c) = (*vec)[col.index];
            break;
          default: break;
        }
      }
    }
  }
  for (const auto& r : rows) {
    if (r.interval_index >= intervals_.size()) {
      throw DataError("design: cohort row for '" + r.patient_id + "' names interval " +
                      std::to_string(r.interval_index) + " of " + std::to_string(intervals_.size()));
    }
  }
  return x;
}

// ---------------------------------------------------------------------------

TrainedPair train_models(const RunConfig& cfg, std::span<const VisitEvent> events,
                         std::span<const Interval> intervals, std::span<const CohortRow> rows,
                         std::span<const PatientProfile> profiles, const SimilaritySets& similarity) {
  const std::size_t h = holdout_index(intervals);
  std::vector<Interval> windows;
  for (std::size_t t = 0; t < h; ++t) windows.push_back(lookback_window(intervals[t], cfg.lookback_days));

  TrainedPair out;
  out.vocabulary = fit_bow_vocabulary(events, windows, cfg.n_quarters, cfg.min_support);
  const Role roles[] = {Role::Diag, Role::FollowUp};
  const auto clinicians =
      cfg.clinician_onehots ? top_clinicians(events, windows, roles, cfg.top_clinicians) : std::vector<std::string>{};
  const auto base = baseline_schema(out.vocabulary, !profiles.empty(), clinicians);
  const std::size_t sim_dim = similarity.empty() || similarity.front().empty() ? 0 : similarity.front().front().vector.size();
  auto full = base;
  for (auto& name : similarity_schema(sim_dim)) full.push_back(std::move(name));

  DesignBuilder builder(events, std::vector<Interval>(intervals.begin(), intervals.end()), cfg.lookback_days,
                        cfg.n_quarters);
  builder.set_profiles(profiles);
  builder.set_similarity(similarity);

  const auto train_rows = rows_where(rows, false, h);
  if (train_rows.empty()) throw DataError("train: no cohort rows in the training intervals");
  const auto y = labels_of(train_rows);
  const DenseMatrix x_full = builder.build(full, train_rows);
  DenseMatrix x_base(x_full.rows(), base.size());
  for (std::size_t r = 0; r < x_full.rows(); ++r) {
    const auto src = x_full.row(r);
    std::copy_n(src.begin(), base.size(), x_base.row(r).begin());
  }

  auto fit = [&](DenseMatrix x, std::vector<std::string> schema, std::string_view which) {
    TrainedModel m;
    m.standardizer = Standardizer::fit(x);
    m.standardizer.apply(x);
    TrainOptions opts;
    opts.l2 = cfg.l2;
    opts.lr = cfg.lr;
    opts.epochs = cfg.epochs;
    opts.balance_classes = cfg.balance_classes;
    opts.seed = derive_seed(cfg.seed, "train:" + std::string(which));
    m.model = train_logistic(x, y, std::move(schema), opts).model;
    return m;
  };
  out.baseline = fit(std::move(x_base), base, "baseline");
  out.proposed = fit(x_full, full, "proposed");
  return out;
}

HoldoutScores score_holdout(const TrainedModel& m, const DesignBuilder& builder,
                            std::span<const CohortRow> holdout_rows) {
  HoldoutScores s;
  DenseMatrix x = builder.build(m.model.feature_schema, holdout_rows);
  m.standardizer.apply(x);
  s.scores = predict_scores(m.model, x, m.model.feature_schema);
  for (const auto& r : holdout_rows) {
    s.ids.push_back(r.patient_id);
    s.labels.push_back(r.label);
  }
  return s;
}

std::vector<std::size_t> usable_ks(std::span<const std::size_t> ks, std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t k : ks) {
    if (k >= 1 && k <= n) {
      out.push_back(k);
    } else {
      std::clog << "warning: precision@" << k << " skipped; the hold-out cohort has " << n << " rows\n";
    }
  }
  return out;
}

ExperimentResult run_experiment(const RunConfig& cfg) {
  cfg.validate();
  const SynthData data = synth_generate(synth_config(cfg));
  const auto intervals = study_intervals(cfg);
  const auto rows = build_cohort(data.events, intervals);
  const auto universe = cohort_universe(rows);
  if (universe.empty()) throw DataError("experiment: the cohort is empty");
  const SimilaritySets sims = compute_similarity(cfg, data.events, intervals, universe);
  const TrainedPair trained = train_models(cfg, data.events, intervals, rows, data.profiles, sims);

  DesignBuilder builder(data.events, intervals, cfg.lookback_days, cfg.n_quarters);
  builder.set_profiles(data.profiles);
  builder.set_similarity(sims);
  const auto holdout = rows_where(rows, true, holdout_index(intervals));
  const auto ks = usable_ks(cfg.metric_ks, holdout.size());

  ExperimentResult result;
  const auto sb = score_holdout(trained.baseline, builder, holdout);
  const auto sp = score_holdout(trained.proposed, builder, holdout);
  result.baseline = evaluate(sb.scores, sb.labels, sb.ids, ks);
  result.proposed = evaluate(sp.scores, sp.labels, sp.ids, ks);
  result.comparison = compare_runs(result.baseline, result.proposed, ks);
  result.n_holdout_rows = holdout.size();
  result.n_train_rows = rows.size() - holdout.size();
  std::size_t pos = 0;
  for (const auto& r : rows) pos += r.label;
  result.positive_rate = rows.empty() ? 0.0 : static_cast<double>(pos) / static_cast<double>(rows.size());
  return result;
}

// ---------------------------------------------------------------------------

namespace artifacts {

std::filesystem::path demographics(const RunConfig& cfg) { return cfg.workdir / "demographics.csv"; }
std::filesystem::path cohort(const RunConfig& cfg) { return cfg.workdir / "cohort.csv"; }
std::filesystem::path universe(const RunConfig& cfg) { return cfg.workdir / "universe.csv"; }

std::filesystem::path graph(const RunConfig& cfg, Role role, std::size_t t) {
  std::string name = "graph_" + std::string(role_tag(role));
  if (cfg.graph_window == GraphWindow::PerInterval) name += "_t" + std::to_string(t);
  return cfg.workdir / (name + ".csv");
}

std::filesystem::path features(const RunConfig& cfg, std::size_t t) {
  if (cfg.graph_window == GraphWindow::Snapshot) return cfg.workdir / "features.csv";
  return cfg.workdir / ("features_t" + std::to_string(t) + ".csv");
}

std::filesystem::path vocabulary(const RunConfig& cfg) { return cfg.workdir / "vocab.csv"; }

std::filesystem::path model(const RunConfig& cfg, std::string_view which) {
  return cfg.workdir / ("model_" + std::string(which) + ".csv");
}

std::filesystem::path report(const RunConfig& cfg, std::string_view which) {
  return cfg.workdir / ("report_" + std::string(which) + ".csv");
}

}  // namespace artifacts

void cmd_synth(const RunConfig& cfg, std::ostream& log) {
  in_stage("synth", [&] {
    cfg.validate();
    const SynthData data = synth_generate(synth_config(cfg));
    save_events(cfg.events_path(), data.events);
    save_profiles(artifacts::demographics(cfg), data.profiles);
    log << "synth: " << data.events.size() << " events for " << data.profiles.size() << " patients -> "
        << cfg.events_path().string() << '\n';
  });
}

void cmd_graphs(const RunConfig& cfg, std::ostream& log) {
  in_stage("graphs", [&] {
    cfg.validate();
    const auto events = load_events(cfg.events_path());
    const auto intervals = study_intervals(cfg);
    const auto rows = build_cohort(events, intervals);
    const auto universe = cohort_universe(rows);
    if (universe.empty()) throw DataError("the cohort is empty; no patient is diagnosed before an interval");
    save_cohort(artifacts::cohort(cfg), rows);
    save_universe(artifacts::universe(cfg), universe);
    for (std::size_t w = 0; w < n_windows(cfg); ++w) {
      for (const auto& g : build_graphs(events, cfg, universe, graph_window(cfg, intervals, w))) {
        const Role role = g.tag() == "diag" ? Role::Diag : Role::FollowUp;
        save_graph(artifacts::graph(cfg, role, w), g);
        log << "graphs: " << g.tag() << " window " << w << ": " << g.num_clinicians() << " clinicians, "
            << g.edges().size() << " edges\n";
      }
    }
    log << "graphs: " << rows.size() << " cohort rows over " << universe.size() << " patients\n";
  });
}

void cmd_extract(const RunConfig& cfg, std::ostream& log) {
  in_stage("extract", [&] {
    cfg.validate();
    const auto universe = load_universe(artifacts::universe(cfg));
    for (std::size_t w = 0; w < n_windows(cfg); ++w) {
      std::vector<BipartiteGraph> graphs;
      for (Role role : cfg.graphs) {
        graphs.push_back(load_graph(artifacts::graph(cfg, role, w), std::string(role_tag(role)), universe));
      }
      SolverConfig solver = solver_config(cfg);
      solver.seed += w * cfg.graphs.size();
      const auto feats = extract_similarity_features(graphs, cfg.k, solver);
      save_features(artifacts::features(cfg, w), feats);
      log << "extract: " << feats.size() << " patients x " << cfg.graphs.size() * cfg.k << " features -> "
          << artifacts::features(cfg, w).string() << '\n';
    }
  });
}

void cmd_train(const RunConfig& cfg, std::ostream& log) {
  in_stage("train", [&] {
    cfg.validate();
    const auto events = load_events(cfg.events_path());
    const auto intervals = study_intervals(cfg);
    const auto rows = load_cohort(artifacts::cohort(cfg));
    const auto profiles = load_profiles_if_present(cfg);
    const auto sims = load_similarity(cfg);
    const TrainedPair trained = train_models(cfg, events, intervals, rows, profiles, sims);
    save_vocabulary(artifacts::vocabulary(cfg), trained.vocabulary);
    save_model(artifacts::model(cfg, "baseline"), trained.baseline.model, trained.baseline.standardizer);
    save_model(artifacts::model(cfg, "proposed"), trained.proposed.model, trained.proposed.standardizer);
    log << "train: baseline " << trained.baseline.model.weights.size() << " features, proposed "
        << trained.proposed.model.weights.size() << " features\n";
  });
}

void cmd_evaluate(const RunConfig& cfg, std::ostream& log) {
  in_stage("evaluate", [&] {
    cfg.validate();
    const auto events = load_events(cfg.events_path());
    const auto intervals = study_intervals(cfg);
    const auto rows = load_cohort(artifacts::cohort(cfg));
    DesignBuilder builder(events, intervals, cfg.lookback_days, cfg.n_quarters);
    builder.set_profiles(load_profiles_if_present(cfg));
    builder.set_similarity(load_similarity(cfg));
    const auto holdout = rows_where(rows, true, holdout_index(intervals));
    if (holdout.empty()) throw DataError("the hold-out interval has no cohort rows");
    const auto ks = usable_ks(cfg.metric_ks, holdout.size());
    for (std::string_view which : kModels) {
      TrainedModel m;
      load_model(artifacts::model(cfg, which), m.model, m.standardizer);
      const auto s = score_holdout(m, builder, holdout);
      const EvalReport report = evaluate(s.scores, s.labels, s.ids, ks);
      save_report(artifacts::report(cfg, which), report);
      save_scores(cfg.workdir / ("scores_" + std::string(which) + ".csv"), s);
      save_curves(cfg, which, s);
      log << "evaluate: " << which << " PR-AUC " << csv::format_double(report.pr_auc) << " on "
          << holdout.size() << " hold-out rows\n";
    }
  });
}

void cmd_compare(const RunConfig& cfg, std::ostream& out) {
  in_stage("compare", [&] {
    const EvalReport b = load_report(artifacts::report(cfg, "baseline"));
    const EvalReport p = load_report(artifacts::report(cfg, "proposed"));
    std::vector<std::size_t> ks;
    for (std::size_t k : cfg.metric_ks) {
      if (b.at_k.contains(k) && p.at_k.contains(k)) ks.push_back(k);
    }
    const Comparison c = compare_runs(b, p, ks);
    const std::string table = render_comparison_table(c, cfg.model_name);
    {
      auto f = csv::open_output(cfg.workdir / "comparison.csv");
      f << render_comparison_csv(c);
    }
    auto f = csv::open_output(cfg.workdir / "comparison.txt");
    f << table;
    out << table;
  });
}

void cmd_all(const RunConfig& cfg, std::ostream& log) {
  cmd_synth(cfg, log);
  cmd_graphs(cfg, log);
  cmd_extract(cfg, log);
  cmd_train(cfg, log);
  cmd_evaluate(cfg, log);
  cmd_compare(cfg, log);
}

}  // namespace relsim
