#include "relsim/run_config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>

#include "relsim/bipartite_graph.hpp"
#include "relsim/csv.hpp"
#include "relsim/error.hpp"

namespace relsim {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad(std::string_view key, std::string_view value, std::string_view expected) {
  throw UsageError("config key '" + std::string(key) + "': expected " + std::string(expected) + ", got '" +
                   std::string(value) + "'");
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size()) bad(key, v, "a nonnegative integer");
  return out;
}

std::size_t to_size(std::string_view key, std::string_view v) { return static_cast<std::size_t>(to_u64(key, v)); }

std::int32_t to_i32(std::string_view key, std::string_view v) {
  std::int32_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size()) bad(key, v, "an integer");
  return out;
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    bad(key, v, "a finite number");
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad(key, v, "true or false");
}

Date to_date(std::string_view key, std::string_view v) {
  const auto d = Date::parse(v);
  if (!d) bad(key, v, "a YYYY-MM-DD date");
  return *d;
}

std::vector<std::string_view> list(std::string_view v) {
  std::vector<std::string_view> out;
  for (auto part : csv::split(v)) {
    part = trim(part);
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

std::vector<Role> to_roles(std::string_view key, std::string_view v) {
  std::vector<Role> out;
  for (auto r : list(v)) {
    if (r == "diag") {
      out.push_back(Role::Diag);
    } else if (r == "followup") {
      out.push_back(Role::FollowUp);
    } else {
      bad(key, v, "a comma list of diag and followup");
    }
  }
  if (out.empty()) bad(key, v, "at least one graph role");
  return out;
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip form
  return std::string(buf, res.ptr);
}

template <class T>
std::string num(T v) {
  return std::to_string(v);
}

struct Entry {
  std::string_view key;
  std::string_view help;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define RELSIM_SIZE(name, field, help)                                                  \
  Entry {                                                                               \
    name, help, [](RunConfig& c, std::string_view v) { c.field = to_size(name, v); },   \
        [](const RunConfig& c) { return num(c.field); }                                 \
  }
#define RELSIM_DOUBLE(name, field, help)                                                \
  Entry {                                                                               \
    name, help, [](RunConfig& c, std::string_view v) { c.field = to_double(name, v); }, \
        [](const RunConfig& c) { return fmt(c.field); }                                 \
  }
#define RELSIM_BOOL(name, field, help)                                                  \
  Entry {                                                                               \
    name, help, [](RunConfig& c, std::string_view v) { c.field = to_bool(name, v); },   \
        [](const RunConfig& c) { return std::string(c.field ? "true" : "false"); }      \
  }

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      {"workdir", "directory holding every pipeline artifact",
       [](RunConfig& c, std::string_view v) { c.workdir = std::string(v); },
       [](const RunConfig& c) { return c.workdir.string(); }},
      {"events", "event-log CSV (empty: <workdir>/events.csv)",
       [](RunConfig& c, std::string_view v) { c.events = std::string(v); },
       [](const RunConfig& c) { return c.events.string(); }},
      {"study_start", "first day of the study period",
       [](RunConfig& c, std::string_view v) { c.study_start = to_date("study_start", v); },
       [](const RunConfig& c) { return c.study_start.to_string(); }},
      {"study_end", "day after the study period (exclusive)",
       [](RunConfig& c, std::string_view v) { c.study_end = to_date("study_end", v); },
       [](const RunConfig& c) { return c.study_end.to_string(); }},
      RELSIM_SIZE("n_intervals", n_intervals, "cohort intervals; the last is held out"),
      {"lookback_days", "look-back length before each interval",
       [](RunConfig& c, std::string_view v) { c.lookback_days = to_i32("lookback_days", v); },
       [](const RunConfig& c) { return num(c.lookback_days); }},
      RELSIM_SIZE("n_quarters", n_quarters, "look-back partitions for bag-of-words counts"),
      RELSIM_DOUBLE("min_support", min_support, "minimum patient share for a code to enter the vocabulary"),
      {"graphs", "graph roles in feature order (diag, followup)",
       [](RunConfig& c, std::string_view v) { c.graphs = to_roles("graphs", v); },
       [](const RunConfig& c) {
         std::string out;
         for (std::size_t i = 0; i < c.graphs.size(); ++i) {
           if (i) out += ',';
           out += role_tag(c.graphs[i]);
         }
         return out;
       }},
      {"graph_window", "snapshot (one graph set before the hold-out) or per_interval",
       [](RunConfig& c, std::string_view v) {
         if (v == "snapshot") {
           c.graph_window = GraphWindow::Snapshot;
         } else if (v == "per_interval") {
           c.graph_window = GraphWindow::PerInterval;
         } else {
           bad("graph_window", v, "snapshot or per_interval");
         }
       },
       [](const RunConfig& c) {
         return std::string(c.graph_window == GraphWindow::Snapshot ? "snapshot" : "per_interval");
       }},
      RELSIM_SIZE("k", k, "eigenvectors per graph"),
      RELSIM_DOUBLE("solver_tol", solver_tol, "eigenpair residual bound"),
      RELSIM_SIZE("solver_max_restarts", solver_max_restarts, "eigensolver restart cap"),
      RELSIM_SIZE("solver_krylov_dim", solver_krylov_dim, "Krylov basis size (0: max(2k+1, 20))"),
      RELSIM_SIZE("n_patients", synth.n_patients, "synthetic patients"),
      RELSIM_SIZE("n_diag_clinicians", synth.n_diag_clinicians, "synthetic diagnosing clinicians"),
      RELSIM_SIZE("n_followup_clinicians", synth.n_followup_clinicians, "synthetic follow-up clinicians"),
      RELSIM_SIZE("n_communities", synth.n_communities, "planted clinician communities"),
      RELSIM_DOUBLE("signal_strength", synth.signal_strength,
                    "treatment hazard gap of the high-propensity community"),
      RELSIM_DOUBLE("visits_per_patient", synth.visits_per_patient, "mean service visits per patient-year"),
      RELSIM_DOUBLE("positive_rate_target", synth.positive_rate_target, "target share of positive cohort rows"),
      RELSIM_DOUBLE("community_affinity", synth.community_affinity,
                    "chance a visit stays inside the patient's community"),
      RELSIM_DOUBLE("clinician_loyalty", synth.clinician_loyalty,
                    "chance a visit returns to the patient's regular clinician"),
      RELSIM_DOUBLE("diag_visit_share", synth.diag_visit_share, "share of service visits with the DIAG role"),
      RELSIM_SIZE("n_codes", synth.n_codes, "synthetic service codes"),
      {"history_days", "diagnosis history before the study start",
       [](RunConfig& c, std::string_view v) { c.synth.history_days = to_i32("history_days", v); },
       [](const RunConfig& c) { return num(c.synth.history_days); }},
      RELSIM_DOUBLE("l2", l2, "L2 penalty on model weights"),
      RELSIM_DOUBLE("lr", lr, "initial gradient-descent step"),
      RELSIM_SIZE("epochs", epochs, "full-batch gradient-descent epochs"),
      RELSIM_BOOL("balance_classes", balance_classes, "inverse-prevalence sample weights"),
      RELSIM_BOOL("clinician_onehots", clinician_onehots,
                  "give both models one-hots of the most frequent clinicians"),
      RELSIM_SIZE("top_clinicians", top_clinicians, "clinicians per role given a one-hot column"),
      {"model_name", "label of the baseline row in the comparison table",
       [](RunConfig& c, std::string_view v) { c.model_name = std::string(v); },
       [](const RunConfig& c) { return c.model_name; }},
      {"metric_ks", "comma list of k for precision@k",
       [](RunConfig& c, std::string_view v) {
         std::vector<std::size_t> ks;
         for (auto part : list(v)) ks.push_back(to_size("metric_ks", part));
         if (ks.empty()) bad("metric_ks", v, "at least one k");
         c.metric_ks = std::move(ks);
       },
       [](const RunConfig& c) {
         std::string out;
         for (std::size_t i = 0; i < c.metric_ks.size(); ++i) {
           if (i) out += ',';
           out += num(c.metric_ks[i]);
         }
         return out;
       }},
      {"seed", "root seed; every stage derives its own stream from it",
       [](RunConfig& c, std::string_view v) { c.seed = to_u64("seed", v); },
       [](const RunConfig& c) { return num(c.seed); }},
  };
  return entries;
}

#undef RELSIM_SIZE
#undef RELSIM_DOUBLE
#undef RELSIM_BOOL

const Entry& find(std::string_view key) {
  for (const auto& e : registry()) {
    if (e.key == key) return e;
  }
  throw UsageError("unknown config key '" + std::string(key) + "'");
}

}  // namespace

std::filesystem::path RunConfig::events_path() const {
  return events.empty() ? workdir / "events.csv" : events;
}

void RunConfig::set(std::string_view key, std::string_view value) { find(key).set(*this, trim(value)); }

std::string RunConfig::get(std::string_view key) const { return find(key).get(*this); }

void RunConfig::validate() const {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw UsageError("config: " + msg);
  };
  need(study_start < study_end, "study_start must precede study_end");
  need(n_intervals >= 2, "n_intervals must be >= 2 (training plus hold-out)");
  need(static_cast<std::size_t>(study_end - study_start) >= n_intervals,
       "study period shorter than n_intervals days");
  need(lookback_days >= 1, "lookback_days must be >= 1");
  need(n_quarters >= 1, "n_quarters must be >= 1");
  need(min_support >= 0.0 && min_support < 1.0, "min_support must lie in [0, 1)");
  need(!graphs.empty(), "graphs must name at least one role");
  need(k >= 1, "k must be >= 1");
  need(solver_tol > 0.0, "solver_tol must be positive");
  need(solver_max_restarts >= 1, "solver_max_restarts must be >= 1");
  need(l2 >= 0.0, "l2 must be >= 0");
  need(lr > 0.0, "lr must be positive");
  for (std::size_t kk : metric_ks) need(kk >= 1, "metric_ks entries must be >= 1");
  synth.validate();
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path.string() + "'");
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = path.string() + ": line " + std::to_string(number);
    if (eq == std::string_view::npos) throw UsageError(where + ": expected key=value");
    try {
      set(trim(body.substr(0, eq)), body.substr(eq + 1));
    } catch (const UsageError& e) {
      throw UsageError(where + ": " + e.what());
    }
  }
}

void RunConfig::print(std::ostream& out) const {
  for (const auto& e : registry()) out << e.key << '=' << e.get(*this) << '\n';
}

std::span<const KeyInfo> describe_keys() {
  static const std::vector<KeyInfo> infos = [] {
    std::vector<KeyInfo> out;
    for (const auto& e : registry()) out.push_back({e.key, e.help});
    return out;
  }();
  return infos;
}

}  // namespace relsim
