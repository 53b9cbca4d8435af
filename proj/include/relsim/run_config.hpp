#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relsim/date.hpp"
#include "relsim/events.hpp"
#include "relsim/synth.hpp"

namespace relsim {

/// How similarity graphs are windowed relative to cohort intervals.
enum class GraphWindow {
  /// One graph set over the look-back before the hold-out interval, shared
  /// by every interval.
  Snapshot,
  /// One graph set per interval over that interval's own look-back.
  PerInterval,
};

/// Every setting of a pipeline run. Each field is reachable by a config file
/// key and a CLI flag of the same name; see `describe_keys`.
struct RunConfig {
  std::filesystem::path workdir = "relsim_work";
  std::filesystem::path events;  // empty: <workdir>/events.csv

  Date study_start = Date::from_ymd(2017, 7, 1);
  Date study_end = Date::from_ymd(2019, 1, 1);
  std::size_t n_intervals = 3;
  std::int32_t lookback_days = 365;
  std::size_t n_quarters = 4;
  double min_support = 0.01;

  std::vector<Role> graphs = {Role::Diag, Role::FollowUp};
  GraphWindow graph_window = GraphWindow::Snapshot;
  std::size_t k = 5;
  double solver_tol = 1e-8;
  std::size_t solver_max_restarts = 300;
  std::size_t solver_krylov_dim = 0;

  SynthConfig synth;

  double l2 = 1e-4;
  double lr = 0.1;
  std::size_t epochs = 500;
  bool balance_classes = true;
  bool clinician_onehots = true;
  std::size_t top_clinicians = 16;
  std::string model_name = "LR";

  std::vector<std::size_t> metric_ks = {100, 300, 600, 1200};
  std::uint64_t seed = 1;

  std::filesystem::path events_path() const;

  /// Assigns one key from its text form. Throws UsageError naming the key on
  /// unknown keys or malformed values.
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;

  /// Cross-field checks; throws UsageError.
  void validate() const;

  /// Parses `key=value` lines; `#` starts a comment. Throws UsageError with
  /// the file name and line number.
  void load_file(const std::filesystem::path& path);

  /// `key=value` for every key, in registry order.
  void print(std::ostream& out) const;
};

struct KeyInfo {
  std::string_view key;
  std::string_view help;
};

/// All config keys with one-line descriptions.
std::span<const KeyInfo> describe_keys();

}  // namespace relsim
