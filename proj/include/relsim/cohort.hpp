#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "relsim/date.hpp"
#include "relsim/events.hpp"

namespace relsim {

/// n contiguous half-open intervals covering [start, end). Lengths differ by
/// at most one day; the extra days go to the earliest intervals.
std::vector<Interval> split_intervals(Date start, Date end, std::size_t n);

/// Labels every patient diagnosed strictly before `interval.start`:
/// 1 if their first treatment falls inside the interval, 0 if they are not
/// treated before its end. Patients treated before the interval starts are
/// left out, as are patients never diagnosed before it.
std::map<std::string, int> label_cohort(std::span<const VisitEvent> events, Interval interval);

/// One (patient, interval) row of the modeling cohort.
struct CohortRow {
  std::string patient_id;
  std::size_t interval_index = 0;
  int label = 0;

  friend bool operator==(const CohortRow&, const CohortRow&) = default;
};

/// Cohort rows for every interval, ordered by interval then patient id.
std::vector<CohortRow> build_cohort(std::span<const VisitEvent> events,
                                    std::span<const Interval> intervals);

inline constexpr std::string_view kCohortHeader = "patient_id,interval_index,label";
void save_cohort(const std::filesystem::path& path, std::span<const CohortRow> rows);
std::vector<CohortRow> load_cohort(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Bag-of-words features over the look-back window.

struct BowOptions {
  std::int32_t lookback_days = 365;
  std::size_t n_quarters = 4;
  /// Minimum fraction of patients that must carry a code for it to be kept.
  double min_support = 0.01;
};

/// [interval.start - lookback_days, interval.start).
Interval lookback_window(Interval interval, std::int32_t lookback_days);

/// Chronological quarter (0 = earliest) of `d` within the look-back before
/// `anchor`, or nullopt when `d` falls outside it. Quarter boundaries are
/// floor(i * lookback / n_quarters) days before the anchor.
std::optional<std::size_t> lookback_quarter(Date d, Date anchor, std::int32_t lookback_days,
                                            std::size_t n_quarters);

/// Retained codes; feature index = quarter * codes.size() + code position.
struct BowVocabulary {
  std::vector<std::string> codes;  // sorted
  std::size_t n_quarters = 4;

  std::size_t size() const { return codes.size() * n_quarters; }
  std::optional<std::size_t> index(std::size_t quarter, std::string_view code) const;
  /// `bow:q<quarter+1>:<code>`
  std::string feature_name(std::size_t index) const;

  friend bool operator==(const BowVocabulary&, const BowVocabulary&) = default;
};

/// Codes of DIAGNOSIS/SERVICE events inside any of `windows`, kept when the
/// fraction of patients (with at least one such event) carrying the code is
/// >= min_support.
BowVocabulary fit_bow_vocabulary(std::span<const VisitEvent> events, std::span<const Interval> windows,
                                 std::size_t n_quarters, double min_support);

/// Sparse count vector: (feature index, count) sorted by index.
using SparseCounts = std::vector<std::pair<std::size_t, double>>;

/// Per-patient counts over the look-back of `interval` using a frozen
/// vocabulary. Patients without counted events are absent from the map
/// (their vector is all zero).
std::map<std::string, SparseCounts> build_bow_features(std::span<const VisitEvent> events,
                                                       Interval interval,
                                                       const BowVocabulary& vocabulary,
                                                       const BowOptions& options = {});

struct BowResult {
  BowVocabulary vocabulary;
  std::map<std::string, SparseCounts> vectors;
};

/// Fits the vocabulary on this interval's look-back, then counts.
BowResult build_bow_features(std::span<const VisitEvent> events, Interval interval,
                             const BowOptions& options = {});

void save_vocabulary(const std::filesystem::path& path, const BowVocabulary& vocabulary);

// ---------------------------------------------------------------------------
// Demographics and medical covariates (categorical, one-hot encoded downstream).

inline constexpr std::size_t kAgeBuckets = 5;
inline constexpr std::size_t kMedicalCovariates = 11;

struct PatientProfile {
  std::string patient_id;
  int age_bucket = 0;  // 0..kAgeBuckets-1
  int gender = 0;      // 0 or 1
  std::array<std::uint8_t, kMedicalCovariates> covariates{};

  friend bool operator==(const PatientProfile&, const PatientProfile&) = default;
};

void save_profiles(const std::filesystem::path& path, std::span<const PatientProfile> profiles);
std::vector<PatientProfile> load_profiles(const std::filesystem::path& path);

}  // namespace relsim
