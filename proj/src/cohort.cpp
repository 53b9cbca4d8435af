#include "relsim/cohort.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "relsim/csv.hpp"
#include "relsim/error.hpp"

namespace relsim {

std::vector<Interval> split_intervals(Date start, Date end, std::size_t n) {
  if (!(start < end)) throw std::invalid_argument("split_intervals: start must precede end");
  if (n == 0) throw std::invalid_argument("split_intervals: need at least one interval");
  const std::int32_t total = end - start;
  if (static_cast<std::size_t>(total) < n) {
    throw std::invalid_argument("split_intervals: fewer days than intervals");
  }
  const std::int32_t base = total / static_cast<std::int32_t>(n);
  const std::int32_t extra = total % static_cast<std::int32_t>(n);
  std::vector<Interval> out;
  out.reserve(n);
  Date cursor = start;
  for (std::int32_t i = 0; i < static_cast<std::int32_t>(n); ++i) {
    const Date next = cursor + base + (i < extra ? 1 : 0);
    out.push_back({cursor, next});
    cursor = next;
  }
  return out;
}

namespace {

struct PatientDates {
  std::optional<Date> first_diagnosis;
  std::optional<Date> first_treatment;
};

std::unordered_map<std::string_view, PatientDates> first_dates(std::span<const VisitEvent> events) {
  std::unordered_map<std::string_view, PatientDates> out;
  for (const auto& e : events) {
    if (e.type == EventType::Diagnosis) {
      auto& d = out[e.patient_id].first_diagnosis;
      if (!d || e.date < *d) d = e.date;
    } else if (e.type == EventType::Treatment) {
      auto& t = out[e.patient_id].first_treatment;
      if (!t || e.date < *t) t = e.date;
    }
  }
  return out;
}

std::optional<int> label_for(const PatientDates& d, Interval interval) {
  if (!d.first_diagnosis || !(*d.first_diagnosis < interval.start)) return std::nullopt;
  if (d.first_treatment && *d.first_treatment < interval.start) return std::nullopt;
  return (d.first_treatment && interval.contains(*d.first_treatment)) ? 1 : 0;
}

bool counted(const VisitEvent& e) {
  return e.type == EventType::Diagnosis || e.type == EventType::Service;
}

}  // namespace

std::map<std::string, int> label_cohort(std::span<const VisitEvent> events, Interval interval) {
  std::map<std::string, int> out;
  for (const auto& [patient, dates] : first_dates(events)) {
    if (const auto label = label_for(dates, interval)) out.emplace(patient, *label);
  }
  return out;
}

std::vector<CohortRow> build_cohort(std::span<const VisitEvent> events,
                                    std::span<const Interval> intervals) {
  const auto dates = first_dates(events);
  std::vector<CohortRow> rows;
  for (std::size_t t = 0; t < intervals.size(); ++t) {
    std::vector<CohortRow> block;
    for (const auto& [patient, d] : dates) {
      if (const auto label = label_for(d, intervals[t])) {
        block.push_back({std::string(patient), t, *label});
      }
    }
    std::sort(block.begin(), block.end(),
              [](const CohortRow& a, const CohortRow& b) { return a.patient_id < b.patient_id; });
    rows.insert(rows.end(), std::make_move_iterator(block.begin()),
                std::make_move_iterator(block.end()));
  }
  return rows;
}

void save_cohort(const std::filesystem::path& path, std::span<const CohortRow> rows) {
  auto out = csv::open_output(path);
  out << kCohortHeader << '\n';
  for (const auto& r : rows) out << r.patient_id << ',' << r.interval_index << ',' << r.label << '\n';
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

std::vector<CohortRow> load_cohort(const std::filesystem::path& path) {
  auto in = csv::open_input(path);
  const std::string source = path.string();
  csv::expect_header(in, kCohortHeader, source);
  csv::LineReader reader(in, 1);
  std::vector<CohortRow> rows;
  std::string line;
  while (reader.next(line)) {
    const std::string where = source + ": line " + std::to_string(reader.line_number());
    const auto f = csv::split(line);
    if (f.size() != 3) throw DataError(where + ": expected 3 columns");
    const long long t = csv::parse_int(f[1], where);
    const long long y = csv::parse_int(f[2], where);
    if (t < 0) throw DataError(where + ": negative interval_index");
    if (y != 0 && y != 1) throw DataError(where + ": label must be 0 or 1");
    rows.push_back({std::string(f[0]), static_cast<std::size_t>(t), static_cast<int>(y)});
  }
  return rows;
}

Interval lookback_window(Interval interval, std::int32_t lookback_days) {
  return {interval.start - lookback_days, interval.start};
}

std::optional<std::size_t> lookback_quarter(Date d, Date anchor, std::int32_t lookback_days,
                                            std::size_t n_quarters) {
  const std::int32_t before = anchor - d;  // 1..lookback_days inside the window
  if (before < 1 || before > lookback_days || n_quarters == 0) return std::nullopt;
  // Walk boundaries backward from the anchor; r counts from the most recent.
  for (std::size_t r = 0; r < n_quarters; ++r) {
    const std::int64_t hi = static_cast<std::int64_t>(r + 1) * lookback_days /
                            static_cast<std::int64_t>(n_quarters);
    if (before <= hi) return n_quarters - 1 - r;
  }
  return std::nullopt;
}

std::optional<std::size_t> BowVocabulary::index(std::size_t quarter, std::string_view code) const {
  if (quarter >= n_quarters) return std::nullopt;
  const auto it = std::lower_bound(codes.begin(), codes.end(), code);
  if (it == codes.end() || *it != code) return std::nullopt;
  return quarter * codes.size() + static_cast<std::size_t>(it - codes.begin());
}

std::string BowVocabulary::feature_name(std::size_t index) const {
  if (index >= size()) throw std::out_of_range("BowVocabulary::feature_name");
  const std::size_t q = index / codes.size();
  return "bow:q" + std::to_string(q + 1) + ":" + codes[index % codes.size()];
}

BowVocabulary fit_bow_vocabulary(std::span<const VisitEvent> events, std::span<const Interval> windows,
                                 std::size_t n_quarters, double min_support) {
  if (!(min_support >= 0.0 && min_support < 1.0)) {
    throw std::invalid_argument("fit_bow_vocabulary: min_support must lie in [0, 1)");
  }
  std::unordered_set<std::string_view> patients;
  std::unordered_map<std::string_view, std::unordered_set<std::string_view>> carriers;
  for (const auto& e : events) {
    if (!counted(e)) continue;
    const bool inside = std::any_of(windows.begin(), windows.end(),
                                    [&](const Interval& w) { return w.contains(e.date); });
    if (!inside) continue;
    patients.insert(e.patient_id);
    carriers[e.code].insert(e.patient_id);
  }
  BowVocabulary vocab;
  vocab.n_quarters = n_quarters;
  const double denom = static_cast<double>(patients.size());
  for (const auto& [code, who] : carriers) {
    if (static_cast<double>(who.size()) >= min_support * denom) vocab.codes.emplace_back(code);
  }
  std::sort(vocab.codes.begin(), vocab.codes.end());
  return vocab;
}

std::map<std::string, SparseCounts> build_bow_features(std::span<const VisitEvent> events,
                                                       Interval interval,
                                                       const BowVocabulary& vocabulary,
                                                       const BowOptions& options) {
  if (vocabulary.n_quarters != options.n_quarters) {
    throw std::invalid_argument("build_bow_features: vocabulary quarter count differs from options");
  }
  std::unordered_map<std::string_view, std::map<std::size_t, double>> acc;
  for (const auto& e : events) {
    if (!counted(e)) continue;
    const auto q = lookback_quarter(e.date, interval.start, options.lookback_days, options.n_quarters);
    if (!q) continue;
    const auto idx = vocabulary.index(*q, e.code);
    if (!idx) continue;
    acc[e.patient_id][*idx] += 1.0;
  }
  std::map<std::string, SparseCounts> out;
  for (auto& [patient, counts] : acc) {
    out.emplace(std::string(patient), SparseCounts(counts.begin(), counts.end()));
  }
  return out;
}

BowResult build_bow_features(std::span<const VisitEvent> events, Interval interval,
                             const BowOptions& options) {
  BowResult result;
  const Interval window = lookback_window(interval, options.lookback_days);
  result.vocabulary = fit_bow_vocabulary(events, std::span<const Interval>(&window, 1),
                                         options.n_quarters, options.min_support);
  result.vectors = build_bow_features(events, interval, result.vocabulary, options);
  return result;
}

void save_vocabulary(const std::filesystem::path& path, const BowVocabulary& vocabulary) {
  auto out = csv::open_output(path);
  out << "index,feature\n";
  for (std::size_t i = 0; i < vocabulary.size(); ++i) out << i << ',' << vocabulary.feature_name(i) << '\n';
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

void save_profiles(const std::filesystem::path& path, std::span<const PatientProfile> profiles) {
  auto out = csv::open_output(path);
  out << "patient_id,age_bucket,gender";
  for (std::size_t j = 0; j < kMedicalCovariates; ++j) out << ",cov" << j;
  out << '\n';
  for (const auto& p : profiles) {
    out << p.patient_id << ',' << p.age_bucket << ',' << p.gender;
    for (auto c : p.covariates) out << ',' << static_cast<int>(c);
    out << '\n';
  }
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

std::vector<PatientProfile> load_profiles(const std::filesystem::path& path) {
  auto in = csv::open_input(path);
  const std::string source = path.string();
  std::string header = "patient_id,age_bucket,gender";
  for (std::size_t j = 0; j < kMedicalCovariates; ++j) header += ",cov" + std::to_string(j);
  csv::expect_header(in, header, source);
  csv::LineReader reader(in, 1);
  std::vector<PatientProfile> out;
  std::string line;
  while (reader.next(line)) {
    const std::string where = source + ": line " + std::to_string(reader.line_number());
    const auto f = csv::split(line);
    if (f.size() != 3 + kMedicalCovariates) throw DataError(where + ": wrong column count");
    PatientProfile p;
    p.patient_id = std::string(f[0]);
    p.age_bucket = static_cast<int>(csv::parse_int(f[1], where));
    p.gender = static_cast<int>(csv::parse_int(f[2], where));
    if (p.age_bucket < 0 || p.age_bucket >= static_cast<int>(kAgeBuckets)) {
      throw DataError(where + ": age_bucket out of range");
    }
    if (p.gender != 0 && p.gender != 1) throw DataError(where + ": gender must be 0 or 1");
    for (std::size_t j = 0; j < kMedicalCovariates; ++j) {
      const long long v = csv::parse_int(f[3 + j], where);
      if (v != 0 && v != 1) throw DataError(where + ": covariates must be 0 or 1");
      p.covariates[j] = static_cast<std::uint8_t>(v);
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace relsim
