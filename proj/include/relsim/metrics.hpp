#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace relsim {

/// Average precision: for each positive in descending-score order, the
/// precision at its rank, averaged over positives. Tied scores form a block
/// whose positives all take the precision at the block's end.
///
/// Throws UndefinedMetricError when labels hold a single class, DataError
/// on NaN scores, std::invalid_argument on length mismatch.
double pr_auc(std::span<const double> scores, std::span<const int> labels);

/// Indices sorted by score descending, then id ascending.
std::vector<std::size_t> rank_order(std::span<const double> scores, std::span<const std::string> ids);

struct PrecisionAtK {
  std::size_t hits = 0;
  double precision = 0.0;  // hits / k

  friend bool operator==(const PrecisionAtK&, const PrecisionAtK&) = default;
};

/// Positives among the k highest scores; score ties go to the smaller id.
/// Requires 1 <= k <= n.
PrecisionAtK precision_at_k(std::span<const double> scores, std::span<const int> labels,
                            std::span<const std::string> ids, std::size_t k);

struct EvalReport {
  double pr_auc = 0.0;
  std::map<std::size_t, PrecisionAtK> at_k;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// PR-AUC plus precision@k for each k in `ks` that does not exceed n.
EvalReport evaluate(std::span<const double> scores, std::span<const int> labels,
                    std::span<const std::string> ids, std::span<const std::size_t> ks);

struct ComparisonRow {
  std::size_t k = 0;
  std::size_t baseline_hits = 0;
  std::size_t proposed_hits = 0;
  /// Percent change in hits, rounded to one decimal; empty when the
  /// baseline has no hits.
  std::optional<double> improvement_pct;
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  double baseline_pr_auc = 0.0;
  double proposed_pr_auc = 0.0;
  double delta_pr_auc = 0.0;
};

/// Percent change (proposed - baseline) / baseline, rounded half away from
/// zero to one decimal. nullopt when baseline is zero.
std::optional<double> improvement_percent(std::size_t baseline_hits, std::size_t proposed_hits);

/// "+6.9%", "-1.2%", "0.0%", or "n/a".
std::string format_improvement(std::optional<double> pct);

/// Throws DataError if either report lacks one of `ks` or the cohorts differ.
Comparison compare_runs(const EvalReport& baseline, const EvalReport& proposed,
                        std::span<const std::size_t> ks);

/// Aligned text table with `<model>`, `<model>-Proposed` and `Improvement`
/// rows over the k columns, then the PR-AUC line.
std::string render_comparison_table(const Comparison& c, const std::string& model_name);
/// CSV `k,baseline_hits,proposed_hits,improvement_pct` plus a `pr_auc` row.
std::string render_comparison_csv(const Comparison& c);

/// CSV `metric,k,value`.
void save_report(const std::filesystem::path& path, const EvalReport& report);
EvalReport load_report(const std::filesystem::path& path);

struct PrPoint {
  double threshold;
  double precision;
  double recall;
};

/// One point per distinct score, highest first.
std::vector<PrPoint> pr_curve(std::span<const double> scores, std::span<const int> labels);

/// Hits among the top k for k = 1..n under rank_order.
std::vector<std::size_t> hits_curve(std::span<const double> scores, std::span<const int> labels,
                                    std::span<const std::string> ids);

}  // namespace relsim
