#include "relsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "relsim/csv.hpp"
#include "relsim/error.hpp"

namespace relsim {

namespace {

void check_scores(std::span<const double> scores, std::span<const int> labels, const char* who) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument(std::string(who) + ": scores and labels differ in length");
  }
  for (double s : scores) {
    if (std::isnan(s)) throw DataError(std::string(who) + ": NaN score");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) throw DataError(std::string(who) + ": labels must be 0 or 1");
  }
}

std::vector<std::size_t> by_score(std::span<const double> scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return idx;
}

// num/den += a/b, reduced. False on overflow.
bool add_fraction(std::int64_t& num, std::int64_t& den, std::int64_t a, std::int64_t b) {
  const std::int64_t g = std::gcd(den, b);
  std::int64_t lhs, rhs, d;
  if (__builtin_mul_overflow(num, b / g, &lhs) || __builtin_mul_overflow(a, den / g, &rhs) ||
      __builtin_add_overflow(lhs, rhs, &lhs) || __builtin_mul_overflow(den / g, b, &d)) {
    return false;
  }
  const std::int64_t h = std::gcd(lhs, d);
  num = lhs / h;
  den = d / h;
  return true;
}

}  // namespace

double pr_auc(std::span<const double> scores, std::span<const int> labels) {
  check_scores(scores, labels, "pr_auc");
  const std::size_t n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  if (n_pos == 0 || n_pos == labels.size()) {
    throw UndefinedMetricError("pr_auc: undefined when labels contain a single class");
  }
  const auto order = by_score(scores);
  // Each tied block contributes block_pos * tp / j. Summed as a reduced
  // fraction while it fits, the final division is correctly rounded; long
  // inputs fall back to plain floating-point accumulation.
  double sum = 0.0;
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool exact = true;
  std::size_t tp = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::size_t block_pos = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) block_pos += labels[order[j++]];
    tp += block_pos;
    if (block_pos > 0) {
      sum += static_cast<double>(block_pos) * static_cast<double>(tp) / static_cast<double>(j);
      if (exact) exact = add_fraction(num, den, static_cast<std::int64_t>(block_pos * tp), static_cast<std::int64_t>(j));
    }
    i = j;
  }
  if (exact && !__builtin_mul_overflow(den, static_cast<std::int64_t>(n_pos), &den)) {
    const std::int64_t g = std::gcd(num, den);
    num /= g;
    den /= g;
    constexpr std::int64_t kMantissa = std::int64_t{1} << 53;
    if (num <= kMantissa && den <= kMantissa) return static_cast<double>(num) / static_cast<double>(den);
  }
  return sum / static_cast<double>(n_pos);
}

std::vector<std::size_t> rank_order(std::span<const double> scores, std::span<const std::string> ids) {
  if (scores.size() != ids.size()) throw std::invalid_argument("rank_order: scores and ids differ in length");
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids[a] < ids[b];
  });
  return idx;
}

PrecisionAtK precision_at_k(std::span<const double> scores, std::span<const int> labels,
                            std::span<const std::string> ids, std::size_t k) {
  check_scores(scores, labels, "precision_at_k");
  if (k == 0 || k > scores.size()) {
    throw std::invalid_argument("precision_at_k: k must lie in [1, n]");
  }
  const auto order = rank_order(scores, ids);
  std::size_t hits = 0;
  for (std::size_t r = 0; r < k; ++r) hits += labels[order[r]];
  return {hits, static_cast<double>(hits) / static_cast<double>(k)};
}

EvalReport evaluate(std::span<const double> scores, std::span<const int> labels,
                    std::span<const std::string> ids, std::span<const std::size_t> ks) {
  EvalReport report;
  report.pr_auc = pr_auc(scores, labels);
  report.n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  report.n_neg = labels.size() - report.n_pos;
  const auto hits = hits_curve(scores, labels, ids);
  for (std::size_t k : ks) {
    if (k == 0 || k > hits.size()) continue;
    report.at_k[k] = {hits[k - 1], static_cast<double>(hits[k - 1]) / static_cast<double>(k)};
  }
  return report;
}

std::optional<double> improvement_percent(std::size_t baseline_hits, std::size_t proposed_hits) {
  if (baseline_hits == 0) return std::nullopt;
  const double pct = 100.0 * (static_cast<double>(proposed_hits) - static_cast<double>(baseline_hits)) /
                     static_cast<double>(baseline_hits);
  return std::round(pct * 10.0) / 10.0;
}

std::string format_improvement(std::optional<double> pct) {
  if (!pct) return "n/a";
  char buf[32];
  const double v = *pct == 0.0 ? 0.0 : *pct;  // drop negative zero
  std::snprintf(buf, sizeof buf, v > 0.0 ? "+%.1f%%" : "%.1f%%", v);
  return buf;
}

Comparison compare_runs(const EvalReport& baseline, const EvalReport& proposed,
                        std::span<const std::size_t> ks) {
  if (baseline.n_pos != proposed.n_pos || baseline.n_neg != proposed.n_neg) {
    throw DataError("compare_runs: reports were computed on different cohorts");
  }
  Comparison c;
  c.baseline_pr_auc = baseline.pr_auc;
  c.proposed_pr_auc = proposed.pr_auc;
  c.delta_pr_auc = proposed.pr_auc - baseline.pr_auc;
  for (std::size_t k : ks) {
    const auto b = baseline.at_k.find(k);
    const auto p = proposed.at_k.find(k);
    if (b == baseline.at_k.end() || p == proposed.at_k.end()) {
      throw DataError("compare_runs: precision@" + std::to_string(k) + " missing from a report");
    }
    c.rows.push_back({k, b->second.hits, p->second.hits,
                      improvement_percent(b->second.hits, p->second.hits)});
  }
  return c;
}

std::string render_comparison_table(const Comparison& c, const std::string& model_name) {
  std::vector<std::vector<std::string>> table;
  table.push_back({"K"});
  table.push_back({model_name});
  table.push_back({model_name + "-Proposed"});
  table.push_back({"Improvement"});
  for (const auto& r : c.rows) {
    table[0].push_back(std::to_string(r.k));
    table[1].push_back(std::to_string(r.baseline_hits));
    table[2].push_back(std::to_string(r.proposed_hits));
    table[3].push_back(format_improvement(r.improvement_pct));
  }
  std::vector<std::size_t> width(table[0].size(), 0);
  for (const auto& row : table) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::ostringstream out;
  for (const auto& row : table) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i == 0) {
        out << row[i] << std::string(width[i] - row[i].size(), ' ');
      } else {
        out << "  " << std::string(width[i] - row[i].size(), ' ') << row[i];
      }
    }
    out << '\n';
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "PR-AUC  baseline %.4f  proposed %.4f  delta %+.4f\n", c.baseline_pr_auc,
                c.proposed_pr_auc, c.delta_pr_auc);
  out << buf;
  return out.str();
}

std::string render_comparison_csv(const Comparison& c) {
  std::ostringstream out;
  out << "k,baseline_hits,proposed_hits,improvement_pct\n";
  for (const auto& r : c.rows) {
    out << r.k << ',' << r.baseline_hits << ',' << r.proposed_hits << ',';
    if (r.improvement_pct) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.1f", *r.improvement_pct == 0.0 ? 0.0 : *r.improvement_pct);
      out << buf;
    } else {
      out << "n/a";
    }
    out << '\n';
  }
  out << "pr_auc," << csv::format_double(c.baseline_pr_auc) << ',' << csv::format_double(c.proposed_pr_auc)
      << ',' << csv::format_double(c.delta_pr_auc) << '\n';
  return out.str();
}

void save_report(const std::filesystem::path& path, const EvalReport& report) {
  auto out = csv::open_output(path);
  out << "metric,k,value\n";
  out << "pr_auc,," << csv::format_double(report.pr_auc) << '\n';
  out << "n_pos,," << report.n_pos << '\n';
  out << "n_neg,," << report.n_neg << '\n';
  for (const auto& [k, v] : report.at_k) {
    out << "hits," << k << ',' << v.hits << '\n';
    out << "precision," << k << ',' << csv::format_double(v.precision) << '\n';
  }
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

EvalReport load_report(const std::filesystem::path& path) {
  auto in = csv::open_input(path);
  const std::string source = path.string();
  csv::expect_header(in, "metric,k,value", source);
  csv::LineReader reader(in, 1);
  EvalReport report;
  std::string line;
  while (reader.next(line)) {
    const std::string where = source + ": line " + std::to_string(reader.line_number());
    const auto f = csv::split(line);
    if (f.size() != 3) throw DataError(where + ": expected 3 columns");
    const std::string_view metric = f[0];
    if (metric == "pr_auc") {
      report.pr_auc = csv::parse_double(f[2], where);
    } else if (metric == "n_pos") {
      report.n_pos = static_cast<std::size_t>(csv::parse_int(f[2], where));
    } else if (metric == "n_neg") {
      report.n_neg = static_cast<std::size_t>(csv::parse_int(f[2], where));
    } else if (metric == "hits" || metric == "precision") {
      const long long k = csv::parse_int(f[1], where);
      if (k < 1) throw DataError(where + ": k must be >= 1");
      auto& entry = report.at_k[static_cast<std::size_t>(k)];
      if (metric == "hits") {
        entry.hits = static_cast<std::size_t>(csv::parse_int(f[2], where));
      } else {
        entry.precision = csv::parse_double(f[2], where);
      }
    } else {
      throw DataError(where + ": unknown metric '" + std::string(metric) + "'");
    }
  }
  return report;
}

std::vector<PrPoint> pr_curve(std::span<const double> scores, std::span<const int> labels) {
  check_scores(scores, labels, "pr_curve");
  const std::size_t n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  if (n_pos == 0) throw UndefinedMetricError("pr_curve: no positive labels");
  const auto order = by_score(scores);
  std::vector<PrPoint> out;
  std::size_t tp = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) tp += labels[order[j++]];
    out.push_back({scores[order[i]], static_cast<double>(tp) / static_cast<double>(j),
                   static_cast<double>(tp) / static_cast<double>(n_pos)});
    i = j;
  }
  return out;
}

std::vector<std::size_t> hits_curve(std::span<const double> scores, std::span<const int> labels,
                                    std::span<const std::string> ids) {
  check_scores(scores, labels, "hits_curve");
  const auto order = rank_order(scores, ids);
  std::vector<std::size_t> out(order.size());
  std::size_t hits = 0;
  for (std::size_t r = 0; r < order.size(); ++r) out[r] = (hits += labels[order[r]]);
  return out;
}

}  // namespace relsim
