#include "relsim/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "relsim/error.hpp"
#include "relsim/random.hpp"

namespace relsim {

namespace {

constexpr double kSeverityEffect = 0.6;  // log-hazard per unit severity
constexpr double kMaxHazard = 0.95;
constexpr std::int32_t kPreDiagnosisVisits = 180;
constexpr const char* kDiagnosisCode = "C91.10";
constexpr const char* kTreatmentCode = "TX";

std::string padded(char prefix, std::size_t value, int width) {
  std::string digits_str = std::to_string(value);
  if (static_cast<int>(digits_str.size()) < width) digits_str.insert(0, width - digits_str.size(), '0');
  return prefix + digits_str;
}

int digits(std::size_t n) {
  int d = 1;
  while (n >= 10) {
    n /= 10;
    ++d;
  }
  return d;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct Latent {
  std::size_t community;
  double severity;
  double multiplier;
  Date diagnosis;
};

// Cumulative weights for O(log n) sampling.
class Categorical {
 public:
  explicit Categorical(const std::vector<double>& w) : cdf_(w.size()) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) cdf_[i] = (s += w[i]);
  }
  std::size_t sample(Rng& rng) const {
    const double u = rng.uniform() * cdf_.back();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

bool high_propensity(std::size_t community, std::size_t n_communities) {
  return community < std::max<std::size_t>(1, n_communities / 5);
}

}  // namespace

void SynthConfig::validate() const {
  auto need = [](bool ok, const char* msg) {
    if (!ok) throw UsageError(std::string("synth config: ") + msg);
  };
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  need(n_patients >= 1, "n_patients must be >= 1");
  need(n_diag_clinicians >= 1, "n_diag_clinicians must be >= 1");
  need(n_followup_clinicians >= 1, "n_followup_clinicians must be >= 1");
  need(n_communities >= 1, "n_communities must be >= 1");
  need(n_communities <= std::min(n_diag_clinicians, n_followup_clinicians),
       "n_communities exceeds the clinician count of a role");
  need(prob(signal_strength), "signal_strength must lie in [0, 1]");
  need(std::isfinite(visits_per_patient) && visits_per_patient >= 0.0,
       "visits_per_patient must be >= 0");
  need(prob(positive_rate_target), "positive_rate_target must lie in [0, 1]");
  need(prob(community_affinity), "community_affinity must lie in [0, 1]");
  need(prob(clinician_loyalty), "clinician_loyalty must lie in [0, 1]");
  need(prob(diag_visit_share), "diag_visit_share must lie in [0, 1]");
  need(n_codes >= 1, "n_codes must be >= 1");
  need(study_start < study_end, "study_start must precede study_end");
  need(n_intervals >= 1, "n_intervals must be >= 1");
  need(static_cast<std::size_t>(study_end - study_start) >= n_intervals,
       "study period shorter than the interval count");
  need(history_days >= 0, "history_days must be >= 0");
}

SynthData synth_generate(const SynthConfig& cfg) {
  cfg.validate();
  const auto intervals = split_intervals(cfg.study_start, cfg.study_end, cfg.n_intervals);
  const std::size_t n = cfg.n_patients;
  const std::size_t nc = cfg.n_communities;
  Rng rng(derive_seed(cfg.seed, "synth"));

  SynthData data;
  data.profiles.resize(n);
  data.truth.resize(n);
  std::vector<Latent> latent(n);

  const Date diag_lo = cfg.study_start - cfg.history_days;
  const std::int32_t diag_span = std::max(1, intervals.back().start - diag_lo);
  const int id_width = std::max(5, digits(n));
  const std::vector<double> age_weights = {0.05, 0.15, 0.25, 0.30, 0.25};
  const Categorical age_dist(age_weights);

  for (std::size_t p = 0; p < n; ++p) {
    Latent& l = latent[p];
    l.community = rng.index(nc);
    l.severity = rng.normal();
    l.multiplier = std::exp(kSeverityEffect * l.severity - 0.5 * kSeverityEffect * kSeverityEffect);
    l.diagnosis = diag_lo + static_cast<std::int32_t>(rng.index(static_cast<std::uint64_t>(diag_span)));

    PatientProfile& prof = data.profiles[p];
    prof.patient_id = padded('P', p + 1, id_width);
    prof.age_bucket = static_cast<int>(age_dist.sample(rng));
    prof.gender = rng.bernoulli(0.6) ? 1 : 0;
    for (std::size_t j = 0; j < kMedicalCovariates; ++j) {
      const double slope = 0.4 + 0.05 * static_cast<double>(j);
      const double offset = -1.0 + 0.1 * static_cast<double>(j);
      prof.covariates[j] = rng.bernoulli(sigmoid(offset + slope * l.severity)) ? 1 : 0;
    }
  }

  auto hazard = [&](double base, const Latent& l) {
    const double gap = high_propensity(l.community, nc) ? cfg.signal_strength : 0.0;
    return std::clamp((base + gap) * l.multiplier, 0.0, kMaxHazard);
  };

  // Expected positive share over all cohort rows. Treatment can only start
  // in a study interval the patient entered already diagnosed.
  auto expected_rate = [&](double base) {
    double rows = 0.0;
    double positives = 0.0;
    for (const Latent& l : latent) {
      const double h = hazard(base, l);
      double untreated = 1.0;
      for (const Interval& iv : intervals) {
        if (!(l.diagnosis < iv.start)) continue;
        rows += untreated;
        positives += untreated * h;
        untreated *= 1.0 - h;
      }
    }
    return rows > 0.0 ? positives / rows : 0.0;
  };

  double lo = 0.0;
  double hi = kMaxHazard;
  const double rate_lo = expected_rate(lo);
  const double rate_hi = expected_rate(hi);
  if (!(cfg.positive_rate_target >= rate_lo && cfg.positive_rate_target <= rate_hi)) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "synth config: positive_rate_target %.4g is outside the achievable range [%.4g, %.4g]",
                  cfg.positive_rate_target, rate_lo, rate_hi);
    throw UsageError(buf);
  }
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (expected_rate(mid) < cfg.positive_rate_target ? lo : hi) = mid;
  }
  data.base_hazard = 0.5 * (lo + hi);
  data.expected_positive_rate = expected_rate(data.base_hazard);

  // Clinician pools per role and community.
  struct RolePool {
    Role role;
    std::vector<std::string> ids;
    std::vector<std::vector<std::size_t>> by_community;
  };
  auto make_pool = [&](Role role, char prefix, std::size_t count) {
    RolePool pool{role, {}, std::vector<std::vector<std::size_t>>(nc)};
    const int w = std::max(4, digits(count));
    for (std::size_t i = 0; i < count; ++i) {
      pool.ids.push_back(padded(prefix, i + 1, w));
      pool.by_community[i % nc].push_back(i);
    }
    return pool;
  };
  const RolePool diag_pool = make_pool(Role::Diag, 'D', cfg.n_diag_clinicians);
  const RolePool follow_pool = make_pool(Role::FollowUp, 'F', cfg.n_followup_clinicians);

  auto fresh_clinician = [&](const RolePool& pool, std::size_t community) {
    if (rng.bernoulli(cfg.community_affinity)) {
      const auto& members = pool.by_community[community];
      return members[rng.index(members.size())];
    }
    return static_cast<std::size_t>(rng.index(pool.ids.size()));
  };

  // Codes: a Zipf background plus a block whose use grows with severity.
  const int code_width = std::max(3, digits(cfg.n_codes));
  std::vector<std::string> codes;
  std::vector<double> zipf;
  for (std::size_t c = 0; c < cfg.n_codes; ++c) {
    codes.push_back(padded('C', c + 1, code_width));
    zipf.push_back(1.0 / static_cast<double>(c + 1));
  }
  const Categorical code_dist(zipf);
  const std::size_t sev_first = cfg.n_codes / 4;
  const std::size_t sev_count = std::max<std::size_t>(1, cfg.n_codes / 8);

  const Date horizon_lo = diag_lo - kPreDiagnosisVisits;
  for (std::size_t p = 0; p < n; ++p) {
    const Latent& l = latent[p];
    const std::string& pid = data.profiles[p].patient_id;
    const std::size_t regular_diag = fresh_clinician(diag_pool, l.community);
    const std::size_t regular_follow = fresh_clinician(follow_pool, l.community);
    auto pick = [&](const RolePool& pool, std::size_t regular) {
      const std::size_t i =
          rng.bernoulli(cfg.clinician_loyalty) ? regular : fresh_clinician(pool, l.community);
      return pool.ids[i];
    };

    data.events.push_back({pid, pick(diag_pool, regular_diag), l.diagnosis, EventType::Diagnosis,
                           Role::Diag, kDiagnosisCode});

    const Date first = std::max(horizon_lo, l.diagnosis - kPreDiagnosisVisits);
    const std::int32_t span = cfg.study_end - first;
    const double sev_share = std::min(0.8, 0.1 * std::exp(0.9 * l.severity));
    const std::uint64_t visits =
        rng.poisson(cfg.visits_per_patient * static_cast<double>(span) / 365.0);
    for (std::uint64_t v = 0; v < visits; ++v) {
      const Date when = first + static_cast<std::int32_t>(rng.index(static_cast<std::uint64_t>(span)));
      const bool diag_role = rng.bernoulli(cfg.diag_visit_share);
      const std::string clinician =
          diag_role ? pick(diag_pool, regular_diag) : pick(follow_pool, regular_follow);
      const std::size_t code = rng.bernoulli(sev_share)
                                   ? std::min(cfg.n_codes - 1, sev_first + rng.index(sev_count))
                                   : code_dist.sample(rng);
      data.events.push_back({pid, clinician, when, EventType::Service,
                             diag_role ? Role::Diag : Role::FollowUp, codes[code]});
    }

    const double h = hazard(data.base_hazard, l);
    for (const Interval& iv : intervals) {
      if (!(l.diagnosis < iv.start)) continue;
      if (rng.bernoulli(h)) {
        const Date when =
            iv.start + static_cast<std::int32_t>(rng.index(static_cast<std::uint64_t>(iv.length_days())));
        data.events.push_back({pid, "", when, EventType::Treatment, Role::NA, kTreatmentCode});
        break;
      }
    }
    data.truth[p] = {pid, l.community, l.severity, h};
  }

  std::stable_sort(data.events.begin(), data.events.end(), [](const VisitEvent& a, const VisitEvent& b) {
    return a.date != b.date ? a.date < b.date : a.patient_id < b.patient_id;
  });
  return data;
}

}  // namespace relsim
