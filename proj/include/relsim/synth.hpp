#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relsim/cohort.hpp"
#include "relsim/date.hpp"
#include "relsim/events.hpp"

namespace relsim {

/// Parameters of the synthetic claims generator. Patients belong to planted
/// clinician communities; one community in five (at least one) has a
/// treatment hazard raised by `signal_strength`.
struct SynthConfig {
  std::size_t n_patients = 12000;
  std::size_t n_diag_clinicians = 200;
  std::size_t n_followup_clinicians = 60;
  std::size_t n_communities = 5;
  /// Additive gap in per-interval treatment hazard between high and low
  /// propensity communities.
  double signal_strength = 0.3;
  /// Mean SERVICE visits per patient per 365 days of follow-up.
  double visits_per_patient = 8.0;
  /// Target share of positive rows across all cohort intervals.
  double positive_rate_target = 0.093;
  std::uint64_t seed = 1;

  /// Probability a visit goes to a clinician of the patient's community.
  double community_affinity = 0.8;
  /// Probability a visit returns to the patient's regular clinician.
  double clinician_loyalty = 0.5;
  /// Share of SERVICE visits with the DIAG role.
  double diag_visit_share = 0.6;
  std::size_t n_codes = 80;

  Date study_start = Date::from_ymd(2017, 7, 1);
  Date study_end = Date::from_ymd(2019, 1, 1);
  std::size_t n_intervals = 3;
  /// Diagnoses fall in [study_start - history_days, last interval start).
  std::int32_t history_days = 730;

  /// Throws UsageError on out-of-range values.
  void validate() const;
};

/// Latent per-patient values, exposed for tests.
struct SynthTruth {
  std::string patient_id;
  std::size_t community = 0;
  double severity = 0.0;
  double hazard = 0.0;
};

struct SynthData {
  std::vector<VisitEvent> events;  // sorted by date, then patient id
  std::vector<PatientProfile> profiles;
  std::vector<SynthTruth> truth;
  /// Baseline hazard found by calibration.
  double base_hazard = 0.0;
  /// Expected positive-row share at that hazard.
  double expected_positive_rate = 0.0;
};

/// Generates a deterministic synthetic event log. Throws UsageError when
/// positive_rate_target lies outside the range the configuration can reach.
SynthData synth_generate(const SynthConfig& cfg);

}  // namespace relsim
