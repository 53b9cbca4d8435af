#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relsim/date.hpp"

namespace relsim {

enum class EventType { Diagnosis, Service, Treatment };

/// Which clinician graph a visit belongs to. `NA` marks events without a
/// clinician relation (treatments, demographics-like service rows).
enum class Role { Diag, FollowUp, NA };

std::string_view to_string(EventType t);
std::string_view to_string(Role r);

/// One row of the event log.
struct VisitEvent {
  std::string patient_id;
  std::string clinician_id;  // empty when absent
  Date date;
  EventType type = EventType::Service;
  Role role = Role::NA;
  std::string code;

  friend bool operator==(const VisitEvent&, const VisitEvent&) = default;
};

inline constexpr std::string_view kEventHeader = "patient_id,clinician_id,date,event_type,role,code";

/// Throws DataError if the event violates the log invariants: treatments
/// carry role NA, and any other role needs a clinician id.
void validate(const VisitEvent& e);

/// Parses an event log. `source` names the stream in error messages, which
/// also carry the 1-based line number and the offending column.
std::vector<VisitEvent> parse_events(std::istream& in, std::string_view source = "<stream>");
std::vector<VisitEvent> load_events(const std::filesystem::path& path);

void write_events(std::ostream& out, std::span<const VisitEvent> events);
void save_events(const std::filesystem::path& path, std::span<const VisitEvent> events);

}  // namespace relsim
