#include "relsim/events.hpp"

#include <array>
#include <istream>
#include <optional>
#include <ostream>

#include "relsim/csv.hpp"
#include "relsim/error.hpp"

namespace relsim {

namespace {

constexpr std::array<std::string_view, 6> kColumns = {"patient_id", "clinician_id", "date",
                                                      "event_type", "role",         "code"};

std::optional<EventType> parse_event_type(std::string_view s) {
  if (s == "DIAGNOSIS") return EventType::Diagnosis;
  if (s == "SERVICE") return EventType::Service;
  if (s == "TREATMENT") return EventType::Treatment;
  return std::nullopt;
}

std::optional<Role> parse_role(std::string_view s) {
  if (s == "DIAG") return Role::Diag;
  if (s == "FOLLOWUP") return Role::FollowUp;
  if (s == "NA") return Role::NA;
  return std::nullopt;
}

[[noreturn]] void fail(std::string_view source, std::size_t line, std::size_t column,
                       const std::string& msg) {
  throw DataError(std::string(source) + ": line " + std::to_string(line) + ", column " +
                  std::to_string(column + 1) + " (" + std::string(kColumns[column]) + "): " + msg);
}

}  // namespace

std::string_view to_string(EventType t) {
  switch (t) {
    case EventType::Diagnosis: return "DIAGNOSIS";
    case EventType::Service: return "SERVICE";
    case EventType::Treatment: return "TREATMENT";
  }
  return "?";
}

std::string_view to_string(Role r) {
  switch (r) {
    case Role::Diag: return "DIAG";
    case Role::FollowUp: return "FOLLOWUP";
    case Role::NA: return "NA";
  }
  return "?";
}

void validate(const VisitEvent& e) {
  if (e.patient_id.empty()) throw DataError("event has empty patient_id");
  if (e.type == EventType::Treatment && e.role != Role::NA) {
    throw DataError("TREATMENT event for patient '" + e.patient_id + "' must carry role NA");
  }
  if (e.role != Role::NA && e.clinician_id.empty()) {
    throw DataError("event for patient '" + e.patient_id + "' with role " +
                    std::string(to_string(e.role)) + " requires a clinician_id");
  }
}

std::vector<VisitEvent> parse_events(std::istream& in, std::string_view source) {
  csv::expect_header(in, kEventHeader, source);
  csv::LineReader reader(in, 1);
  std::vector<VisitEvent> events;
  std::string line;
  while (reader.next(line)) {
    const std::size_t ln = reader.line_number();
    const auto f = csv::split(line);
    if (f.size() != kColumns.size()) {
      throw DataError(std::string(source) + ": line " + std::to_string(ln) + ": expected " +
                      std::to_string(kColumns.size()) + " columns, found " +
                      std::to_string(f.size()));
    }
    VisitEvent e;
    if (f[0].empty()) fail(source, ln, 0, "empty patient id");
    e.patient_id = std::string(f[0]);
    e.clinician_id = std::string(f[1]);
    const auto date = Date::parse(f[2]);
    if (!date) fail(source, ln, 2, "invalid date '" + std::string(f[2]) + "'");
    e.date = *date;
    const auto type = parse_event_type(f[3]);
    if (!type) fail(source, ln, 3, "unknown event_type '" + std::string(f[3]) + "'");
    e.type = *type;
    const auto role = parse_role(f[4]);
    if (!role) fail(source, ln, 4, "unknown role '" + std::string(f[4]) + "'");
    e.role = *role;
    e.code = std::string(f[5]);
    if (e.type == EventType::Treatment && e.role != Role::NA) {
      fail(source, ln, 4, "TREATMENT events must carry role NA");
    }
    if (e.role != Role::NA && e.clinician_id.empty()) {
      fail(source, ln, 1, "role " + std::string(f[4]) + " requires a clinician_id");
    }
    events.push_back(std::move(e));
  }
  return events;
}

std::vector<VisitEvent> load_events(const std::filesystem::path& path) {
  auto in = csv::open_input(path);
  return parse_events(in, path.string());
}

void write_events(std::ostream& out, std::span<const VisitEvent> events) {
  out << kEventHeader << '\n';
  for (const auto& e : events) {
    out << e.patient_id << ',' << e.clinician_id << ',' << e.date.to_string() << ','
        << to_string(e.type) << ',' << to_string(e.role) << ',' << e.code << '\n';
  }
}

void save_events(const std::filesystem::path& path, std::span<const VisitEvent> events) {
  auto out = csv::open_output(path);
  write_events(out, events);
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

}  // namespace relsim
