#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "relsim/error.hpp"
#include "relsim/events.hpp"

using namespace relsim;

namespace {

std::string log_text(const std::string& rows) { return std::string(kEventHeader) + "\n" + rows; }

}  // namespace

TEST_CASE("well-formed log loads in file order") {
  std::istringstream in(log_text(
      "p1,c1,2018-01-02,DIAGNOSIS,DIAG,C91\n"
      "p1,c2,2018-02-03,SERVICE,FOLLOWUP,X1\n"
      "p1,,2018-03-04,TREATMENT,NA,TX\n"));
  const auto ev = parse_events(in, "mem");
  REQUIRE(ev.size() == 3);
  CHECK(ev[0].type == EventType::Diagnosis);
  CHECK(ev[1].role == Role::FollowUp);
  CHECK(ev[2].clinician_id.empty());
  CHECK(ev[2].date == Date::from_ymd(2018, 3, 4));
}

TEST_CASE("header-only log is empty") {
  std::istringstream in(log_text(""));
  CHECK(parse_events(in).empty());
}

TEST_CASE("parse errors name line and column") {
  std::istringstream bad_month(log_text("p1,c1,2018-01-02,SERVICE,DIAG,X\np1,c1,2018-13-01,SERVICE,DIAG,X\n"));
  CHECK_THROWS_WITH_AS(parse_events(bad_month, "log.csv"), doctest::Contains("log.csv: line 3, column 3 (date)"),
                       DataError);
  std::istringstream bad_type(log_text("p1,c1,2018-01-02,VISIT,DIAG,X\n"));
  CHECK_THROWS_WITH_AS(parse_events(bad_type), doctest::Contains("event_type"), DataError);
  std::istringstream bad_role(log_text("p1,c1,2018-01-02,SERVICE,NURSE,X\n"));
  CHECK_THROWS_WITH_AS(parse_events(bad_role), doctest::Contains("role"), DataError);
  std::istringstream missing_clin(log_text("p1,,2018-01-02,SERVICE,DIAG,X\n"));
  CHECK_THROWS_AS(parse_events(missing_clin), DataError);
  std::istringstream treat_role(log_text("p1,c1,2018-01-02,TREATMENT,DIAG,TX\n"));
  CHECK_THROWS_AS(parse_events(treat_role), DataError);
  std::istringstream short_row(log_text("p1,c1,2018-01-02\n"));
  CHECK_THROWS_WITH_AS(parse_events(short_row), doctest::Contains("line 2"), DataError);
  std::istringstream wrong_header("patient,clinician\n");
  CHECK_THROWS_AS(parse_events(wrong_header), DataError);
}

TEST_CASE("write then parse is the identity") {
  std::vector<VisitEvent> ev = {
      {"p1", "c1", Date::from_ymd(2018, 1, 2), EventType::Diagnosis, Role::Diag, "C91"},
      {"p2", "", Date::from_ymd(2018, 5, 6), EventType::Treatment, Role::NA, "TX"},
      {"p3", "c9", Date::from_ymd(2017, 12, 31), EventType::Service, Role::FollowUp, "S7"},
  };
  std::ostringstream out;
  write_events(out, ev);
  std::istringstream in(out.str());
  CHECK(parse_events(in) == ev);
}
