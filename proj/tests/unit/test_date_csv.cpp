#include <sstream>

#include "doctest.h"
#include "relsim/csv.hpp"
#include "relsim/date.hpp"
#include "relsim/error.hpp"

using relsim::Date;

TEST_CASE("date parses strict ISO dates and round-trips") {
  const auto d = Date::parse("2018-07-02");
  REQUIRE(d);
  CHECK(d->year() == 2018);
  CHECK(d->month() == 7u);
  CHECK(d->day() == 2u);
  CHECK(d->to_string() == "2018-07-02");
  CHECK(Date::from_ymd(1970, 1, 1).days() == 0);
  CHECK((Date::from_ymd(2019, 1, 1) - Date::from_ymd(2017, 7, 1)) == 549);
}

TEST_CASE("date rejects malformed and impossible dates") {
  CHECK_FALSE(Date::parse("2018-13-01"));
  CHECK_FALSE(Date::parse("2018-02-30"));
  CHECK_FALSE(Date::parse("2018-2-3"));
  CHECK_FALSE(Date::parse("18-02-03"));
  CHECK_FALSE(Date::parse("2018/02/03"));
  CHECK_FALSE(Date::parse(""));
  CHECK(Date::parse("2016-02-29"));
  CHECK_FALSE(Date::parse("2017-02-29"));
  CHECK_THROWS_AS(Date::from_ymd(2017, 2, 29), relsim::DataError);
}

TEST_CASE("interval is half open") {
  const relsim::Interval iv{Date::from_ymd(2018, 1, 1), Date::from_ymd(2018, 1, 11)};
  CHECK(iv.contains(iv.start));
  CHECK_FALSE(iv.contains(iv.end));
  CHECK(iv.length_days() == 10);
  CHECK_FALSE(iv.empty());
}

TEST_CASE("csv helpers") {
  const auto f = relsim::csv::split("a,,b\r");
  REQUIRE(f.size() == 3);
  CHECK(f[1].empty());
  CHECK(f[2] == "b");
  CHECK(relsim::csv::split("").size() == 1);

  SUBCASE("doubles round-trip at 17 significant digits") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789, 0.0}) {
      CHECK(relsim::csv::parse_double(relsim::csv::format_double(v), "t") == v);
    }
  }
  CHECK_THROWS_AS(relsim::csv::parse_double("1.5x", "t"), relsim::DataError);
  CHECK_THROWS_AS(relsim::csv::parse_int("", "t"), relsim::DataError);
  CHECK(relsim::csv::parse_int("-42", "t") == -42);

  std::istringstream in("\xEF\xBB\xBFx,y\n");
  CHECK_NOTHROW(relsim::csv::expect_header(in, "x,y", "mem"));
  std::istringstream bad("x,z\n");
  CHECK_THROWS_WITH_AS(relsim::csv::expect_header(bad, "x,y", "mem"),
                       doctest::Contains("mem: line 1"), relsim::DataError);
}
