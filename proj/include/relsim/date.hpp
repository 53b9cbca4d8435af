#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace relsim {

/// Calendar date stored as days since 1970-01-01 (proleptic Gregorian).
class Date {
 public:
  constexpr Date() = default;

  static constexpr Date from_days(std::int32_t days) {
    Date d;
    d.days_ = days;
    return d;
  }

  /// Throws DataError if the triple is not a valid calendar date.
  static Date from_ymd(int year, unsigned month, unsigned day);

  /// Strict `YYYY-MM-DD`; nullopt on any deviation or invalid date.
  static std::optional<Date> parse(std::string_view iso);

  std::int32_t days() const { return days_; }
  int year() const;
  unsigned month() const;
  unsigned day() const;

  std::string to_string() const;

  Date operator+(std::int32_t n) const { return from_days(days_ + n); }
  Date operator-(std::int32_t n) const { return from_days(days_ - n); }
  std::int32_t operator-(Date other) const { return days_ - other.days_; }

  friend constexpr auto operator<=>(Date, Date) = default;

 private:
  std::int32_t days_ = 0;
};

/// Half-open date range [start, end).
struct Interval {
  Date start;
  Date end;

  bool contains(Date d) const { return start <= d && d < end; }
  std::int32_t length_days() const { return end - start; }
  bool empty() const { return !(start < end); }

  friend bool operator==(const Interval&, const Interval&) = default;
};

}  // namespace relsim
