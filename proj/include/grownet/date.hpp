#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace grownet {

// Proleptic Gregorian calendar date. Ordered by (year, month, day).
struct Date {
  int32_t year = 1970;
  int32_t month = 1;
  int32_t day = 1;

  auto operator<=>(const Date&) const = default;

  static bool is_leap(int32_t y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  }

  static int32_t days_in_month(int32_t y, int32_t m) {
    static constexpr int32_t lengths[12] = {31, 28, 31, 30, 31, 30,
                                            31, 31, 30, 31, 30, 31};
    if (m < 1 || m > 12) return 0;
    if (m == 2 && is_leap(y)) return 29;
    return lengths[m - 1];
  }

  bool valid() const {
    return month >= 1 && month <= 12 && day >= 1 &&
           day <= days_in_month(year, month);
  }

  // Strict ISO-8601 YYYY-MM-DD. Returns nullopt on any deviation.
  static std::optional<Date> parse(std::string_view s);

  std::string to_string() const;
};

// Inclusive calendar interval.
struct DateInterval {
  Date start;
  Date end;

  bool contains(const Date& d) const { return start <= d && d <= end; }
  bool valid() const { return start.valid() && end.valid() && start <= end; }
};

// "YYYY-MM-DD:YYYY-MM-DD" or the shorthand "YYYY:YYYY" (whole years).
std::optional<DateInterval> parse_interval(std::string_view s);

}  // namespace grownet
