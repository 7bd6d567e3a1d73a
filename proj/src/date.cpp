#include "grownet/date.hpp"

#include <charconv>
#include <cstdio>

namespace grownet {

namespace {

bool parse_int_field(std::string_view s, int32_t& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::optional<Date> Date::parse(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  Date d;
  if (!parse_int_field(s.substr(0, 4), d.year)) return std::nullopt;
  if (!parse_int_field(s.substr(5, 2), d.month)) return std::nullopt;
  if (!parse_int_field(s.substr(8, 2), d.day)) return std::nullopt;
  if (!d.valid()) return std::nullopt;
  return d;
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

std::optional<DateInterval> parse_interval(std::string_view s) {
  auto colon = s.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  std::string_view lhs = s.substr(0, colon);
  std::string_view rhs = s.substr(colon + 1);
  DateInterval iv;
  if (lhs.size() == 4 && rhs.size() == 4) {  // year:year shorthand
    int32_t y1 = 0, y2 = 0;
    if (!parse_int_field(lhs, y1) || !parse_int_field(rhs, y2)) return std::nullopt;
    iv.start = Date{y1, 1, 1};
    iv.end = Date{y2, 12, 31};
  } else {
    auto a = Date::parse(lhs);
    auto b = Date::parse(rhs);
    if (!a || !b) return std::nullopt;
    iv.start = *a;
    iv.end = *b;
  }
  if (!iv.valid()) return std::nullopt;
  return iv;
}

}  // namespace grownet
