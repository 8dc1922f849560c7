#include "gridline/time.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

#include "gridline/error.hpp"

namespace gridline {

namespace {

int read_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
  if (pos + len > text.size()) {
    throw DomainError("timestamp too short: '" + std::string(whole) + "'");
  }
  int value = 0;
  const char* first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc{} || ptr != first + len) {
    throw DomainError("bad timestamp field in '" + std::string(whole) + "'");
  }
  return value;
}

void expect(std::string_view text, std::size_t pos, std::string_view allowed, std::string_view whole) {
  if (pos >= text.size() || allowed.find(text[pos]) == std::string_view::npos) {
    throw DomainError("bad timestamp separator in '" + std::string(whole) + "'");
  }
}

}  // namespace

HourStamp parse_hour(std::string_view text) {
  const std::string_view whole = text;
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);

  const int year = read_int(text, 0, 4, whole);
  expect(text, 4, "-", whole);
  const int month = read_int(text, 5, 2, whole);
  expect(text, 7, "-", whole);
  const int day = read_int(text, 8, 2, whole);
  expect(text, 10, "T ", whole);
  const int hour = read_int(text, 11, 2, whole);
  int minute = 0;
  int second = 0;
  if (text.size() > 13) {
    expect(text, 13, ":", whole);
    minute = read_int(text, 14, 2, whole);
    if (text.size() > 16) {
      expect(text, 16, ":", whole);
      second = read_int(text, 17, 2, whole);
      if (text.size() != 19) throw DomainError("trailing characters in timestamp '" + std::string(whole) + "'");
    }
  }
  if (minute != 0 || second != 0) {
    throw DomainError("non-hourly timestamp '" + std::string(whole) + "'");
  }
  if (hour < 0 || hour > 23) throw DomainError("hour out of range in '" + std::string(whole) + "'");

  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) throw DomainError("invalid calendar date in '" + std::string(whole) + "'");
  const auto days_since_epoch = sys_days{ymd}.time_since_epoch().count();
  return HourStamp{static_cast<std::int64_t>(days_since_epoch) * 24 + hour};
}

std::string format_hour(HourStamp stamp) {
  using namespace std::chrono;
  std::int64_t days = stamp.value / 24;
  std::int64_t hour = stamp.value % 24;
  if (hour < 0) {
    hour += 24;
    days -= 1;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:00:00Z", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(hour));
  return buf;
}

}  // namespace gridline
