#include "egolex/timeutil.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "egolex/error.hpp"

namespace egolex {
namespace {

int parse_fixed(std::string_view text, std::size_t pos, std::size_t width) {
  if (pos + width > text.size()) {
    throw DataError(fmt::format("bad timestamp '{}'", text));
  }
  int value = 0;
  const char* first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + width, value);
  if (ec != std::errc() || ptr != first + width) {
    throw DataError(fmt::format("bad timestamp '{}'", text));
  }
  return value;
}

void expect_char(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c) {
    throw DataError(fmt::format("bad timestamp '{}'", text));
  }
}

}  // namespace

Timestamp parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  const int y = parse_fixed(text, 0, 4);
  expect_char(text, 4, '-');
  const int mo = parse_fixed(text, 5, 2);
  expect_char(text, 7, '-');
  const int d = parse_fixed(text, 8, 2);
  if (text.size() <= 10 || (text[10] != 'T' && text[10] != ' ')) {
    throw DataError(fmt::format("bad timestamp '{}'", text));
  }
  const int hh = parse_fixed(text, 11, 2);
  expect_char(text, 13, ':');
  const int mm = parse_fixed(text, 14, 2);
  expect_char(text, 16, ':');
  const int ss = parse_fixed(text, 17, 2);
  std::string_view rest = text.substr(19);
  // Fractional seconds are truncated.
  if (!rest.empty() && rest.front() == '.') {
    std::size_t i = 1;
    while (i < rest.size() && rest[i] >= '0' && rest[i] <= '9') ++i;
    rest = rest.substr(i);
  }
  if (!(rest.empty() || rest == "Z" || rest == "+00:00" || rest == "+0000")) {
    throw DataError(fmt::format("timestamp '{}' is not UTC", text));
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60) {
    throw DataError(fmt::format("bad timestamp '{}'", text));
  }
  return sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
}

std::string format_iso8601(Timestamp t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{t - day_point};
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                     hms.hours().count(), hms.minutes().count(), hms.seconds().count());
}

double seconds_between(Timestamp from, Timestamp to) {
  return static_cast<double>((to - from).count());
}

double months_between(Timestamp from, Timestamp to) {
  return seconds_between(from, to) / (kDaysPerMonth * kSecondsPerDay);
}

double years_between(Timestamp from, Timestamp to) {
  return seconds_between(from, to) / (kDaysPerYear * kSecondsPerDay);
}

Timestamp minus_years(Timestamp t, double years) {
  const auto secs = static_cast<long long>(std::llround(years * kDaysPerYear * kSecondsPerDay));
  return t - std::chrono::seconds{secs};
}

int calendar_month_index(Timestamp t) {
  using namespace std::chrono;
  const year_month_day ymd{floor<days>(t)};
  return static_cast<int>(ymd.year()) * 12 + static_cast<int>(static_cast<unsigned>(ymd.month())) - 1;
}

}  // namespace egolex
