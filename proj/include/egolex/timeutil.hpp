#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace egolex {

using Timestamp = std::chrono::sys_seconds;

inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kDaysPerMonth = 30.44;
inline constexpr double kDaysPerYear = 365.25;

/// Parses "YYYY-MM-DDTHH:MM:SS" followed by "Z", "+00:00" or nothing.
/// Throws DataError on anything else, including non-UTC offsets.
Timestamp parse_iso8601(std::string_view text);

/// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(Timestamp t);

double seconds_between(Timestamp from, Timestamp to);
double months_between(Timestamp from, Timestamp to);  // 30.44-day months
double years_between(Timestamp from, Timestamp to);   // 365.25-day years

Timestamp minus_years(Timestamp t, double years);

/// year * 12 + (month - 1), UTC. Consecutive calendar months map to consecutive integers.
int calendar_month_index(Timestamp t);

}  // namespace egolex
