#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace fshan::timeutil {

// Days since 1970-01-01 for a proleptic-Gregorian civil date.
std::int64_t days_from_civil(int year, int month, int day);

// Inverse of days_from_civil.
void civil_from_days(std::int64_t days, int& year, int& month, int& day);

// Parses "YYYY-MM-DD[T ]HH:MM:SS[.frac][Z|+HH:MM|-HH:MM|+HHMM|-HHMM]" into
// UTC epoch seconds. A missing zone designator is read as UTC. Returns
// nullopt on malformed input.
std::optional<double> parse_iso8601(std::string_view text);

// Formats UTC epoch seconds as "YYYY-MM-DDTHH:MM:SS[.mmm]Z"; milliseconds
// appear only for fractional inputs.
std::string format_iso8601(double epoch_seconds);

}  // namespace fshan::timeutil
