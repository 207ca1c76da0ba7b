#include "time_util.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace fshan::timeutil {

namespace {

bool parse_fixed_int(std::string_view text, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > text.size()) return false;
  int value = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    char c = text[i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  out = value;
  return true;
}

}  // namespace

std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& year, int& month, int& day) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  month = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  year = static_cast<int>(y + (month <= 2));
}

std::optional<double> parse_iso8601(std::string_view text) {
  int year, month, day, hour, minute, second;
  if (text.size() < 19) return std::nullopt;
  if (!parse_fixed_int(text, 0, 4, year)) return std::nullopt;
  if (text[4] != '-') return std::nullopt;
  if (!parse_fixed_int(text, 5, 2, month)) return std::nullopt;
  if (text[7] != '-') return std::nullopt;
  if (!parse_fixed_int(text, 8, 2, day)) return std::nullopt;
  if (text[10] != 'T' && text[10] != ' ') return std::nullopt;
  if (!parse_fixed_int(text, 11, 2, hour)) return std::nullopt;
  if (text[13] != ':') return std::nullopt;
  if (!parse_fixed_int(text, 14, 2, minute)) return std::nullopt;
  if (text[16] != ':') return std::nullopt;
  if (!parse_fixed_int(text, 17, 2, second)) return std::nullopt;
  if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;
  if (hour > 23 || minute > 59 || second > 60) return std::nullopt;

  std::size_t pos = 19;
  double fraction = 0.0;
  if (pos < text.size() && text[pos] == '.') {
    std::size_t digits = 0;
    double scale = 0.1;
    ++pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      fraction += (text[pos] - '0') * scale;
      scale *= 0.1;
      ++pos;
      ++digits;
    }
    if (digits == 0) return std::nullopt;
  }

  std::int64_t zone_offset = 0;
  if (pos < text.size()) {
    char c = text[pos];
    if (c == 'Z') {
      ++pos;
    } else if (c == '+' || c == '-') {
      int zh, zm;
      if (!parse_fixed_int(text, pos + 1, 2, zh)) return std::nullopt;
      std::size_t mpos = pos + 3;
      if (mpos < text.size() && text[mpos] == ':') ++mpos;
      if (!parse_fixed_int(text, mpos, 2, zm)) return std::nullopt;
      if (zh > 23 || zm > 59) return std::nullopt;
      zone_offset = (c == '+' ? 1 : -1) * (zh * 3600 + zm * 60);
      pos = mpos + 2;
    } else {
      return std::nullopt;
    }
  }
  if (pos != text.size()) return std::nullopt;

  const std::int64_t days = days_from_civil(year, month, day);
  const std::int64_t secs =
      days * 86400 + hour * 3600 + minute * 60 + second - zone_offset;
  return static_cast<double>(secs) + fraction;
}

std::string format_iso8601(double epoch_seconds) {
  double whole = std::floor(epoch_seconds);
  long long ms = std::llround((epoch_seconds - whole) * 1000.0);
  if (ms >= 1000) {
    whole += 1.0;
    ms = 0;
  }
  std::int64_t total = static_cast<std::int64_t>(whole);
  std::int64_t days = total / 86400;
  std::int64_t sod = total % 86400;
  if (sod < 0) {
    sod += 86400;
    days -= 1;
  }
  int year, month, day;
  civil_from_days(days, year, month, day);
  const int hour = static_cast<int>(sod / 3600);
  const int minute = static_cast<int>((sod % 3600) / 60);
  const int second = static_cast<int>(sod % 60);
  char buf[40];
  if (ms > 0) {
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03lldZ",
                  year, month, day, hour, minute, second, ms);
  } else {
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                  year, month, day, hour, minute, second);
  }
  return buf;
}

}  // namespace fshan::timeutil
