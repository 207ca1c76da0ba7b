#include "ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "time_util.hpp"

namespace fshan::ingest {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == delimiter) {
      fields.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return fields;
}

bool parse_double(std::string_view field, double& out) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

TimeSeries read_csv(const std::string& path, const std::string& channel_id,
                    const CsvOptions& options, CsvDiagnostics* diagnostics) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);

  CsvDiagnostics diag;
  std::string line;

  // Header: first non-comment line.
  bool have_header = false;
  std::size_t ts_col = 0, val_col = 0;
  while (std::getline(in, line)) {
    std::string_view view = line;
    if (view.size() >= 3 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
    const std::string_view stripped = trim(view);
    if (stripped.empty() || stripped.front() == '#') continue;
    auto header = split_fields(view, options.delimiter);
    auto find = [&](const std::string& name) {
      for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
      return header.size();
    };
    ts_col = find(options.timestamp_column);
    val_col = find(options.value_column);
    if (ts_col == header.size())
      throw ParseError("timestamp column '" + options.timestamp_column +
                       "' not found in header of " + path);
    if (val_col == header.size())
      throw ParseError("value column '" + options.value_column +
                       "' not found in header of " + path);
    have_header = true;
    break;
  }
  if (!have_header) throw ParseError("missing header row in " + path);

  TimeSeries series;
  series.channel_id = channel_id;
  series.units = options.units;

  const std::size_t ncols = std::max(ts_col, val_col) + 1;
  while (std::getline(in, line)) {
    std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') continue;
    ++diag.rows_total;
    auto fields = split_fields(line, options.delimiter);
    if (fields.size() < ncols) {
      ++diag.rows_dropped_malformed;
      continue;
    }
    double ts;
    if (options.timestamp_format == TimestampFormat::epoch_seconds) {
      if (!parse_double(fields[ts_col], ts)) {
        ++diag.rows_dropped_malformed;
        continue;
      }
    } else {
      auto parsed = timeutil::parse_iso8601(fields[ts_col]);
      if (!parsed) {
        ++diag.rows_dropped_malformed;
        continue;
      }
      ts = *parsed;
    }
    if (!std::isfinite(ts)) {
      ++diag.rows_dropped_malformed;
      continue;
    }
    std::string_view value_field = fields[val_col];
    if (value_field.empty()) {
      ++diag.rows_dropped_nonfinite;
      continue;
    }
    double value;
    if (!parse_double(value_field, value)) {
      ++diag.rows_dropped_malformed;
      continue;
    }
    if (!std::isfinite(value)) {
      ++diag.rows_dropped_nonfinite;
      continue;
    }
    series.timestamps.push_back(ts);
    series.values.push_back(value);
  }
  if (in.bad()) throw IoError("read error on " + path);

  if (diagnostics) *diagnostics = diag;

  if (diag.rows_total == 0) throw ParseError("no data rows in " + path);
  if (static_cast<double>(diag.rows_dropped_malformed) >
      options.max_malformed_fraction * static_cast<double>(diag.rows_total)) {
    std::ostringstream msg;
    msg << path << ": " << diag.rows_dropped_malformed << " of " << diag.rows_total
        << " rows are malformed, above the tolerance of " << options.max_malformed_fraction;
    throw ParseError(msg.str());
  }
  if (series.values.empty())
    throw ParseError("no usable rows in " + path + " after cleaning");

  for (std::size_t i = 1; i < series.timestamps.size(); ++i) {
    if (!(series.timestamps[i] > series.timestamps[i - 1])) {
      std::ostringstream msg;
      msg << path << ": non-increasing timestamps after cleaning (sample " << i
          << ", t=" << series.timestamps[i] << " follows t=" << series.timestamps[i - 1]
          << ")";
      throw ParseError(msg.str());
    }
  }
  return series;
}

std::vector<Window> partition_daily(const TimeSeries& series,
                                    long long utc_offset_seconds,
                                    std::size_t min_samples) {
  if (series.timestamps.empty())
    throw std::invalid_argument("cannot partition an empty series");

  const double offset = static_cast<double>(utc_offset_seconds);
  auto day_index = [offset](double t) {
    return static_cast<std::int64_t>(std::floor((t + offset) / 86400.0));
  };

  std::vector<Window> windows;
  std::size_t i = 0;
  const std::size_t n = series.timestamps.size();
  while (i < n) {
    const std::int64_t day = day_index(series.timestamps[i]);
    std::size_t j = i + 1;
    while (j < n && day_index(series.timestamps[j]) == day) ++j;
    Window w;
    w.start = static_cast<double>(day) * 86400.0 - offset;
    w.end = w.start + 86400.0;
    w.first = i;
    w.count = j - i;
    w.insufficient = w.count < min_samples;
    windows.push_back(w);
    i = j;
  }
  return windows;
}

}  // namespace fshan::ingest
