#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fshan::ingest {

// File could not be opened or read.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File content violates the expected format or the data constraints
// (missing columns, malformed rows beyond tolerance, non-increasing
// timestamps, empty result).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! One channel of timestamped scalar samples.
//! Invariants: timestamps strictly increasing, values finite, length >= 1.
struct TimeSeries {
  std::string channel_id;
  std::string units;  // opaque metadata, e.g. "m/s", "hPa", "degC"
  std::vector<double> timestamps;  // UTC epoch seconds
  std::vector<double> values;
};

enum class TimestampFormat { epoch_seconds, iso8601 };

struct CsvOptions {
  std::string timestamp_column = "t";
  std::string value_column = "v";
  char delimiter = ',';
  TimestampFormat timestamp_format = TimestampFormat::epoch_seconds;
  // A row that cannot be parsed at all is dropped; if the fraction of such
  // rows exceeds this limit, ingestion fails.
  double max_malformed_fraction = 0.01;
  std::string units;
};

struct CsvDiagnostics {
  std::uint64_t rows_total = 0;              // data rows seen (header excluded)
  std::uint64_t rows_dropped_nonfinite = 0;  // value missing, NaN or infinite
  std::uint64_t rows_dropped_malformed = 0;  // row structure or parse failure
};

//! Reads one channel from a CSV file. A header row is required; full-line
//! comments starting with '#' are skipped. Rows with a missing or
//! non-finite value are dropped and counted; structurally malformed rows
//! are dropped, counted, and fail ingestion past the configured tolerance.
//! Throws IoError / ParseError.
TimeSeries read_csv(const std::string& path, const std::string& channel_id,
                    const CsvOptions& options, CsvDiagnostics* diagnostics = nullptr);

//! A contiguous slice of a TimeSeries covering one calendar day
//! [00:00, 24:00) in the clock shifted by the configured UTC offset.
//! start/end are UTC epoch seconds; [first, first + count) indexes the
//! parent series.
struct Window {
  double start = 0.0;  // inclusive
  double end = 0.0;    // exclusive
  std::size_t first = 0;
  std::size_t count = 0;
  bool insufficient = false;  // fewer samples than the configured minimum
};

//! Partitions a series into calendar-day windows in the clock shifted by
//! `utc_offset_seconds`. Every sample lands in exactly one window; days
//! without samples produce no window. Windows with fewer than
//! `min_samples` samples are flagged insufficient.
std::vector<Window> partition_daily(const TimeSeries& series,
                                    long long utc_offset_seconds,
                                    std::size_t min_samples = 1000);

}  // namespace fshan::ingest
