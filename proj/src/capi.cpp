#include "fisher_shannon/fisher_shannon.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <span>
#include <string>

#include "fisher_shannon.hpp"
#include "ingest.hpp"
#include "kde.hpp"
#include "stats.hpp"
#include "synthetic.hpp"
#include "time_util.hpp"

struct fs_series {
  fshan::ingest::TimeSeries impl;
};

struct fs_density {
  fshan::kde::DensityEstimate impl;
};

namespace {

thread_local std::string g_last_error;

fs_status set_error(fs_status code, const char* what) {
  g_last_error = what ? what : "";
  return code;
}

template <typename F>
fs_status wrap(F&& body) noexcept {
  try {
    return body();
  } catch (const fshan::ingest::IoError& e) {
    return set_error(FS_ERR_IO, e.what());
  } catch (const fshan::ingest::ParseError& e) {
    return set_error(FS_ERR_PARSE, e.what());
  } catch (const std::overflow_error& e) {
    return set_error(FS_ERR_OVERFLOW, e.what());
  } catch (const std::invalid_argument& e) {
    return set_error(FS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(FS_ERR_NOMEM, "out of memory");
  } catch (const std::exception& e) {
    return set_error(FS_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(FS_ERR_INTERNAL, "unknown error");
  }
}

fs_status require(bool condition, const char* what) {
  if (condition) return FS_OK;
  throw std::invalid_argument(what);
}

fshan::kde::BandwidthMethod to_cpp(fs_bandwidth_method m) {
  switch (m) {
    case FS_BW_SILVERMAN:
      return fshan::kde::BandwidthMethod::silverman;
    case FS_BW_PLUGIN:
      return fshan::kde::BandwidthMethod::plugin;
    case FS_BW_FIXED:
      return fshan::kde::BandwidthMethod::fixed;
  }
  throw std::invalid_argument("unknown bandwidth method");
}

fs_bandwidth_method to_c(fshan::kde::BandwidthMethod m) {
  switch (m) {
    case fshan::kde::BandwidthMethod::silverman:
      return FS_BW_SILVERMAN;
    case fshan::kde::BandwidthMethod::plugin:
      return FS_BW_PLUGIN;
    case fshan::kde::BandwidthMethod::fixed:
      return FS_BW_FIXED;
  }
  return FS_BW_SILVERMAN;
}

fshan::kde::EvalMode to_cpp(fs_eval_mode m) {
  switch (m) {
    case FS_EVAL_AUTO:
      return fshan::kde::EvalMode::automatic;
    case FS_EVAL_DIRECT:
      return fshan::kde::EvalMode::direct;
    case FS_EVAL_BINNED:
      return fshan::kde::EvalMode::binned;
  }
  throw std::invalid_argument("unknown evaluation mode");
}

fshan::FsConfig to_cpp(const fs_fit_options& o, size_t min_samples) {
  fshan::FsConfig cfg;
  cfg.bandwidth_method = to_cpp(o.bandwidth_method);
  cfg.fixed_bandwidth = o.fixed_bandwidth;
  cfg.grid_size = o.grid_size;
  cfg.eval_mode = to_cpp(o.eval_mode);
  cfg.min_samples = min_samples;
  return cfg;
}

}  // namespace

extern "C" {

const char* fs_version(void) { return FS_VERSION_STRING; }

const char* fs_last_error(void) { return g_last_error.c_str(); }

fs_csv_options fs_csv_options_default(void) {
  fs_csv_options o;
  o.timestamp_column = "t";
  o.value_column = "v";
  o.delimiter = ',';
  o.timestamp_format = FS_TS_EPOCH_SECONDS;
  o.max_malformed_fraction = 0.01;
  o.units = nullptr;
  return o;
}

fs_status fs_series_read_csv(const char* path, const char* channel_id,
                             const fs_csv_options* options, fs_series** out,
                             fs_csv_diagnostics* diagnostics) {
  return wrap([&]() {
    require(path != nullptr, "path is null");
    require(out != nullptr, "output handle pointer is null");
    fshan::ingest::CsvOptions opts;
    if (options) {
      require(options->timestamp_column != nullptr, "timestamp_column is null");
      require(options->value_column != nullptr, "value_column is null");
      opts.timestamp_column = options->timestamp_column;
      opts.value_column = options->value_column;
      opts.delimiter = options->delimiter;
      opts.timestamp_format = options->timestamp_format == FS_TS_ISO8601
                                  ? fshan::ingest::TimestampFormat::iso8601
                                  : fshan::ingest::TimestampFormat::epoch_seconds;
      opts.max_malformed_fraction = options->max_malformed_fraction;
      if (options->units) opts.units = options->units;
    }
    fshan::ingest::CsvDiagnostics diag;
    auto series = fshan::ingest::read_csv(path, channel_id ? channel_id : "", opts, &diag);
    if (diagnostics) {
      diagnostics->rows_total = diag.rows_total;
      diagnostics->rows_dropped_nonfinite = diag.rows_dropped_nonfinite;
      diagnostics->rows_dropped_malformed = diag.rows_dropped_malformed;
    }
    *out = new fs_series{std::move(series)};
    return FS_OK;
  });
}

fs_status fs_series_create(const char* channel_id, const char* units,
                           const double* timestamps, const double* values,
                           size_t length, fs_series** out) {
  return wrap([&]() {
    require(out != nullptr, "output handle pointer is null");
    require(timestamps != nullptr && values != nullptr, "sample arrays are null");
    require(length >= 1, "series must hold at least one sample");
    fshan::ingest::TimeSeries s;
    s.channel_id = channel_id ? channel_id : "";
    s.units = units ? units : "";
    s.timestamps.assign(timestamps, timestamps + length);
    s.values.assign(values, values + length);
    for (size_t i = 0; i < length; ++i) {
      require(std::isfinite(s.timestamps[i]), "timestamps must be finite");
      require(std::isfinite(s.values[i]), "values must be finite");
      if (i > 0)
        require(s.timestamps[i] > s.timestamps[i - 1],
                "timestamps must be strictly increasing");
    }
    *out = new fs_series{std::move(s)};
    return FS_OK;
  });
}

void fs_series_free(fs_series* series) { delete series; }

size_t fs_series_length(const fs_series* series) {
  return series ? series->impl.values.size() : 0;
}

const double* fs_series_timestamps(const fs_series* series) {
  return series ? series->impl.timestamps.data() : nullptr;
}

const double* fs_series_values(const fs_series* series) {
  return series ? series->impl.values.data() : nullptr;
}

const char* fs_series_channel_id(const fs_series* series) {
  return series ? series->impl.channel_id.c_str() : nullptr;
}

const char* fs_series_units(const fs_series* series) {
  return series ? series->impl.units.c_str() : nullptr;
}

fs_status fs_series_partition_daily(const fs_series* series, int64_t utc_offset_seconds,
                                    size_t min_samples, fs_window** out_windows,
                                    size_t* out_count) {
  return wrap([&]() {
    require(series != nullptr, "series handle is null");
    require(out_windows != nullptr && out_count != nullptr, "output pointers are null");
    auto windows =
        fshan::ingest::partition_daily(series->impl, utc_offset_seconds, min_samples);
    auto* arr = new fs_window[windows.size()];
    for (size_t i = 0; i < windows.size(); ++i) {
      arr[i].start = windows[i].start;
      arr[i].end = windows[i].end;
      arr[i].first = windows[i].first;
      arr[i].count = windows[i].count;
      arr[i].insufficient = windows[i].insufficient ? 1 : 0;
    }
    *out_windows = arr;
    *out_count = windows.size();
    return FS_OK;
  });
}

void fs_windows_free(fs_window* windows) { delete[] windows; }

fs_fit_options fs_fit_options_default(void) {
  fs_fit_options o;
  o.bandwidth_method = FS_BW_SILVERMAN;
  o.fixed_bandwidth = 0.0;
  o.grid_size = FS_DEFAULT_GRID_SIZE;
  o.eval_mode = FS_EVAL_AUTO;
  return o;
}

fs_status fs_bandwidth_select(const double* samples, size_t length,
                              fs_bandwidth_method method, double fixed_value,
                              double* out_bandwidth, fs_bandwidth_method* method_used) {
  return wrap([&]() {
    require(samples != nullptr || length == 0, "sample array is null");
    require(out_bandwidth != nullptr, "output pointer is null");
    const auto bw = fshan::kde::select_bandwidth(std::span(samples, length),
                                                 to_cpp(method), fixed_value);
    *out_bandwidth = bw.value;
    if (method_used) *method_used = to_c(bw.method);
    return FS_OK;
  });
}

fs_status fs_density_fit(const double* samples, size_t length,
                         const fs_fit_options* options, fs_density** out) {
  return wrap([&]() {
    require(samples != nullptr || length == 0, "sample array is null");
    require(out != nullptr, "output handle pointer is null");
    const fs_fit_options opts = options ? *options : fs_fit_options_default();
    fshan::kde::FitOptions cpp;
    cpp.bandwidth_method = to_cpp(opts.bandwidth_method);
    cpp.fixed_bandwidth = opts.fixed_bandwidth;
    cpp.grid_size = opts.grid_size;
    cpp.eval_mode = to_cpp(opts.eval_mode);
    *out = new fs_density{fshan::kde::fit(std::span(samples, length), cpp)};
    return FS_OK;
  });
}

void fs_density_free(fs_density* density) { delete density; }

size_t fs_density_grid_size(const fs_density* density) {
  return density ? density->impl.grid_size() : 0;
}

double fs_density_bandwidth(const fs_density* density) {
  return density ? density->impl.bandwidth().value
                 : std::numeric_limits<double>::quiet_NaN();
}

fs_bandwidth_method fs_density_bandwidth_method(const fs_density* density) {
  return density ? to_c(density->impl.bandwidth().method) : FS_BW_SILVERMAN;
}

int fs_density_used_binned_path(const fs_density* density) {
  return density && density->impl.used_binned_path() ? 1 : 0;
}

fs_status fs_density_grid(const fs_density* density, double* grid, double* f,
                          double* f_prime) {
  return wrap([&]() {
    require(density != nullptr, "density handle is null");
    const auto& impl = density->impl;
    const size_t n = impl.grid_size();
    if (grid) std::memcpy(grid, impl.grid().data(), n * sizeof(double));
    if (f) std::memcpy(f, impl.density().data(), n * sizeof(double));
    if (f_prime) std::memcpy(f_prime, impl.derivative().data(), n * sizeof(double));
    return FS_OK;
  });
}

fs_status fs_density_evaluate(const fs_density* density, double x, double* f,
                              double* f_prime) {
  return wrap([&]() {
    require(density != nullptr, "density handle is null");
    const auto [fv, dv] = density->impl.evaluate(x);
    if (f) *f = fv;
    if (f_prime) *f_prime = dv;
    return FS_OK;
  });
}

fs_status fs_density_export(const fs_density* density, size_t bins, double* bin_center,
                            double* hist_density, double* kde_density) {
  return wrap([&]() {
    require(density != nullptr, "density handle is null");
    const auto table = fshan::stats::density_export(density->impl, bins);
    if (bin_center)
      std::memcpy(bin_center, table.bin_center.data(), bins * sizeof(double));
    if (hist_density)
      std::memcpy(hist_density, table.hist_density.data(), bins * sizeof(double));
    if (kde_density)
      std::memcpy(kde_density, table.kde_density.data(), bins * sizeof(double));
    return FS_OK;
  });
}

fs_status fs_differential_entropy(const fs_density* density, double* out_nats) {
  return wrap([&]() {
    require(density != nullptr, "density handle is null");
    require(out_nats != nullptr, "output pointer is null");
    *out_nats = fshan::differential_entropy(density->impl);
    return FS_OK;
  });
}

fs_status fs_entropy_power(double entropy_nats, double* out) {
  return wrap([&]() {
    require(out != nullptr, "output pointer is null");
    *out = fshan::entropy_power(entropy_nats);
    return FS_OK;
  });
}

fs_status fs_fisher_information(const fs_density* density, double* out) {
  return wrap([&]() {
    require(density != nullptr, "density handle is null");
    require(out != nullptr, "output pointer is null");
    *out = fshan::fisher_information(density->impl);
    return FS_OK;
  });
}

fs_status fs_complexity(double entropy_power, double fisher_information, double* out) {
  return wrap([&]() {
    require(out != nullptr, "output pointer is null");
    *out = fshan::fs_complexity(entropy_power, fisher_information);
    return FS_OK;
  });
}

fs_status fs_analyze(const double* samples, size_t length, const fs_fit_options* options,
                     size_t min_samples, fs_metrics* out) {
  return wrap([&]() {
    require(samples != nullptr || length == 0, "sample array is null");
    require(out != nullptr, "output pointer is null");
    const fs_fit_options opts = options ? *options : fs_fit_options_default();
    const auto metrics =
        fshan::analyze_window(std::span(samples, length), to_cpp(opts, min_samples));
    out->entropy = metrics.entropy;
    out->entropy_power = metrics.entropy_power;
    out->fisher_information = metrics.fisher_information;
    out->complexity = metrics.complexity;
    out->bandwidth = metrics.bandwidth.value;
    out->bandwidth_method = to_c(metrics.bandwidth.method);
    out->sample_count = metrics.sample_count;
    return FS_OK;
  });
}

fs_status fs_summarize(const double* values, size_t length, fs_summary* out) {
  return wrap([&]() {
    require(values != nullptr || length == 0, "value array is null");
    require(out != nullptr, "output pointer is null");
    const auto s = fshan::stats::summarize(std::span(values, length));
    out->min = s.min;
    out->q1 = s.q1;
    out->median = s.median;
    out->mean = s.mean;
    out->q3 = s.q3;
    out->max = s.max;
    out->count = s.count;
    return FS_OK;
  });
}

fs_status fs_moments(const double* values, size_t length, double* mean, double* variance,
                     int* variance_defined) {
  return wrap([&]() {
    require(values != nullptr || length == 0, "value array is null");
    const auto m = fshan::stats::moments(std::span(values, length));
    if (mean) *mean = m.mean;
    if (variance)
      *variance = m.variance ? *m.variance : std::numeric_limits<double>::quiet_NaN();
    if (variance_defined) *variance_defined = m.variance ? 1 : 0;
    return FS_OK;
  });
}

fs_status fs_pearson(const double* x, const double* y, size_t length, double* out_r) {
  return wrap([&]() {
    require(x != nullptr && y != nullptr, "input arrays are null");
    require(out_r != nullptr, "output pointer is null");
    *out_r = fshan::stats::pearson(std::span(x, length), std::span(y, length));
    return FS_OK;
  });
}

namespace {

void copy_report(const fshan::stats::CorrelationReport& rep, fs_permutation_report* out) {
  out->r = rep.r;
  out->p_value = rep.p_value;
  out->permutations = rep.permutations;
  out->seed = rep.seed;
  out->n_pairs = rep.n_pairs;
  out->exhaustive = rep.exhaustive ? 1 : 0;
}

}  // namespace

fs_status fs_permutation_test(const double* x, const double* y, size_t length,
                              uint64_t replicates, uint64_t seed,
                              fs_permutation_report* out) {
  return wrap([&]() {
    require(x != nullptr && y != nullptr, "input arrays are null");
    require(out != nullptr, "output pointer is null");
    copy_report(fshan::stats::permutation_test(std::span(x, length), std::span(y, length),
                                               replicates, seed),
                out);
    return FS_OK;
  });
}

fs_status fs_permutation_test_exhaustive(const double* x, const double* y, size_t length,
                                         fs_permutation_report* out) {
  return wrap([&]() {
    require(x != nullptr && y != nullptr, "input arrays are null");
    require(out != nullptr, "output pointer is null");
    copy_report(
        fshan::stats::permutation_test_exhaustive(std::span(x, length), std::span(y, length)),
        out);
    return FS_OK;
  });
}

fs_synthetic_params fs_synthetic_params_default(void) {
  fs_synthetic_params p;
  p.dist = FS_DIST_GAUSSIAN;
  p.location = 0.0;
  p.scale = 1.0;
  p.mix_weight = 0.5;
  p.mean1 = 0.0;
  p.sigma1 = 1.0;
  p.mean2 = 0.0;
  p.sigma2 = 1.0;
  return p;
}

fs_status fs_synthetic_generate(const fs_synthetic_params* params, size_t length,
                                uint64_t seed, double* out) {
  return wrap([&]() {
    require(params != nullptr, "params pointer is null");
    require(out != nullptr, "output array is null");
    fshan::synthetic::Params p;
    switch (params->dist) {
      case FS_DIST_GAUSSIAN:
        p.dist = fshan::synthetic::Dist::gaussian;
        break;
      case FS_DIST_LAPLACE:
        p.dist = fshan::synthetic::Dist::laplace;
        break;
      case FS_DIST_LOGISTIC:
        p.dist = fshan::synthetic::Dist::logistic;
        break;
      case FS_DIST_GAUSSIAN_MIXTURE:
        p.dist = fshan::synthetic::Dist::gaussian_mixture;
        break;
      default:
        throw std::invalid_argument("unknown distribution");
    }
    p.location = params->location;
    p.scale = params->scale;
    p.mix_weight = params->mix_weight;
    p.mean1 = params->mean1;
    p.sigma1 = params->sigma1;
    p.mean2 = params->mean2;
    p.sigma2 = params->sigma2;
    const auto values = fshan::synthetic::generate(p, length, seed);
    std::memcpy(out, values.data(), length * sizeof(double));
    return FS_OK;
  });
}

fs_status fs_timestamp_to_iso8601(double epoch_seconds, char* buffer,
                                  size_t buffer_size) {
  return wrap([&]() {
    require(buffer != nullptr, "buffer is null");
    require(std::isfinite(epoch_seconds), "timestamp must be finite");
    const std::string text = fshan::timeutil::format_iso8601(epoch_seconds);
    require(buffer_size > text.size(), "buffer too small");
    std::memcpy(buffer, text.c_str(), text.size() + 1);
    return FS_OK;
  });
}

fs_status fs_timestamp_from_iso8601(const char* text, double* out_epoch_seconds) {
  return wrap([&]() {
    require(text != nullptr, "text is null");
    require(out_epoch_seconds != nullptr, "output pointer is null");
    const auto parsed = fshan::timeutil::parse_iso8601(text);
    if (!parsed) throw fshan::ingest::ParseError("malformed ISO-8601 timestamp");
    *out_epoch_seconds = *parsed;
    return FS_OK;
  });
}

}  // extern "C"
