// fscomplex: command-line front end for the fisher_shannon library.
//
// Subcommands: summary, analyze, correlate, density, synthetic. Inputs and
// outputs are CSV with a mandatory header row; every output embeds
// provenance comment lines (tool version, config hash, bandwidth method,
// seed). Logs go to stderr, data to files or stdout.

#include <fisher_shannon/fisher_shannon.h>

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitChannelFailure = 1;
constexpr int kExitUsage = 2;

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string iso(double epoch) {
  char buf[40];
  if (fs_timestamp_to_iso8601(epoch, buf, sizeof(buf)) != FS_OK) return "";
  return buf;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// One status line per message; commas are reserved for the CSV layer.
std::string sanitize_cell(std::string text) {
  for (char& c : text) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return text;
}

struct ChannelSpec {
  std::string name;
  std::string path;
};

bool parse_channel_spec(const std::string& arg, ChannelSpec& out) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size()) return false;
  out.name = arg.substr(0, eq);
  out.path = arg.substr(eq + 1);
  return out.name.find(',') == std::string::npos &&
         out.name.find('#') == std::string::npos &&
         out.name.find('"') == std::string::npos;
}

struct IngestOpts {
  std::string ts_column = "t";
  std::string value_column = "v";
  std::string delimiter = ",";
  std::string ts_format = "epoch";
  std::string units;
  double malformed_tolerance = 0.01;
};

struct KdeOpts {
  std::string bandwidth = "silverman";
  double fixed_bandwidth = 0.0;
  std::size_t grid_size = FS_DEFAULT_GRID_SIZE;
};

struct WindowOpts {
  std::int64_t utc_offset = 0;
  std::size_t min_samples = FS_DEFAULT_MIN_WINDOW_SAMPLES;
};

void add_ingest_options(CLI::App* cmd, IngestOpts& opts) {
  cmd->add_option("--ts-column", opts.ts_column, "Timestamp column name");
  cmd->add_option("--value-column", opts.value_column, "Value column name");
  cmd->add_option("--delimiter", opts.delimiter, "Field delimiter (single character)");
  cmd->add_option("--ts-format", opts.ts_format, "Timestamp format: epoch or iso8601")
      ->check(CLI::IsMember({"epoch", "iso8601"}));
  cmd->add_option("--units", opts.units, "Units metadata carried into outputs");
  cmd->add_option("--malformed-tolerance", opts.malformed_tolerance,
                  "Highest tolerated fraction of malformed rows");
}

void add_kde_options(CLI::App* cmd, KdeOpts& opts) {
  cmd->add_option("--bandwidth", opts.bandwidth,
                  "Bandwidth method: silverman, plugin, or fixed")
      ->check(CLI::IsMember({"silverman", "plugin", "fixed"}));
  cmd->add_option("--fixed-bandwidth", opts.fixed_bandwidth,
                  "Bandwidth value for --bandwidth fixed");
  cmd->add_option("--grid-size", opts.grid_size, "KDE evaluation grid size (>= 16)");
}

void add_window_options(CLI::App* cmd, WindowOpts& opts) {
  cmd->add_option("--utc-offset", opts.utc_offset,
                  "Clock shift in seconds applied before daily windowing");
  cmd->add_option("--min-window-samples", opts.min_samples,
                  "Windows below this sample count are flagged insufficient");
}

fs_csv_options make_csv_options(const IngestOpts& opts) {
  fs_csv_options csv = fs_csv_options_default();
  csv.timestamp_column = opts.ts_column.c_str();
  csv.value_column = opts.value_column.c_str();
  csv.delimiter = opts.delimiter.empty() ? ',' : opts.delimiter[0];
  csv.timestamp_format = opts.ts_format == "iso8601" ? FS_TS_ISO8601 : FS_TS_EPOCH_SECONDS;
  csv.max_malformed_fraction = opts.malformed_tolerance;
  csv.units = opts.units.c_str();
  return csv;
}

bool validate_kde_opts(const KdeOpts& opts) {
  if (opts.bandwidth == "fixed" && !(opts.fixed_bandwidth > 0.0)) {
    std::cerr << "--bandwidth fixed requires --fixed-bandwidth > 0\n";
    return false;
  }
  if (opts.grid_size < 16) {
    std::cerr << "--grid-size must be at least 16\n";
    return false;
  }
  return true;
}

fs_fit_options make_fit_options(const KdeOpts& opts) {
  fs_fit_options fit = fs_fit_options_default();
  if (opts.bandwidth == "plugin")
    fit.bandwidth_method = FS_BW_PLUGIN;
  else if (opts.bandwidth == "fixed")
    fit.bandwidth_method = FS_BW_FIXED;
  fit.fixed_bandwidth = opts.fixed_bandwidth;
  fit.grid_size = opts.grid_size;
  return fit;
}

const char* bandwidth_method_name(fs_bandwidth_method m) {
  switch (m) {
    case FS_BW_PLUGIN:
      return "plugin";
    case FS_BW_FIXED:
      return "fixed";
    default:
      return "silverman";
  }
}

// Canonical key=value dump of the analysis-relevant configuration. Output
// destination and execution knobs (--jobs) are excluded so that reruns of
// the same study hash identically.
class ConfigHash {
 public:
  void add(const std::string& key, const std::string& value) {
    entries_[key] = value;
  }
  void add(const std::string& key, double value) { add(key, fmt6(value)); }
  void add(const std::string& key, std::int64_t value) { add(key, std::to_string(value)); }
  void add(const std::string& key, std::uint64_t value) { add(key, std::to_string(value)); }
  void add_ingest(const IngestOpts& o) {
    add("ts_column", o.ts_column);
    add("value_column", o.value_column);
    add("delimiter", o.delimiter);
    add("ts_format", o.ts_format);
    add("units", o.units);
    add("malformed_tolerance", o.malformed_tolerance);
  }
  void add_kde(const KdeOpts& o) {
    add("bandwidth", o.bandwidth);
    add("fixed_bandwidth", o.fixed_bandwidth);
    add("grid_size", static_cast<std::uint64_t>(o.grid_size));
  }
  void add_window(const WindowOpts& o) {
    add("utc_offset", o.utc_offset);
    add("min_window_samples", static_cast<std::uint64_t>(o.min_samples));
  }
  std::uint64_t digest() const {
    std::string text;
    for (const auto& [k, v] : entries_) {
      text += k;
      text += '=';
      text += v;
      text += '\n';
    }
    return fnv1a64(text);
  }

 private:
  std::map<std::string, std::string> entries_;
};

// Output sink: "-" means stdout; anything else is a file.
class Output {
 public:
  explicit Output(const std::string& path) : path_(path) {
    if (path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot open output file: " + path);
    }
  }
  std::ostream& stream() { return path_ == "-" ? std::cout : file_; }
  void provenance(const ConfigHash& cfg, const std::string& bandwidth,
                  std::uint64_t seed) {
    char hash[24];
    std::snprintf(hash, sizeof(hash), "%016" PRIx64, cfg.digest());
    stream() << "# tool=fscomplex version=" << fs_version() << "\n"
             << "# config_hash=" << hash << " bandwidth=" << bandwidth
             << " seed=" << seed << "\n";
  }

 private:
  std::string path_;
  std::ofstream file_;
};

struct SeriesDeleter {
  void operator()(fs_series* s) const { fs_series_free(s); }
};
using SeriesPtr = std::unique_ptr<fs_series, SeriesDeleter>;

struct DensityDeleter {
  void operator()(fs_density* d) const { fs_density_free(d); }
};
using DensityPtr = std::unique_ptr<fs_density, DensityDeleter>;

struct WindowsDeleter {
  void operator()(fs_window* w) const { fs_windows_free(w); }
};
using WindowsPtr = std::unique_ptr<fs_window, WindowsDeleter>;

SeriesPtr ingest_channel(const ChannelSpec& spec, const IngestOpts& opts,
                         bool* failed) {
  const fs_csv_options csv = make_csv_options(opts);
  fs_series* series = nullptr;
  fs_csv_diagnostics diag{};
  const fs_status rc = fs_series_read_csv(spec.path.c_str(), spec.name.c_str(), &csv,
                                          &series, &diag);
  if (rc != FS_OK) {
    std::cerr << "channel " << spec.name << ": " << fs_last_error() << "\n";
    *failed = true;
    return nullptr;
  }
  if (diag.rows_dropped_nonfinite + diag.rows_dropped_malformed > 0) {
    std::cerr << "channel " << spec.name << ": dropped "
              << diag.rows_dropped_nonfinite << " non-finite and "
              << diag.rows_dropped_malformed << " malformed of " << diag.rows_total
              << " rows\n";
  }
  return SeriesPtr(series);
}

// Runs fn(0..count) on `jobs` threads; results must be written to
// preallocated per-index slots so the output order is schedule independent.
void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> threads;
  const std::size_t n_threads = std::min(jobs, count);
  threads.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
}

std::vector<ChannelSpec> parse_channels(const std::vector<std::string>& args,
                                        bool* failed) {
  std::vector<ChannelSpec> specs;
  std::set<std::string> names, paths;
  for (const auto& arg : args) {
    ChannelSpec spec;
    if (!parse_channel_spec(arg, spec)) {
      std::cerr << "bad channel spec '" << arg << "', expected NAME=PATH\n";
      *failed = true;
      continue;
    }
    if (!names.insert(spec.name).second) {
      std::cerr << "duplicate channel id '" << spec.name << "'\n";
      *failed = true;
      continue;
    }
    if (!paths.insert(spec.path).second) {
      std::cerr << "duplicate input path '" << spec.path << "'\n";
      *failed = true;
      continue;
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

// ------------------------------------------------------------------
// summary
// ------------------------------------------------------------------

int cmd_summary(const std::vector<std::string>& channel_args, const IngestOpts& ingest,
                const KdeOpts& kde, std::uint64_t seed, const std::string& output) {
  if (!validate_kde_opts(kde)) return kExitUsage;
  bool failed = false;
  auto specs = parse_channels(channel_args, &failed);

  ConfigHash cfg;
  cfg.add("subcommand", std::string("summary"));
  for (const auto& s : specs) cfg.add("channel." + s.name, s.path);
  cfg.add_ingest(ingest);
  cfg.add_kde(kde);
  cfg.add("seed", seed);

  Output out(output);
  out.provenance(cfg, kde.bandwidth, seed);
  out.stream() << "channel,min,q1,median,mean,q3,max,count\n";

  for (const auto& spec : specs) {
    SeriesPtr series = ingest_channel(spec, ingest, &failed);
    if (!series) continue;
    fs_summary s{};
    if (fs_summarize(fs_series_values(series.get()), fs_series_length(series.get()),
                     &s) != FS_OK) {
      std::cerr << "channel " << spec.name << ": " << fs_last_error() << "\n";
      failed = true;
      continue;
    }
    out.stream() << spec.name << ',' << fmt6(s.min) << ',' << fmt6(s.q1) << ','
                 << fmt6(s.median) << ',' << fmt6(s.mean) << ',' << fmt6(s.q3) << ','
                 << fmt6(s.max) << ',' << s.count << "\n";
  }
  return failed ? kExitChannelFailure : kExitOk;
}

// ------------------------------------------------------------------
// analyze
// ------------------------------------------------------------------

struct AnalyzeTask {
  std::size_t channel = 0;
  const double* values = nullptr;
  std::size_t count = 0;
  bool series_scope = false;  // whole-series row
  std::string window_start;
  std::string window_end;
  bool insufficient = false;
};

struct AnalyzeResult {
  bool ok = false;
  fs_metrics metrics{};
  std::string error;
};

int cmd_analyze(const std::vector<std::string>& channel_args, const IngestOpts& ingest,
                const KdeOpts& kde, const WindowOpts& window, std::uint64_t seed,
                std::size_t jobs, const std::string& output) {
  if (!validate_kde_opts(kde)) return kExitUsage;
  bool failed = false;
  auto specs = parse_channels(channel_args, &failed);

  ConfigHash cfg;
  cfg.add("subcommand", std::string("analyze"));
  for (const auto& s : specs) cfg.add("channel." + s.name, s.path);
  cfg.add_ingest(ingest);
  cfg.add_kde(kde);
  cfg.add_window(window);
  cfg.add("seed", seed);

  Output out(output);
  out.provenance(cfg, kde.bandwidth, seed);
  out.stream() << "channel,kind,window_start,window_end,sample_count,"
                  "bandwidth,bandwidth_method,H,N,I,C,status\n";

  const fs_fit_options fit = make_fit_options(kde);

  std::vector<SeriesPtr> series_store;
  std::vector<AnalyzeTask> tasks;
  for (std::size_t c = 0; c < specs.size(); ++c) {
    SeriesPtr series = ingest_channel(specs[c], ingest, &failed);
    if (!series) continue;
    const double* values = fs_series_values(series.get());
    const double* stamps = fs_series_timestamps(series.get());
    const std::size_t length = fs_series_length(series.get());

    fs_window* windows = nullptr;
    std::size_t n_windows = 0;
    if (fs_series_partition_daily(series.get(), window.utc_offset, window.min_samples,
                                  &windows, &n_windows) != FS_OK) {
      std::cerr << "channel " << specs[c].name << ": " << fs_last_error() << "\n";
      failed = true;
      continue;
    }
    WindowsPtr windows_guard(windows);

    double prev_end = 0.0;
    for (std::size_t w = 0; w < n_windows; ++w) {
      if (w > 0 && windows[w].start > prev_end)
        std::cerr << "channel " << specs[c].name << ": gap, no samples in ["
                  << iso(prev_end) << ", " << iso(windows[w].start) << ")\n";
      prev_end = windows[w].end;
      AnalyzeTask task;
      task.channel = c;
      task.values = values + windows[w].first;
      task.count = windows[w].count;
      task.window_start = iso(windows[w].start);
      task.window_end = iso(windows[w].end);
      task.insufficient = windows[w].insufficient != 0;
      tasks.push_back(std::move(task));
    }

    AnalyzeTask whole;
    whole.channel = c;
    whole.values = values;
    whole.count = length;
    whole.series_scope = true;
    whole.window_start = iso(stamps[0]);
    whole.window_end = iso(stamps[length - 1] + 1.0);
    tasks.push_back(std::move(whole));
    series_store.push_back(std::move(series));
  }

  std::vector<AnalyzeResult> results(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t i) {
    const AnalyzeTask& task = tasks[i];
    if (task.insufficient) return;
    fs_metrics m{};
    if (fs_analyze(task.values, task.count, &fit, window.min_samples, &m) == FS_OK) {
      results[i].ok = true;
      results[i].metrics = m;
    } else {
      results[i].error = sanitize_cell(fs_last_error());
    }
  });

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const AnalyzeTask& task = tasks[i];
    const AnalyzeResult& res = results[i];
    out.stream() << specs[task.channel].name << ','
                 << (task.series_scope ? "series" : "day") << ',' << task.window_start
                 << ',' << task.window_end << ',' << task.count << ',';
    if (task.insufficient) {
      out.stream() << ",,,,,,insufficient\n";
    } else if (!res.ok) {
      out.stream() << ",,,,,,error: " << res.error << "\n";
    } else {
      const fs_metrics& m = res.metrics;
      out.stream() << fmt6(m.bandwidth) << ','
                   << bandwidth_method_name(m.bandwidth_method) << ','
                   << fmt6(m.entropy) << ',' << fmt6(m.entropy_power) << ','
                   << fmt6(m.fisher_information) << ',' << fmt6(m.complexity)
                   << ",ok\n";
    }
  }
  return failed ? kExitChannelFailure : kExitOk;
}

// ------------------------------------------------------------------
// correlate
// ------------------------------------------------------------------

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

struct MetricRow {
  std::string window_start;
  double complexity = 0.0;
};

// Daily ok-rows of an analyze output file, grouped by channel in
// first-seen order.
bool load_daily_metrics(const std::string& path,
                        std::vector<std::string>& channel_order,
                        std::map<std::string, std::vector<MetricRow>>& by_channel) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot open metrics file: " << path << "\n";
    return false;
  }
  std::string line;
  std::vector<std::string> header;
  std::size_t col_channel = 0, col_kind = 0, col_start = 0, col_c = 0, col_status = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (header.empty()) {
      header = split_csv_line(line);
      auto find = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i)
          if (header[i] == name) return i;
        return header.size();
      };
      col_channel = find("channel");
      col_kind = find("kind");
      col_start = find("window_start");
      col_c = find("C");
      col_status = find("status");
      if (col_channel == header.size() || col_kind == header.size() ||
          col_start == header.size() || col_c == header.size() ||
          col_status == header.size()) {
        std::cerr << "metrics file " << path
                  << " is missing required columns (channel, kind, window_start, C, "
                     "status)\n";
        return false;
      }
      continue;
    }
    auto fields = split_csv_line(line);
    if (fields.size() <= std::max({col_channel, col_kind, col_start, col_c, col_status}))
      continue;
    if (fields[col_kind] != "day" || fields[col_status] != "ok") continue;
    const std::string& channel = fields[col_channel];
    if (by_channel.find(channel) == by_channel.end()) channel_order.push_back(channel);
    MetricRow row;
    row.window_start = fields[col_start];
    row.complexity = std::strtod(fields[col_c].c_str(), nullptr);
    by_channel[channel].push_back(std::move(row));
  }
  if (header.empty()) {
    std::cerr << "metrics file " << path << " has no header row\n";
    return false;
  }
  return true;
}

int cmd_correlate(const std::string& metrics_path, const std::string& covariate_arg,
                  const std::string& moment, const IngestOpts& ingest,
                  const WindowOpts& window, std::uint64_t permutations,
                  bool exhaustive, std::uint64_t seed, const std::string& output) {
  bool failed = false;
  ChannelSpec covariate;
  if (!parse_channel_spec(covariate_arg, covariate)) {
    std::cerr << "bad covariate spec '" << covariate_arg << "', expected NAME=PATH\n";
    return kExitUsage;
  }

  std::vector<std::string> channel_order;
  std::map<std::string, std::vector<MetricRow>> by_channel;
  if (!load_daily_metrics(metrics_path, channel_order, by_channel))
    return kExitChannelFailure;

  SeriesPtr cov = ingest_channel(covariate, ingest, &failed);
  if (!cov) return kExitChannelFailure;

  fs_window* windows = nullptr;
  std::size_t n_windows = 0;
  if (fs_series_partition_daily(cov.get(), window.utc_offset, window.min_samples,
                                &windows, &n_windows) != FS_OK) {
    std::cerr << "covariate " << covariate.name << ": " << fs_last_error() << "\n";
    return kExitChannelFailure;
  }
  WindowsPtr windows_guard(windows);

  // Daily covariate moment keyed by the window-start timestamp. Insufficient
  // windows and undefined variances are left out and pairwise-dropped.
  std::map<std::string, double> covariate_moment;
  const double* cov_values = fs_series_values(cov.get());
  for (std::size_t w = 0; w < n_windows; ++w) {
    if (windows[w].insufficient) continue;
    double mean = 0.0, variance = 0.0;
    int variance_defined = 0;
    if (fs_moments(cov_values + windows[w].first, windows[w].count, &mean, &variance,
                   &variance_defined) != FS_OK)
      continue;
    if (moment == "variance" && !variance_defined) continue;
    covariate_moment[iso(windows[w].start)] = moment == "variance" ? variance : mean;
  }

  ConfigHash cfg;
  cfg.add("subcommand", std::string("correlate"));
  cfg.add("metrics", metrics_path);
  cfg.add("covariate." + covariate.name, covariate.path);
  cfg.add("moment", moment);
  cfg.add_ingest(ingest);
  cfg.add_window(window);
  cfg.add("permutations", permutations);
  cfg.add("exhaustive", std::string(exhaustive ? "true" : "false"));
  cfg.add("seed", seed);

  Output out(output);
  out.provenance(cfg, "none", seed);
  out.stream() << "channel,r,p_value,R,seed,n_pairs,status\n";

  for (const auto& channel : channel_order) {
    std::vector<double> x, y;
    for (const auto& row : by_channel[channel]) {
      auto it = covariate_moment.find(row.window_start);
      if (it == covariate_moment.end()) continue;
      x.push_back(row.complexity);
      y.push_back(it->second);
    }
    fs_permutation_report rep{};
    const fs_status rc =
        exhaustive ? fs_permutation_test_exhaustive(x.data(), y.data(), x.size(), &rep)
                   : fs_permutation_test(x.data(), y.data(), x.size(), permutations,
                                         seed, &rep);
    if (rc != FS_OK) {
      out.stream() << channel << ",,," << permutations << ',' << seed << ','
                   << x.size() << ",error: " << sanitize_cell(fs_last_error()) << "\n";
      continue;
    }
    out.stream() << channel << ',' << fmt6(rep.r) << ',' << fmt6(rep.p_value) << ','
                 << rep.permutations << ',' << rep.seed << ',' << rep.n_pairs
                 << ",ok\n";
  }
  return failed ? kExitChannelFailure : kExitOk;
}

// ------------------------------------------------------------------
// density
// ------------------------------------------------------------------

int cmd_density(const std::string& channel_arg, std::size_t bins,
                const IngestOpts& ingest, const KdeOpts& kde, std::uint64_t seed,
                const std::string& output) {
  if (!validate_kde_opts(kde)) return kExitUsage;
  bool failed = false;
  ChannelSpec spec;
  if (!parse_channel_spec(channel_arg, spec)) {
    std::cerr << "bad channel spec '" << channel_arg << "', expected NAME=PATH\n";
    return kExitUsage;
  }
  SeriesPtr series = ingest_channel(spec, ingest, &failed);
  if (!series) return kExitChannelFailure;

  const fs_fit_options fit = make_fit_options(kde);
  fs_density* density = nullptr;
  if (fs_density_fit(fs_series_values(series.get()), fs_series_length(series.get()),
                     &fit, &density) != FS_OK) {
    std::cerr << "channel " << spec.name << ": " << fs_last_error() << "\n";
    return kExitChannelFailure;
  }
  DensityPtr density_guard(density);

  std::vector<double> centers(bins), hist(bins), kdev(bins);
  if (fs_density_export(density, bins, centers.data(), hist.data(), kdev.data()) !=
      FS_OK) {
    std::cerr << "channel " << spec.name << ": " << fs_last_error() << "\n";
    return kExitChannelFailure;
  }

  ConfigHash cfg;
  cfg.add("subcommand", std::string("density"));
  cfg.add("channel." + spec.name, spec.path);
  cfg.add("bins", static_cast<std::uint64_t>(bins));
  cfg.add_ingest(ingest);
  cfg.add_kde(kde);
  cfg.add("seed", seed);

  Output out(output);
  out.provenance(cfg, bandwidth_method_name(fs_density_bandwidth_method(density)), seed);
  out.stream() << "bin_center,hist_density,kde_density\n";
  for (std::size_t i = 0; i < bins; ++i)
    out.stream() << fmt6(centers[i]) << ',' << fmt6(hist[i]) << ',' << fmt6(kdev[i])
                 << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------
// synthetic
// ------------------------------------------------------------------

int cmd_synthetic(const std::string& dist, std::size_t n, std::size_t days,
                  std::uint64_t seed, std::int64_t start_epoch, double location,
                  double scale, double mix_weight, double mean1, double sigma1,
                  double mean2, double sigma2, const std::string& output) {
  fs_synthetic_params params = fs_synthetic_params_default();
  if (dist == "laplace")
    params.dist = FS_DIST_LAPLACE;
  else if (dist == "logistic")
    params.dist = FS_DIST_LOGISTIC;
  else if (dist == "mixture")
    params.dist = FS_DIST_GAUSSIAN_MIXTURE;
  params.location = location;
  params.scale = scale;
  params.mix_weight = mix_weight;
  params.mean1 = mean1;
  params.sigma1 = sigma1;
  params.mean2 = mean2;
  params.sigma2 = sigma2;

  std::size_t count = n;
  if (days > 0) count = days * 86400;
  if (count == 0) {
    std::cerr << "one of --n or --days must be positive\n";
    return kExitUsage;
  }

  std::vector<double> values(count);
  if (fs_synthetic_generate(&params, count, seed, values.data()) != FS_OK) {
    std::cerr << "synthetic generation failed: " << fs_last_error() << "\n";
    return kExitChannelFailure;
  }

  ConfigHash cfg;
  cfg.add("subcommand", std::string("synthetic"));
  cfg.add("dist", dist);
  cfg.add("n", static_cast<std::uint64_t>(count));
  cfg.add("start_epoch", start_epoch);
  cfg.add("location", location);
  cfg.add("scale", scale);
  cfg.add("mix_weight", mix_weight);
  cfg.add("mean1", mean1);
  cfg.add("sigma1", sigma1);
  cfg.add("mean2", mean2);
  cfg.add("sigma2", sigma2);
  cfg.add("seed", seed);

  Output out(output);
  out.provenance(cfg, "none", seed);
  out.stream() << "t,v\n";
  char buf[40];
  for (std::size_t i = 0; i < count; ++i) {
    std::snprintf(buf, sizeof(buf), "%.9g", values[i]);
    out.stream() << (start_epoch + static_cast<std::int64_t>(i)) << ',' << buf << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fisher-Shannon complexity analysis of sampled time series"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Key-value config file; command-line flags override");

  IngestOpts ingest;
  KdeOpts kde;
  WindowOpts window;
  std::vector<std::string> channels;
  std::string output = "-";
  std::uint64_t seed = 1;
  std::size_t jobs = 1;

  auto* summary = app.add_subcommand("summary", "Per-channel summary statistics table");
  summary->add_option("--channel", channels, "Channel as NAME=PATH (repeatable)")
      ->required();
  add_ingest_options(summary, ingest);
  add_kde_options(summary, kde);
  summary->add_option("--seed", seed, "Seed recorded in provenance");
  summary->add_option("-o,--output", output, "Output file, '-' for stdout");

  auto* analyze =
      app.add_subcommand("analyze", "Daily and whole-series FS metrics per channel");
  analyze->add_option("--channel", channels, "Channel as NAME=PATH (repeatable)")
      ->required();
  add_ingest_options(analyze, ingest);
  add_kde_options(analyze, kde);
  add_window_options(analyze, window);
  analyze->add_option("--seed", seed, "Seed recorded in provenance");
  analyze->add_option("--jobs", jobs, "Worker threads for (channel x window) tasks");
  analyze->add_option("-o,--output", output, "Output file, '-' for stdout");

  std::string metrics_path, covariate_arg, moment = "variance";
  std::uint64_t permutations = FS_DEFAULT_PERMUTATIONS;
  bool exhaustive = false;

  auto* correlate = app.add_subcommand(
      "correlate", "Correlate daily C against a covariate's daily moment");
  correlate->add_option("--metrics", metrics_path, "Metrics file from 'analyze'")
      ->required();
  correlate->add_option("--covariate", covariate_arg, "Covariate channel as NAME=PATH")
      ->required();
  correlate->add_option("--moment", moment, "Covariate daily moment: mean or variance")
      ->check(CLI::IsMember({"mean", "variance"}));
  add_ingest_options(correlate, ingest);
  add_window_options(correlate, window);
  correlate->add_option("--permutations", permutations, "Permutation count R");
  correlate->add_flag("--exhaustive", exhaustive,
                      "Enumerate all permutations (<= 10 pairs)");
  correlate->add_option("--seed", seed, "Permutation RNG seed");
  correlate->add_option("-o,--output", output, "Output file, '-' for stdout");

  std::string channel_arg;
  std::size_t bins = 50;

  auto* density =
      app.add_subcommand("density", "Histogram and KDE table for one channel");
  density->add_option("--channel", channel_arg, "Channel as NAME=PATH")->required();
  density->add_option("--bins", bins, "Histogram bin count (>= 2)");
  add_ingest_options(density, ingest);
  add_kde_options(density, kde);
  density->add_option("--seed", seed, "Seed recorded in provenance");
  density->add_option("-o,--output", output, "Output file, '-' for stdout");

  std::string dist = "gaussian";
  std::size_t n = 0, days = 0;
  std::int64_t start_epoch = 0;
  double location = 0.0, scale = 1.0;
  double mix_weight = 0.5, mean1 = 0.0, sigma1 = 1.0, mean2 = 0.0, sigma2 = 1.0;

  auto* synthetic =
      app.add_subcommand("synthetic", "Generate a seeded synthetic channel CSV");
  synthetic->add_option("--dist", dist,
                        "Distribution: gaussian, laplace, logistic, mixture")
      ->check(CLI::IsMember({"gaussian", "laplace", "logistic", "mixture"}));
  synthetic->add_option("--n", n, "Sample count");
  synthetic->add_option("--days", days, "Generate days * 86400 samples at 1 Hz");
  synthetic->add_option("--seed", seed, "Generator seed");
  synthetic->add_option("--start-epoch", start_epoch, "Timestamp of the first sample");
  synthetic->add_option("--location", location, "Affine shift");
  synthetic->add_option("--scale", scale, "Affine scale (> 0)");
  synthetic->add_option("--mix-weight", mix_weight, "Mixture weight of component 1");
  synthetic->add_option("--mean1", mean1, "Mixture component 1 mean");
  synthetic->add_option("--sigma1", sigma1, "Mixture component 1 sigma");
  synthetic->add_option("--mean2", mean2, "Mixture component 2 mean");
  synthetic->add_option("--sigma2", sigma2, "Mixture component 2 sigma");
  synthetic->add_option("-o,--output", output, "Output file, '-' for stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (summary->parsed())
      return cmd_summary(channels, ingest, kde, seed, output);
    if (analyze->parsed())
      return cmd_analyze(channels, ingest, kde, window, seed, jobs, output);
    if (correlate->parsed())
      return cmd_correlate(metrics_path, covariate_arg, moment, ingest, window,
                           permutations, exhaustive, seed, output);
    if (density->parsed())
      return cmd_density(channel_arg, bins, ingest, kde, seed, output);
    if (synthetic->parsed())
      return cmd_synthetic(dist, n, days, seed, start_epoch, location, scale,
                           mix_weight, mean1, sigma1, mean2, sigma2, output);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitChannelFailure;
  }
  return kExitUsage;
}
