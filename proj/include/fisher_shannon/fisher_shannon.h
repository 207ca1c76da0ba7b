/*
 * fisher_shannon: Fisher Information Measure, Shannon Entropy Power, and
 * Fisher-Shannon complexity of sampled time series via Gaussian kernel
 * density estimation, plus the supporting statistics (summaries, daily
 * windowing, Pearson correlation with permutation significance).
 *
 * C API over an opaque-handle core. Every function that can fail returns
 * an fs_status; FS_OK is 0. A human-readable message for the most recent
 * failure on the calling thread is available from fs_last_error().
 * Handles are freed with their matching *_free function. All functions
 * are thread safe; handles are immutable once created and may be shared
 * across threads.
 */

#ifndef FISHER_SHANNON_H
#define FISHER_SHANNON_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FS_API __declspec(dllexport)
#else
#define FS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define FS_VERSION_STRING "0.1.0"
#define FS_DEFAULT_GRID_SIZE 4096
#define FS_DEFAULT_MIN_WINDOW_SAMPLES 1000
#define FS_DEFAULT_PERMUTATIONS 999

typedef enum fs_status {
  FS_OK = 0,
  FS_ERR_INVALID_ARGUMENT = 1,
  FS_ERR_IO = 2,
  FS_ERR_PARSE = 3,
  FS_ERR_OVERFLOW = 4,
  FS_ERR_NOMEM = 5,
  FS_ERR_INTERNAL = 6
} fs_status;

typedef enum fs_bandwidth_method {
  FS_BW_SILVERMAN = 0, /* 1.06 * min(sd, IQR/1.34) * n^(-1/5) */
  FS_BW_PLUGIN = 1,    /* Sheather-Jones solve-the-equation plug-in */
  FS_BW_FIXED = 2      /* user-supplied value */
} fs_bandwidth_method;

typedef enum fs_eval_mode {
  FS_EVAL_AUTO = 0,   /* binned convolution above 10^4 samples */
  FS_EVAL_DIRECT = 1, /* force the exact kernel sum on the grid */
  FS_EVAL_BINNED = 2  /* force the binned convolution */
} fs_eval_mode;

typedef struct fs_series fs_series;   /* one channel of timestamped samples */
typedef struct fs_density fs_density; /* a fitted kernel density estimate */

FS_API const char* fs_version(void);

/* Message for the most recent error on this thread; empty string if none. */
FS_API const char* fs_last_error(void);

/* ------------------------------------------------------------------ */
/* Ingestion                                                           */
/* ------------------------------------------------------------------ */

typedef enum fs_timestamp_format {
  FS_TS_EPOCH_SECONDS = 0,
  FS_TS_ISO8601 = 1
} fs_timestamp_format;

typedef struct fs_csv_options {
  const char* timestamp_column; /* default "t" */
  const char* value_column;     /* default "v" */
  char delimiter;               /* default ',' */
  fs_timestamp_format timestamp_format;
  double max_malformed_fraction; /* default 0.01 */
  const char* units;             /* opaque metadata, may be NULL */
} fs_csv_options;

typedef struct fs_csv_diagnostics {
  uint64_t rows_total;
  uint64_t rows_dropped_nonfinite;
  uint64_t rows_dropped_malformed;
} fs_csv_diagnostics;

FS_API fs_csv_options fs_csv_options_default(void);

/* Reads one channel from a CSV file (header row required; '#' lines are
 * skipped). Rows with missing or non-finite values are dropped and counted
 * in the diagnostics; malformed rows beyond the tolerance fail the read.
 * Timestamps must be strictly increasing after cleaning. */
FS_API fs_status fs_series_read_csv(const char* path, const char* channel_id,
                                    const fs_csv_options* options, fs_series** out,
                                    fs_csv_diagnostics* diagnostics);

/* Wraps caller-provided arrays (copied). Timestamps must be strictly
 * increasing and values finite. */
FS_API fs_status fs_series_create(const char* channel_id, const char* units,
                                  const double* timestamps, const double* values,
                                  size_t length, fs_series** out);

FS_API void fs_series_free(fs_series* series);

FS_API size_t fs_series_length(const fs_series* series);
FS_API const double* fs_series_timestamps(const fs_series* series);
FS_API const double* fs_series_values(const fs_series* series);
FS_API const char* fs_series_channel_id(const fs_series* series);
FS_API const char* fs_series_units(const fs_series* series);

/* One calendar-day slice: [start, end) in UTC epoch seconds,
 * [first, first + count) in the parent series. */
typedef struct fs_window {
  double start;
  double end;
  size_t first;
  size_t count;
  int insufficient; /* fewer than min_samples samples */
} fs_window;

/* Partitions into calendar days of the clock shifted by
 * utc_offset_seconds. The returned array is freed with fs_windows_free. */
FS_API fs_status fs_series_partition_daily(const fs_series* series,
                                           int64_t utc_offset_seconds,
                                           size_t min_samples, fs_window** out_windows,
                                           size_t* out_count);

FS_API void fs_windows_free(fs_window* windows);

/* ------------------------------------------------------------------ */
/* Kernel density estimation                                           */
/* ------------------------------------------------------------------ */

typedef struct fs_fit_options {
  fs_bandwidth_method bandwidth_method;
  double fixed_bandwidth; /* used when bandwidth_method == FS_BW_FIXED */
  size_t grid_size;       /* >= 16; default FS_DEFAULT_GRID_SIZE */
  fs_eval_mode eval_mode;
} fs_fit_options;

FS_API fs_fit_options fs_fit_options_default(void);

/* Selects a bandwidth for the given samples. method_used reports the
 * method that actually produced the value (the plug-in selector falls
 * back to Silverman's rule on degenerate data). */
FS_API fs_status fs_bandwidth_select(const double* samples, size_t length,
                                     fs_bandwidth_method method, double fixed_value,
                                     double* out_bandwidth,
                                     fs_bandwidth_method* method_used);

/* Fits a Gaussian KDE. The evaluation grid spans the sample range extended
 * by 6 bandwidths on both sides, uniformly spaced. */
FS_API fs_status fs_density_fit(const double* samples, size_t length,
                                const fs_fit_options* options, fs_density** out);

FS_API void fs_density_free(fs_density* density);

FS_API size_t fs_density_grid_size(const fs_density* density);
FS_API double fs_density_bandwidth(const fs_density* density);
FS_API fs_bandwidth_method fs_density_bandwidth_method(const fs_density* density);
FS_API int fs_density_used_binned_path(const fs_density* density);

/* Copies the grid, density, and density-derivative arrays into
 * caller-provided buffers of fs_density_grid_size() elements. Any of the
 * destination pointers may be NULL to skip that array. */
FS_API fs_status fs_density_grid(const fs_density* density, double* grid, double* f,
                                 double* f_prime);

/* Exact (non-interpolated) evaluation of the kernel sum and its analytic
 * derivative at x. */
FS_API fs_status fs_density_evaluate(const fs_density* density, double x, double* f,
                                     double* f_prime);

/* Density-normalized histogram of the fitted samples over the grid range
 * (area exactly 1) alongside the KDE interpolated at the bin centers.
 * Each output buffer must hold `bins` elements; any may be NULL. */
FS_API fs_status fs_density_export(const fs_density* density, size_t bins,
                                   double* bin_center, double* hist_density,
                                   double* kde_density);

/* ------------------------------------------------------------------ */
/* Fisher-Shannon metrics                                              */
/* ------------------------------------------------------------------ */

typedef struct fs_metrics {
  double entropy;            /* H, nats */
  double entropy_power;      /* N = exp(2H) / (2 pi e), squared data units */
  double fisher_information; /* I, inverse squared data units */
  double complexity;         /* C = N * I, dimensionless, >= 1 analytically */
  double bandwidth;
  fs_bandwidth_method bandwidth_method;
  size_t sample_count;
} fs_metrics;

/* Differential entropy -integral(f log f), trapezoidal quadrature on the
 * estimate's grid, natural log. */
FS_API fs_status fs_differential_entropy(const fs_density* density, double* out_nats);

/* N = exp(2H) / (2 pi e). Fails with FS_ERR_OVERFLOW for |H| > 350. */
FS_API fs_status fs_entropy_power(double entropy_nats, double* out);

/* I = integral(f'^2 / f), trapezoidal quadrature. */
FS_API fs_status fs_fisher_information(const fs_density* density, double* out);

/* C = N * I; both inputs must be positive. */
FS_API fs_status fs_complexity(double entropy_power, double fisher_information,
                               double* out);

/* Full pipeline for one window of samples: bandwidth, fit, H, N, I, C.
 * Fails when length < min_samples. */
FS_API fs_status fs_analyze(const double* samples, size_t length,
                            const fs_fit_options* options, size_t min_samples,
                            fs_metrics* out);

/* ------------------------------------------------------------------ */
/* Statistics                                                          */
/* ------------------------------------------------------------------ */

typedef struct fs_summary {
  double min;
  double q1;
  double median;
  double mean;
  double q3;
  double max;
  size_t count;
} fs_summary;

/* Six-number summary; quartiles by linear interpolation of order
 * statistics (type 7). */
FS_API fs_status fs_summarize(const double* values, size_t length, fs_summary* out);

/* Mean and unbiased sample variance. With length == 1 the variance is
 * reported as NaN and *variance_defined (when non-NULL) is set to 0. */
FS_API fs_status fs_moments(const double* values, size_t length, double* mean,
                            double* variance, int* variance_defined);

/* Sample Pearson correlation; NaN pairs are dropped first. Requires >= 3
 * complete pairs and nonzero variance on both sides. */
FS_API fs_status fs_pearson(const double* x, const double* y, size_t length,
                            double* out_r);

typedef struct fs_permutation_report {
  double r;
  double p_value;
  uint64_t permutations; /* R, or n! in exhaustive mode */
  uint64_t seed;
  size_t n_pairs;
  int exhaustive;
} fs_permutation_report;

/* Two-sided permutation test, add-one estimator
 * p = (1 + #{|r_perm| >= |r_obs|}) / (R + 1). Reproducible for a given
 * (replicates, seed); p >= 1/(R+1). */
FS_API fs_status fs_permutation_test(const double* x, const double* y, size_t length,
                                     uint64_t replicates, uint64_t seed,
                                     fs_permutation_report* out);

/* Exact enumeration over all n! permutations (n <= 10). */
FS_API fs_status fs_permutation_test_exhaustive(const double* x, const double* y,
                                                size_t length,
                                                fs_permutation_report* out);

/* ------------------------------------------------------------------ */
/* Synthetic data                                                      */
/* ------------------------------------------------------------------ */

typedef enum fs_dist {
  FS_DIST_GAUSSIAN = 0,
  FS_DIST_LAPLACE = 1,
  FS_DIST_LOGISTIC = 2,
  FS_DIST_GAUSSIAN_MIXTURE = 3
} fs_dist;

typedef struct fs_synthetic_params {
  fs_dist dist;
  double location; /* affine shift applied after sampling */
  double scale;    /* affine scale, > 0 */
  double mix_weight;
  double mean1;
  double sigma1;
  double mean2;
  double sigma2;
} fs_synthetic_params;

FS_API fs_synthetic_params fs_synthetic_params_default(void);

/* Fills out[0..length) with seeded draws. Same (params, length, seed)
 * produces identical values on every platform. */
FS_API fs_status fs_synthetic_generate(const fs_synthetic_params* params, size_t length,
                                       uint64_t seed, double* out);

/* ------------------------------------------------------------------ */
/* Timestamp helpers                                                   */
/* ------------------------------------------------------------------ */

/* Formats UTC epoch seconds as ISO-8601 "YYYY-MM-DDTHH:MM:SS[.mmm]Z".
 * The buffer should hold at least 32 bytes. */
FS_API fs_status fs_timestamp_to_iso8601(double epoch_seconds, char* buffer,
                                         size_t buffer_size);

/* Parses ISO-8601 (date, time, optional fraction and zone) into UTC epoch
 * seconds. */
FS_API fs_status fs_timestamp_from_iso8601(const char* text,
                                           double* out_epoch_seconds);

#ifdef __cplusplus
}
#endif

#endif /* FISHER_SHANNON_H */
