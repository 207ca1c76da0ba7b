#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ingest.hpp"
#include "kde.hpp"

namespace fshan::stats {

//! Six-number summary; quartiles use linear interpolation of order
//! statistics (the "type 7" convention).
struct SummaryStats {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double mean = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

SummaryStats summarize(std::span<const double> values);

//! Arithmetic mean and unbiased sample variance; the variance is absent
//! (not zero) for fewer than two samples.
struct Moments {
  double mean = 0.0;
  std::optional<double> variance;
};

Moments moments(std::span<const double> values);

//! Per-window moments for windows produced by partition_daily over the
//! same series.
std::vector<Moments> daily_moments(const ingest::TimeSeries& series,
                                   std::span<const ingest::Window> windows);

//! Sample Pearson correlation. Pairs with a NaN member are dropped first;
//! requires >= 3 complete pairs and nonzero variance on both sides.
double pearson(std::span<const double> x, std::span<const double> y);

//! Result of a correlation significance test for one channel.
struct CorrelationReport {
  std::string channel_id;
  double r = 0.0;
  double p_value = 1.0;
  std::uint64_t permutations = 0;  // R (Monte Carlo) or n! (exhaustive)
  std::uint64_t seed = 0;
  std::size_t n_pairs = 0;
  bool exhaustive = false;
};

//! Two-sided permutation test with the add-one estimator
//! p = (1 + #{k : |r_k| >= |r_obs|}) / (R + 1). Permutation k is drawn
//! from an engine derived deterministically from (seed, k), so serial and
//! parallel evaluation orders agree. p >= 1/(R+1) by construction.
CorrelationReport permutation_test(std::span<const double> x, std::span<const double> y,
                                   std::uint64_t replicates, std::uint64_t seed);

//! Exact test: enumerates all n! permutations (n <= 10) and reports
//! p = #{|r_perm| >= |r_obs|} / n!.
CorrelationReport permutation_test_exhaustive(std::span<const double> x,
                                              std::span<const double> y);

//! Plot-ready comparison of a density-normalized histogram (area 1) with
//! the fitted KDE interpolated at the bin centers. Bins cover the
//! estimate's grid range.
struct DensityTable {
  std::vector<double> bin_center;
  std::vector<double> hist_density;
  std::vector<double> kde_density;
};

DensityTable density_export(const kde::DensityEstimate& estimate, std::size_t bins);

}  // namespace fshan::stats
