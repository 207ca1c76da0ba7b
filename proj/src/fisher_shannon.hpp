#pragma once

#include <cstddef>
#include <span>

#include "kde.hpp"

namespace fshan {

//! Per-window information measures. N and I carry squared and inverse
//! squared data units respectively, so C = N * I is dimensionless and
//! comparable across channels. C >= 1 analytically, with equality only
//! for Gaussian data.
struct FsMetrics {
  double entropy = 0.0;             // H, nats
  double entropy_power = 0.0;       // N = exp(2H) / (2*pi*e)
  double fisher_information = 0.0;  // I
  double complexity = 0.0;          // C = N * I
  kde::Bandwidth bandwidth;
  std::size_t sample_count = 0;
};

struct FsConfig {
  kde::BandwidthMethod bandwidth_method = kde::BandwidthMethod::silverman;
  double fixed_bandwidth = 0.0;
  std::size_t grid_size = kde::kDefaultGridSize;
  kde::EvalMode eval_mode = kde::EvalMode::automatic;
  std::size_t min_samples = 1000;
};

// Contributions where the density falls below kDensityFloor times its
// maximum are discarded: they are dominated by floating-point noise and
// carry negligible true mass.
inline constexpr double kDensityFloor = 1e-12;

//! Differential entropy -integral(f log f) in nats, trapezoidal quadrature
//! on the estimate's grid with the 0 log 0 = 0 convention.
double differential_entropy(const kde::DensityEstimate& estimate);

//! Shannon entropy power exp(2H) / (2*pi*e). Throws std::overflow_error
//! when |H| is large enough that the result leaves the representable
//! range (|H| > 350 nats).
double entropy_power(double entropy_nats);

//! Fisher information integral(f'^2 / f), trapezoidal quadrature with the
//! same density floor.
double fisher_information(const kde::DensityEstimate& estimate);

//! FS complexity C = N * I; requires N > 0 and I > 0.
double fs_complexity(double entropy_power, double fisher_information);

//! Full pipeline for one window: bandwidth selection, KDE fit, H, N, I, C.
//! Requires at least config.min_samples samples.
FsMetrics analyze_window(std::span<const double> samples, const FsConfig& config);

}  // namespace fshan
