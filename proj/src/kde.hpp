#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace fshan::kde {

enum class BandwidthMethod { silverman, plugin, fixed };

//! A selected smoothing scale, together with the method that actually
//! produced it (the plug-in selector falls back to the rule of thumb on
//! degenerate data, and the fallback is recorded here).
struct Bandwidth {
  double value = 0.0;
  BandwidthMethod method = BandwidthMethod::silverman;
};

//! How grid values are computed: `automatic` switches to the binned
//! convolution path above kBinnedPathThreshold samples; `direct` and
//! `binned` force one path (used by the consistency tests).
enum class EvalMode { automatic, direct, binned };

inline constexpr std::size_t kBinnedPathThreshold = 10'000;
inline constexpr std::size_t kDefaultGridSize = 4096;
inline constexpr double kGridPaddingBandwidths = 6.0;

struct FitOptions {
  BandwidthMethod bandwidth_method = BandwidthMethod::silverman;
  double fixed_bandwidth = 0.0;  // used when bandwidth_method == fixed
  std::size_t grid_size = kDefaultGridSize;
  EvalMode eval_mode = EvalMode::automatic;
};

//! Rule-of-thumb bandwidth 1.06 * min(s, IQR/1.34) * n^(-1/5), where s is
//! the sample standard deviation. Requires >= 2 samples and s > 0.
double silverman_bandwidth(std::span<const double> samples);

//! Sheather-Jones solve-the-equation plug-in bandwidth. Pairwise density
//! functionals are evaluated from binned pair counts above 2000 samples.
//! Requires >= 2 samples and positive standard deviation. Falls back to
//! the rule of thumb when the fixed-point equation has no bracketed root;
//! `fell_back`, when given, reports that.
double plugin_bandwidth(std::span<const double> samples, bool* fell_back = nullptr);

//! Dispatches on `method`; `fixed_value` is echoed for BandwidthMethod::fixed.
//! The returned Bandwidth records the method that actually produced the value.
Bandwidth select_bandwidth(std::span<const double> samples, BandwidthMethod method,
                           double fixed_value = 0.0);

//! A fitted Gaussian KDE: the sample set, the bandwidth, and a uniform
//! evaluation grid spanning the sample range extended by
//! kGridPaddingBandwidths bandwidths, with density and density-derivative
//! values at every grid point. Immutable after fit; safe to share across
//! threads.
class DensityEstimate {
 public:
  const std::vector<double>& samples() const { return samples_; }
  const Bandwidth& bandwidth() const { return bandwidth_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& density() const { return density_; }
  const std::vector<double>& derivative() const { return derivative_; }
  double grid_min() const { return grid_.front(); }
  double grid_max() const { return grid_.back(); }
  double grid_step() const { return grid_step_; }
  std::size_t grid_size() const { return grid_.size(); }
  bool used_binned_path() const { return used_binned_path_; }

  //! Exact evaluation of the kernel sum and its analytic derivative at an
  //! arbitrary point (no interpolation, no binning). This is the oracle
  //! the grid paths are checked against.
  std::pair<double, double> evaluate(double x) const;

  //! Density at x by linear interpolation on the grid; zero outside.
  double interpolate(double x) const;

 private:
  friend DensityEstimate fit(std::span<const double>, const Bandwidth&, std::size_t,
                             EvalMode);
  DensityEstimate() = default;

  std::vector<double> samples_;
  Bandwidth bandwidth_;
  std::vector<double> grid_;
  std::vector<double> density_;
  std::vector<double> derivative_;
  double grid_step_ = 0.0;
  bool used_binned_path_ = false;
};

//! Fits a Gaussian KDE with a given bandwidth. grid_size must be >= 16.
DensityEstimate fit(std::span<const double> samples, const Bandwidth& bandwidth,
                    std::size_t grid_size = kDefaultGridSize,
                    EvalMode mode = EvalMode::automatic);

//! Convenience overload: selects the bandwidth per `options`, then fits.
DensityEstimate fit(std::span<const double> samples, const FitOptions& options);

}  // namespace fshan::kde
