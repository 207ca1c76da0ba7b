#include "fisher_shannon.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "numeric_util.hpp"

namespace fshan {

namespace {

double density_floor(const kde::DensityEstimate& est) {
  const auto& f = est.density();
  return kDensityFloor * *std::max_element(f.begin(), f.end());
}

}  // namespace

double differential_entropy(const kde::DensityEstimate& est) {
  const auto& f = est.density();
  const double floor = density_floor(est);
  std::vector<double> integrand(f.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    integrand[i] = f[i] > floor ? -f[i] * std::log(f[i]) : 0.0;
  return numeric::trapezoid(integrand, est.grid_step());
}

double entropy_power(double entropy_nats) {
  if (!std::isfinite(entropy_nats))
    throw std::invalid_argument("entropy must be finite");
  if (std::abs(entropy_nats) > 350.0)
    throw std::overflow_error("entropy power out of representable range");
  return std::exp(2.0 * entropy_nats - numeric::kLog2PiE);
}

double fisher_information(const kde::DensityEstimate& est) {
  const auto& f = est.density();
  const auto& fp = est.derivative();
  const double floor = density_floor(est);
  std::vector<double> integrand(f.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    integrand[i] = f[i] > floor ? fp[i] * fp[i] / f[i] : 0.0;
  return numeric::trapezoid(integrand, est.grid_step());
}

double fs_complexity(double entropy_power, double fisher_information) {
  if (!(entropy_power > 0.0))
    throw std::invalid_argument("entropy power must be positive");
  if (!(fisher_information > 0.0))
    throw std::invalid_argument("fisher information must be positive");
  return entropy_power * fisher_information;
}

FsMetrics analyze_window(std::span<const double> samples, const FsConfig& config) {
  if (samples.size() < config.min_samples)
    throw std::invalid_argument("window holds fewer samples than the configured minimum");
  const kde::Bandwidth bw =
      kde::select_bandwidth(samples, config.bandwidth_method, config.fixed_bandwidth);
  const kde::DensityEstimate est =
      kde::fit(samples, bw, config.grid_size, config.eval_mode);
  FsMetrics m;
  m.entropy = differential_entropy(est);
  m.entropy_power = entropy_power(m.entropy);
  m.fisher_information = fisher_information(est);
  m.complexity = fs_complexity(m.entropy_power, m.fisher_information);
  m.bandwidth = bw;
  m.sample_count = samples.size();
  return m;
}

}  // namespace fshan
