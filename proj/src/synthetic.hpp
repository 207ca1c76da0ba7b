#pragma once

#include <cstdint>
#include <vector>

namespace fshan::synthetic {

enum class Dist { gaussian, laplace, logistic, gaussian_mixture };

//! Parameters for the seeded test-data generators. `location` and `scale`
//! apply an affine transform after sampling; the mixture draws component 1
//! with probability `mix_weight`.
struct Params {
  Dist dist = Dist::gaussian;
  double location = 0.0;
  double scale = 1.0;
  double mix_weight = 0.5;
  double mean1 = 0.0;
  double sigma1 = 1.0;
  double mean2 = 0.0;
  double sigma2 = 1.0;
};

//! Draws n samples. Same (params, n, seed) gives the same values on every
//! platform: sampling uses the pinned mt19937_64 sequence with explicit
//! inverse-CDF / Box-Muller transforms.
std::vector<double> generate(const Params& params, std::size_t n, std::uint64_t seed);

}  // namespace fshan::synthetic
