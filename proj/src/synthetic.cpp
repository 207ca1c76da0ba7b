#include "synthetic.hpp"

#include <cmath>
#include <stdexcept>

#include "rng.hpp"

namespace fshan::synthetic {

namespace {

constexpr double kTwoPi = 6.283185307179586;

// One standard normal draw from two uniforms (Box-Muller, cosine branch).
double draw_normal(std::mt19937_64& gen) {
  const double u1 = rng::uniform_open(gen);
  const double u2 = rng::uniform_open(gen);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double draw_laplace(std::mt19937_64& gen) {
  const double v = rng::uniform_open(gen) - 0.5;
  return v < 0.0 ? std::log(1.0 + 2.0 * v) : -std::log(1.0 - 2.0 * v);
}

double draw_logistic(std::mt19937_64& gen) {
  const double u = rng::uniform_open(gen);
  return std::log(u / (1.0 - u));
}

}  // namespace

std::vector<double> generate(const Params& p, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample count must be positive");
  if (!(p.scale > 0.0)) throw std::invalid_argument("scale must be positive");
  if (p.dist == Dist::gaussian_mixture) {
    if (p.mix_weight < 0.0 || p.mix_weight > 1.0)
      throw std::invalid_argument("mixture weight must lie in [0, 1]");
    if (!(p.sigma1 > 0.0) || !(p.sigma2 > 0.0))
      throw std::invalid_argument("mixture component sigmas must be positive");
  }

  auto gen = rng::make_engine(seed);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x;
    switch (p.dist) {
      case Dist::gaussian:
        x = draw_normal(gen);
        break;
      case Dist::laplace:
        x = draw_laplace(gen);
        break;
      case Dist::logistic:
        x = draw_logistic(gen);
        break;
      case Dist::gaussian_mixture: {
        const double pick = rng::uniform_open(gen);
        const double z = draw_normal(gen);
        x = pick < p.mix_weight ? p.mean1 + p.sigma1 * z : p.mean2 + p.sigma2 * z;
        break;
      }
      default:
        throw std::invalid_argument("unknown distribution");
    }
    out[i] = p.location + p.scale * x;
  }
  return out;
}

}  // namespace fshan::synthetic
