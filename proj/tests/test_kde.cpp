#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "kde.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace fshan;

namespace {

// 100 samples with sample sd exactly 1 and IQR/1.34 > 1.
std::vector<double> unit_sd_samples() {
  std::vector<double> x(100);
  const double v = std::sqrt(0.99);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = i % 2 ? v : -v;
  return x;
}

}  // namespace

TEST_CASE("silverman bandwidth follows the rule of thumb") {
  const auto x = unit_sd_samples();
  const double expected = 1.06 * std::pow(100.0, -0.2);
  CHECK(kde::silverman_bandwidth(x) == doctest::Approx(expected).epsilon(1e-12));

  SUBCASE("scale equivariance") {
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = 5.0 * x[i] + 3.0;
    CHECK(kde::silverman_bandwidth(y) ==
          doctest::Approx(5.0 * expected).epsilon(1e-12));
  }
}

TEST_CASE("bandwidth selection rejects degenerate input") {
  std::vector<double> constant(50, 2.0);
  CHECK_THROWS_AS(kde::silverman_bandwidth(constant), std::invalid_argument);
  CHECK_THROWS_AS(kde::plugin_bandwidth(constant), std::invalid_argument);
  std::vector<double> single{1.0};
  CHECK_THROWS_AS(kde::silverman_bandwidth(single), std::invalid_argument);
  CHECK_THROWS_AS(kde::select_bandwidth(single, kde::BandwidthMethod::plugin),
                  std::invalid_argument);
}

TEST_CASE("fixed bandwidth is echoed and validated") {
  std::vector<double> x{1.0, 2.0, 3.0};
  const auto bw = kde::select_bandwidth(x, kde::BandwidthMethod::fixed, 0.7);
  CHECK(bw.value == 0.7);
  CHECK(bw.method == kde::BandwidthMethod::fixed);
  CHECK_THROWS_AS(kde::select_bandwidth(x, kde::BandwidthMethod::fixed, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(kde::select_bandwidth(x, kde::BandwidthMethod::fixed, -1.0),
                  std::invalid_argument);
}

TEST_CASE("plugin bandwidth approaches the AMISE optimum on normal data") {
  const auto x = synthetic::generate({}, 100000, 7);
  const double amise = std::pow(4.0 / (3.0 * 1e5), 0.2);
  bool fell_back = true;
  const double b = kde::plugin_bandwidth(x, &fell_back);
  CHECK_FALSE(fell_back);
  CHECK(std::abs(b - amise) / amise < 0.15);

  const auto selected = kde::select_bandwidth(x, kde::BandwidthMethod::plugin);
  CHECK(selected.method == kde::BandwidthMethod::plugin);
  CHECK(selected.value == b);
}

TEST_CASE("plugin bandwidth stays usable on awkward small samples") {
  std::vector<double> x{0.0, 0.0, 0.0, 0.0, 1.0};
  const auto bw = kde::select_bandwidth(x, kde::BandwidthMethod::plugin);
  CHECK(bw.value > 0.0);
  CHECK(std::isfinite(bw.value));
}

TEST_CASE("fit reproduces hand-evaluated kernel sums") {
  SUBCASE("single sample") {
    std::vector<double> x{0.0};
    const auto est = kde::fit(x, kde::Bandwidth{1.0, kde::BandwidthMethod::fixed}, 4097);
    const double peak = 1.0 / std::sqrt(2.0 * oracle::kPi);
    CHECK(est.evaluate(0.0).first == doctest::Approx(peak).epsilon(1e-12));
    // 4097 points over [-6, 6]: index 2048 sits exactly at the sample.
    CHECK(est.grid()[2048] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(est.density()[2048] == doctest::Approx(peak).epsilon(1e-12));
  }
  SUBCASE("two samples") {
    std::vector<double> x{-1.0, 1.0};
    const auto est = kde::fit(x, kde::Bandwidth{1.0, kde::BandwidthMethod::fixed});
    const double phi1 = std::exp(-0.5) / std::sqrt(2.0 * oracle::kPi);
    CHECK(est.evaluate(0.0).first == doctest::Approx(phi1).epsilon(1e-12));
  }
}

TEST_CASE("fit validates input") {
  std::vector<double> x{0.0, 1.0};
  const kde::Bandwidth bw{0.5, kde::BandwidthMethod::fixed};
  CHECK_THROWS_AS(kde::fit(std::span<const double>(), bw), std::invalid_argument);
  CHECK_THROWS_AS(kde::fit(x, kde::Bandwidth{0.0, kde::BandwidthMethod::fixed}),
                  std::invalid_argument);
  CHECK_THROWS_AS(kde::fit(x, bw, 15), std::invalid_argument);
}

TEST_CASE("grid spans the extended support uniformly") {
  const auto x = synthetic::generate({}, 500, 3);
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  const kde::Bandwidth bw{0.3, kde::BandwidthMethod::fixed};
  const auto est = kde::fit(x, bw, 128);
  CHECK(est.grid_size() == 128);
  CHECK(est.grid_min() == doctest::Approx(*mn - 6.0 * 0.3).epsilon(1e-12));
  CHECK(est.grid_max() == doctest::Approx(*mx + 6.0 * 0.3).epsilon(1e-12));
  for (std::size_t j = 1; j < est.grid_size(); ++j) {
    CHECK(est.grid()[j] > est.grid()[j - 1]);
    CHECK(est.grid()[j] - est.grid()[j - 1] ==
          doctest::Approx(est.grid_step()).epsilon(1e-9));
  }
}

TEST_CASE("every fit is non-negative with unit trapezoidal mass") {
  auto check_mass = [](const kde::DensityEstimate& est) {
    double mass = 0.5 * (est.density().front() + est.density().back());
    for (std::size_t j = 1; j + 1 < est.grid_size(); ++j) {
      CHECK(est.density()[j] >= 0.0);
      mass += est.density()[j];
    }
    mass *= est.grid_step();
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
  };

  check_mass(kde::fit(std::vector<double>{0.0, 4.0},
                      kde::Bandwidth{0.5, kde::BandwidthMethod::fixed}));

  synthetic::Params laplace;
  laplace.dist = synthetic::Dist::laplace;
  check_mass(kde::fit(synthetic::generate(laplace, 20000, 1),
                      kde::FitOptions{}));  // binned path

  synthetic::Params mix;
  mix.dist = synthetic::Dist::gaussian_mixture;
  mix.mean1 = -3.0;
  mix.mean2 = 3.0;
  check_mass(kde::fit(synthetic::generate(mix, 3000, 2), kde::FitOptions{}));
}

TEST_CASE("evaluate vanishes far outside the support") {
  const auto x = synthetic::generate({}, 1000, 9);
  const auto est = kde::fit(x, kde::FitOptions{});
  CHECK(est.evaluate(est.grid_max() + 5.0).first < 1e-12);
  CHECK(est.evaluate(est.grid_min() - 5.0).first < 1e-12);
}

TEST_CASE("symmetric samples give a symmetric density") {
  std::mt19937_64 gen(42);
  for (int rep = 0; rep < 5; ++rep) {
    const double center = std::uniform_real_distribution<>(-5.0, 5.0)(gen);
    std::vector<double> x;
    for (int i = 0; i < 200; ++i) {
      const double d = std::uniform_real_distribution<>(0.0, 3.0)(gen);
      x.push_back(center - d);
      x.push_back(center + d);
    }
    const auto est = kde::fit(x, kde::FitOptions{});
    for (double d : {0.1, 0.7, 1.9, 3.4}) {
      const double left = est.evaluate(center - d).first;
      const double right = est.evaluate(center + d).first;
      CHECK(std::abs(left - right) <= 1e-12 * std::max(left, right));
    }
  }
}

TEST_CASE("derivative vanishes at a numerically located maximum") {
  const auto x = synthetic::generate({}, 5000, 17);
  const auto est = kde::fit(x, kde::FitOptions{});
  const auto argmax =
      std::max_element(est.density().begin(), est.density().end());
  const double fmax = *argmax;
  double lo = est.grid()[argmax - est.density().begin()] - est.grid_step();
  double hi = lo + 2.0 * est.grid_step();
  // Locate the maximum from f alone: ternary search, then successive
  // parabolic refinement. The derivative is only checked afterwards.
  for (int it = 0; it < 80 && hi - lo > 1e-7; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (est.evaluate(m1).first < est.evaluate(m2).first)
      lo = m1;
    else
      hi = m2;
  }
  double peak = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    const double d = 1e-4;
    const double fm = est.evaluate(peak - d).first;
    const double f0 = est.evaluate(peak).first;
    const double fp = est.evaluate(peak + d).first;
    peak -= 0.5 * d * (fp - fm) / (fp - 2.0 * f0 + fm);
  }
  const double at_max = std::abs(est.evaluate(peak).second);
  CHECK(at_max < 1e-8 * fmax);
}

TEST_CASE("evaluate matches an independent kernel sum") {
  const auto x = synthetic::generate({}, 400, 23);
  const auto bw = kde::select_bandwidth(x, kde::BandwidthMethod::silverman);
  const auto est = kde::fit(x, bw);
  for (double q : {-2.0, -0.5, 0.0, 1.3, 2.8}) {
    CHECK(est.evaluate(q).first ==
          doctest::Approx(oracle::naive_kde(q, x, bw.value)).epsilon(1e-12));
  }
}

TEST_CASE("direct-path grid values are exact point evaluations") {
  const auto x = synthetic::generate({}, 800, 27);
  const auto est = kde::fit(x, kde::FitOptions{});
  REQUIRE_FALSE(est.used_binned_path());
  for (std::size_t j = 0; j < est.grid_size(); j += 257) {
    const auto [f, fp] = est.evaluate(est.grid()[j]);
    CHECK(est.density()[j] == doctest::Approx(f).epsilon(1e-14));
    CHECK(est.derivative()[j] == doctest::Approx(fp).epsilon(1e-14));
  }
}

TEST_CASE("binned path agrees with direct summation to 1e-6 of the sup norm") {
  std::mt19937_64 gen(5);
  for (std::size_t n : {3000u, 20000u}) {
    synthetic::Params p;
    p.dist = synthetic::Dist::gaussian_mixture;
    p.mean1 = std::uniform_real_distribution<>(-4.0, 0.0)(gen);
    p.mean2 = std::uniform_real_distribution<>(0.0, 4.0)(gen);
    const auto x = synthetic::generate(p, n, gen());
    const auto bw = kde::select_bandwidth(x, kde::BandwidthMethod::silverman);
    const auto direct = kde::fit(x, bw, 4096, kde::EvalMode::direct);
    const auto binned = kde::fit(x, bw, 4096, kde::EvalMode::binned);
    CHECK_FALSE(direct.used_binned_path());
    CHECK(binned.used_binned_path());

    double f_sup = 0.0, d_sup = 0.0, f_err = 0.0, d_err = 0.0;
    for (std::size_t j = 0; j < direct.grid_size(); ++j) {
      f_sup = std::max(f_sup, direct.density()[j]);
      d_sup = std::max(d_sup, std::abs(direct.derivative()[j]));
      f_err = std::max(f_err, std::abs(direct.density()[j] - binned.density()[j]));
      d_err = std::max(d_err,
                       std::abs(direct.derivative()[j] - binned.derivative()[j]));
    }
    CHECK(f_err <= 1e-6 * f_sup);
    CHECK(d_err <= 1e-6 * d_sup);
  }
}

TEST_CASE("automatic mode picks the path by sample count") {
  const auto small = synthetic::generate({}, 100, 1);
  CHECK_FALSE(kde::fit(small, kde::FitOptions{}).used_binned_path());
  const auto large = synthetic::generate({}, 10001, 1);
  CHECK(kde::fit(large, kde::FitOptions{}).used_binned_path());
}

TEST_CASE("infeasible binned layouts are refused or fall back") {
  // Tiny bandwidth over a huge range: the internal grid would not fit.
  std::vector<double> x{0.0, 1e9};
  const kde::Bandwidth bw{1e-4, kde::BandwidthMethod::fixed};
  CHECK_THROWS_AS(kde::fit(x, bw, 4096, kde::EvalMode::binned), std::runtime_error);
  const auto est = kde::fit(x, bw, 64, kde::EvalMode::automatic);
  CHECK_FALSE(est.used_binned_path());
}

TEST_CASE("grid derivative matches central differences at second order") {
  const auto x = synthetic::generate({}, 20000, 31);
  const auto bw = kde::select_bandwidth(x, kde::BandwidthMethod::silverman);

  auto fd_error = [&](std::size_t grid_size) {
    const auto est = kde::fit(x, bw, grid_size);
    const double h = est.grid_step();
    double sup = 0.0, err = 0.0;
    for (std::size_t j = 1; j + 1 < est.grid_size(); ++j) {
      const double fd = (est.density()[j + 1] - est.density()[j - 1]) / (2.0 * h);
      sup = std::max(sup, std::abs(est.derivative()[j]));
      err = std::max(err, std::abs(fd - est.derivative()[j]));
    }
    return std::pair{err, sup};
  };

  const auto [err_coarse, sup_coarse] = fd_error(2048);
  const auto [err_fine, sup_fine] = fd_error(4096);
  CHECK(err_fine <= 1e-4 * sup_fine);
  // Halving the spacing divides the O(h^2) discrepancy by about 4.
  CHECK(err_coarse / err_fine > 2.5);
  CHECK(err_coarse / err_fine < 6.0);
}
