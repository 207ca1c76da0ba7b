#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "numeric_util.hpp"
#include "rng.hpp"

namespace fshan::stats {

namespace {

struct CenteredPairs {
  std::vector<double> xc;  // centered complete pairs
  std::vector<double> yc;
  double sxx = 0.0;
  double syy = 0.0;
};

CenteredPairs complete_centered_pairs(std::span<const double> x,
                                      std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("correlation inputs must have equal length");
  std::vector<double> xs, ys;
  xs.reserve(x.size());
  ys.reserve(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) continue;
    xs.push_back(x[i]);
    ys.push_back(y[i]);
  }
  if (xs.size() < 3)
    throw std::invalid_argument("correlation requires at least 3 complete pairs");
  const double mx = numeric::mean(xs);
  const double my = numeric::mean(ys);
  CenteredPairs cp;
  cp.xc.resize(xs.size());
  cp.yc.resize(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    cp.xc[i] = xs[i] - mx;
    cp.yc[i] = ys[i] - my;
    cp.sxx += cp.xc[i] * cp.xc[i];
    cp.syy += cp.yc[i] * cp.yc[i];
  }
  if (!(cp.sxx > 0.0) || !(cp.syy > 0.0))
    throw std::invalid_argument("correlation requires nonzero variance in both inputs");
  return cp;
}

double correlation_from(const CenteredPairs& cp, std::span<const double> yc) {
  double sxy = 0.0;
  for (std::size_t i = 0; i < cp.xc.size(); ++i) sxy += cp.xc[i] * yc[i];
  const double r = sxy / std::sqrt(cp.sxx * cp.syy);
  return std::clamp(r, -1.0, 1.0);
}

}  // namespace

SummaryStats summarize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("summary of empty input");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  SummaryStats s;
  s.min = sorted.front();
  s.q1 = numeric::quantile_sorted(sorted, 0.25);
  s.median = numeric::quantile_sorted(sorted, 0.5);
  s.q3 = numeric::quantile_sorted(sorted, 0.75);
  s.max = sorted.back();
  s.mean = numeric::mean(sorted);
  s.count = sorted.size();
  return s;
}

Moments moments(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("moments of empty input");
  Moments m;
  m.mean = numeric::mean(values);
  if (values.size() >= 2) m.variance = numeric::sample_variance(values, m.mean);
  return m;
}

std::vector<Moments> daily_moments(const ingest::TimeSeries& series,
                                   std::span<const ingest::Window> windows) {
  std::vector<Moments> out;
  out.reserve(windows.size());
  for (const auto& w : windows) {
    if (w.first + w.count > series.values.size())
      throw std::invalid_argument("window range exceeds the series");
    out.push_back(moments(std::span<const double>(series.values).subspan(w.first, w.count)));
  }
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const CenteredPairs cp = complete_centered_pairs(x, y);
  return correlation_from(cp, cp.yc);
}

CorrelationReport permutation_test(std::span<const double> x, std::span<const double> y,
                                   std::uint64_t replicates, std::uint64_t seed) {
  if (replicates < 1) throw std::invalid_argument("at least one permutation required");
  const CenteredPairs cp = complete_centered_pairs(x, y);
  const double r_obs = correlation_from(cp, cp.yc);
  const double abs_obs = std::abs(r_obs);

  const std::size_t n = cp.yc.size();
  std::uint64_t exceed = 0;
  std::vector<double> perm(n);
  for (std::uint64_t k = 0; k < replicates; ++k) {
    auto engine = rng::make_engine(seed, k);
    perm = cp.yc;
    for (std::size_t i = n - 1; i > 0; --i) {
      const std::size_t j = rng::bounded(engine, i + 1);
      std::swap(perm[i], perm[j]);
    }
    if (std::abs(correlation_from(cp, perm)) >= abs_obs) ++exceed;
  }

  CorrelationReport rep;
  rep.r = r_obs;
  rep.p_value = static_cast<double>(1 + exceed) / static_cast<double>(replicates + 1);
  rep.permutations = replicates;
  rep.seed = seed;
  rep.n_pairs = n;
  return rep;
}

CorrelationReport permutation_test_exhaustive(std::span<const double> x,
                                              std::span<const double> y) {
  const CenteredPairs cp = complete_centered_pairs(x, y);
  const std::size_t n = cp.yc.size();
  if (n > 10)
    throw std::invalid_argument("exhaustive mode supports at most 10 complete pairs");
  const double r_obs = correlation_from(cp, cp.yc);
  const double abs_obs = std::abs(r_obs);

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> perm(n);
  std::uint64_t total = 0;
  std::uint64_t exceed = 0;
  do {
    for (std::size_t i = 0; i < n; ++i) perm[i] = cp.yc[idx[i]];
    if (std::abs(correlation_from(cp, perm)) >= abs_obs) ++exceed;
    ++total;
  } while (std::next_permutation(idx.begin(), idx.end()));

  CorrelationReport rep;
  rep.r = r_obs;
  rep.p_value = static_cast<double>(exceed) / static_cast<double>(total);
  rep.permutations = total;
  rep.seed = 0;
  rep.n_pairs = n;
  rep.exhaustive = true;
  return rep;
}

DensityTable density_export(const kde::DensityEstimate& est, std::size_t bins) {
  if (bins < 2) throw std::invalid_argument("at least 2 histogram bins required");
  const double lo = est.grid_min();
  const double hi = est.grid_max();
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<double> count(bins, 0.0);
  for (double x : est.samples()) {
    auto idx = static_cast<std::size_t>((x - lo) / width);
    if (idx >= bins) idx = bins - 1;
    count[idx] += 1.0;
  }
  const double n = static_cast<double>(est.samples().size());
  DensityTable table;
  table.bin_center.resize(bins);
  table.hist_density.resize(bins);
  table.kde_density.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    table.bin_center[i] = lo + (static_cast<double>(i) + 0.5) * width;
    table.hist_density[i] = count[i] / (n * width);
    table.kde_density[i] = est.interpolate(table.bin_center[i]);
  }
  return table;
}

}  // namespace fshan::stats
