#pragma once

// w-statistics: the SRA of w_k = sqrt(x_k y_k) over a normalized pair, its
// erf parameterization {w0, dw}, and the two-parameter comparison between
// subsample pairs with bootstrap significance bands.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "rcfd/erf_fit.hpp"
#include "rcfd/error.hpp"
#include "rcfd/series.hpp"
#include "rcfd/synth.hpp"

namespace rcfd {

struct WStatistic {
  RankedSeries w_ranked;
  ErfFitResult fit;
  std::string pair_label;
};

struct WBands {
  double band_w0 = 0.0;
  double band_dw = 0.0;
  int draws = 0;
  double quantile = 0.0;
  bool low_confidence = false;

  friend bool operator==(const WBands&, const WBands&) = default;
};

struct WCriterion {
  double delta_w0 = 0.0;
  double delta_dw = 0.0;
  double band_w0 = 0.0;
  double band_dw = 0.0;
  bool significant = false;

  friend bool operator==(const WCriterion&, const WCriterion&) = default;
};

/// Ascending SRA of sqrt(x_k y_k). Both inputs must already lie in [0, 1].
inline RankedSeries product_sra(const Series& x, const Series& y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::LengthMismatch,
                "product_sra: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  }
  detail::require_length(x.size(), 2, "product_sra");
  constexpr double slack = 1e-12;
  std::vector<double> w(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < -slack || x[i] > 1.0 + slack || y[i] < -slack || y[i] > 1.0 + slack) {
      throw Error(ErrorKind::NotNormalized, "product_sra: value outside [0, 1] at index " + std::to_string(i));
    }
    w[i] = std::sqrt(std::clamp(x[i] * y[i], 0.0, 1.0));
  }
  return rank_values(std::move(w), Direction::Ascending);
}

/// normalize both -> product SRA -> cdf points -> erf fit.
inline WStatistic w_criterion_pipeline(const Series& x_raw, const Series& y_raw, std::string label,
                                       const FitOptions& options = {}) {
  if (x_raw.size() != y_raw.size()) {
    throw Error(ErrorKind::LengthMismatch, "w_criterion_pipeline: unequal lengths");
  }
  detail::require_length(x_raw.size(), 64, "w_criterion_pipeline");
  WStatistic out;
  out.w_ranked = product_sra(normalize(x_raw), normalize(y_raw));
  const auto points = cdf_points(out.w_ranked);
  out.fit = fit_erf(points, options);
  out.pair_label = std::move(label);
  return out;
}

/// A difference is significant when either parameter delta leaves its band.
inline WCriterion compare_w(const ErfFitResult& a, const ErfFitResult& b, const WBands& bands) {
  if (!a.converged || !b.converged) throw Error(ErrorKind::UnconvergedFit, "compare_w: fit did not converge");
  WCriterion c;
  c.delta_w0 = a.model.w0 - b.model.w0;
  c.delta_dw = a.model.dw - b.model.dw;
  c.band_w0 = bands.band_w0;
  c.band_dw = bands.band_dw;
  c.significant = std::abs(c.delta_w0) > c.band_w0 || std::abs(c.delta_dw) > c.band_dw;
  return c;
}

inline WCriterion compare_w(const WStatistic& a, const WStatistic& b, const WBands& bands) {
  return compare_w(a.fit, b.fit, bands);
}

/// Linearly interpolated sample quantile (Hyndman-Fan type 7) of sorted data.
inline double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error(ErrorKind::InvalidArgument, "quantile of empty data");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// `quantile` of |p - median(p)| over a sample of parameter values.
inline double deviation_band(std::vector<double> values, double quantile) {
  std::sort(values.begin(), values.end());
  const double med = sorted_quantile(values, 0.5);
  for (double& v : values) v = std::abs(v - med);
  std::sort(values.begin(), values.end());
  return sorted_quantile(values, quantile);
}

struct BootstrapDraw {
  double w0 = 0.0;
  double dw = 0.0;
};

/// Null ensemble: draw i pairs the two halves of gaussian(2n, derive_seed(seed, i)).
inline std::vector<BootstrapDraw> bootstrap_draws(std::size_t n, int draws, std::uint64_t seed,
                                                  const FitOptions& options = {}, unsigned threads = 0) {
  if (draws < 2) throw Error(ErrorKind::InvalidArgument, "bootstrap needs at least 2 draws");
  detail::require_length(n, 64, "bootstrap");
  std::vector<BootstrapDraw> out(static_cast<std::size_t>(draws));
  auto run = [&](std::size_t i) {
    const Series raw = synth::gaussian(2 * n, synth::derive_seed(seed, i));
    const auto v = raw.values();
    const Series x(std::vector<double>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n)));
    const Series y(std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(n), v.end()));
    const WStatistic ws = w_criterion_pipeline(x, y, "bootstrap", options);
    out[i] = {ws.fit.model.w0, ws.fit.model.dw};
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(draws));
  if (threads <= 1) {
    for (std::size_t i = 0; i < out.size(); ++i) run(i);
    return out;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < out.size(); i += threads) run(i);
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

inline WBands bootstrap_bands(std::size_t n, int draws, double quantile, std::uint64_t seed,
                              const FitOptions& options = {}, unsigned threads = 0) {
  if (!(quantile >= 0.5 && quantile < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "bootstrap quantile must lie in [0.5, 1)");
  }
  const auto ensemble = bootstrap_draws(n, draws, seed, options, threads);
  std::vector<double> w0s, dws;
  for (const auto& d : ensemble) {
    w0s.push_back(d.w0);
    dws.push_back(d.dw);
  }
  WBands bands;
  bands.band_w0 = deviation_band(std::move(w0s), quantile);
  bands.band_dw = deviation_band(std::move(dws), quantile);
  bands.draws = draws;
  bands.quantile = quantile;
  bands.low_confidence = draws < 100;
  return bands;
}

/// Memoized bootstrap_bands. The result is a pure function of the key, so
/// repeated analyses of equal-length chunks reuse one ensemble.
inline WBands bootstrap_bands_cached(std::size_t n, int draws, double quantile, std::uint64_t seed) {
  using Key = std::tuple<std::size_t, int, double, std::uint64_t>;
  static std::mutex mutex;
  static std::map<Key, WBands> cache;
  const Key key{n, draws, quantile, seed};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const WBands bands = bootstrap_bands(n, draws, quantile, seed);
  std::lock_guard lock(mutex);
  cache.emplace(key, bands);
  return bands;
}

}  // namespace rcfd
