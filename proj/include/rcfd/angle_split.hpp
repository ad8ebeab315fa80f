#pragma once

// Angle/radius decomposition of a centered pair, discrete derivatives, the
// split form {sign(phi'), |phi'|, r'} and extraction of the sign channel as
// a bit stream.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rcfd/erf_fit.hpp"
#include "rcfd/error.hpp"
#include "rcfd/series.hpp"

namespace rcfd {

struct AngleDecomposition {
  std::vector<double> phi;  // in [-pi/4, pi/4]
  std::vector<double> r;    // >= 0
  std::size_t dropped = 0;  // pairs with r^2 below the radius floor
};

struct SplitTriple {
  std::vector<std::int8_t> signs;
  std::vector<double> abs_dphi;
  std::vector<double> dr;
  double zero_fraction = 0.0;
};

struct BitStream {
  std::vector<std::uint8_t> bits;
  std::size_t source_zeros_dropped = 0;

  std::size_t size() const noexcept { return bits.size(); }
};

inline constexpr double kRadiusFloor = 1e-24;

namespace detail {

inline void require_centered(const Series& s, const char* which) {
  const double m = mean(s.values());
  CompensatedSum v;
  for (double x : s) v.add((x - m) * (x - m));
  const double sd = std::sqrt(v.value() / static_cast<double>(s.size()));
  if (std::abs(m) > 1e-9 * std::max(sd, 1e-300) && std::abs(m) > 0.0) {
    throw Error(ErrorKind::NotCentered, std::string("decompose: ") + which + " is not centered");
  }
}

}  // namespace detail

/// phi = arcsin(2xy / r^2) / 2 and r = sqrt(x^2 + y^2) per pair.
inline AngleDecomposition decompose(const Series& x, const Series& y) {
  if (x.size() != y.size()) throw Error(ErrorKind::LengthMismatch, "decompose: unequal lengths");
  detail::require_length(x.size(), 2, "decompose");
  detail::require_centered(x, "x");
  detail::require_centered(y, "y");
  AngleDecomposition out;
  out.phi.reserve(x.size());
  out.r.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r2 = x[i] * x[i] + y[i] * y[i];
    if (r2 < kRadiusFloor) {
      ++out.dropped;
      continue;
    }
    const double s = 2.0 * x[i] * y[i] / r2;
    if (std::abs(s) > 1.0 + 1e-9) {
      throw Error(ErrorKind::InvalidArgument, "decompose: |2xy / r^2| exceeds 1 beyond rounding");
    }
    out.phi.push_back(0.5 * std::asin(std::clamp(s, -1.0, 1.0)));
    out.r.push_back(std::sqrt(r2));
  }
  return out;
}

/// Forward differences s[k+1] - s[k].
inline std::vector<double> diff(std::span<const double> s) {
  if (s.size() < 2) throw Error(ErrorKind::TooShort, "diff needs at least 2 elements");
  std::vector<double> out(s.size() - 1);
  for (std::size_t k = 0; k + 1 < s.size(); ++k) out[k] = s[k + 1] - s[k];
  return out;
}

inline SplitTriple split(const AngleDecomposition& d) {
  if (d.phi.size() < 2) throw Error(ErrorKind::TooShort, "split needs at least 2 retained pairs");
  const auto dphi = diff(d.phi);
  SplitTriple t;
  t.signs.resize(dphi.size());
  t.abs_dphi.resize(dphi.size());
  std::size_t zeros = 0;
  for (std::size_t k = 0; k < dphi.size(); ++k) {
    t.signs[k] = static_cast<std::int8_t>((dphi[k] > 0.0) - (dphi[k] < 0.0));
    t.abs_dphi[k] = std::abs(dphi[k]);
    zeros += t.signs[k] == 0;
  }
  t.dr = diff(d.r);
  t.zero_fraction = static_cast<double>(zeros) / static_cast<double>(dphi.size());
  return t;
}

/// -1 -> 0, +1 -> 1; zero signs are dropped and counted.
inline BitStream extract_bits(const SplitTriple& t) {
  BitStream out;
  out.bits.reserve(t.signs.size());
  for (auto s : t.signs) {
    if (s == 0) {
      ++out.source_zeros_dropped;
    } else {
      out.bits.push_back(s > 0 ? 1 : 0);
    }
  }
  return out;
}

/// Every `stride`-th sign, starting at the first. With stride 2 each kept
/// sign compares a disjoint pair (phi_{2j}, phi_{2j+1}); adjacent signs of
/// an i.i.d. sequence repeat with probability 1/3, not 1/2.
inline BitStream extract_bits_strided(const SplitTriple& t, std::size_t stride) {
  if (stride == 0) throw Error(ErrorKind::InvalidArgument, "extract_bits_strided: stride must be >= 1");
  BitStream out;
  out.bits.reserve(t.signs.size() / stride + 1);
  for (std::size_t k = 0; k < t.signs.size(); k += stride) {
    if (t.signs[k] == 0) {
      ++out.source_zeros_dropped;
    } else {
      out.bits.push_back(t.signs[k] > 0 ? 1 : 0);
    }
  }
  return out;
}

/// Sup-norm distance between the normalized ascending SRA of phi and the
/// uniform grid (n - 1) / (N - 1). Constant input returns 1.
inline double angle_uniformity(std::span<const double> phi) {
  detail::require_length(phi.size(), 64, "angle_uniformity");
  std::vector<double> v(phi.begin(), phi.end());
  std::sort(v.begin(), v.end());
  const double lo = v.front();
  const double range = v.back() - lo;
  if (!(range > 0.0)) return 1.0;
  const auto last = static_cast<double>(v.size() - 1);
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    worst = std::max(worst, std::abs((v[i] - lo) / range - static_cast<double>(i) / last));
  }
  return worst;
}

namespace detail {

inline ErfFitResult fit_normalized_sra(std::span<const double> values, const FitOptions& options) {
  const auto ranked = rank(normalize(Series(std::vector<double>(values.begin(), values.end()))),
                           Direction::Ascending);
  return fit_erf(cdf_points(ranked), options);
}

}  // namespace detail

struct InhomogeneityFits {
  ErfFitResult dphi;
  ErfFitResult dr;
};

/// erf fits of the normalized SRAs of the signed angle derivative and the
/// radius derivative.
inline InhomogeneityFits inhomogeneity_fits(const SplitTriple& t, const FitOptions& options = {}) {
  detail::require_length(t.signs.size(), 64, "inhomogeneity_fits");
  std::vector<double> dphi(t.signs.size());
  for (std::size_t k = 0; k < dphi.size(); ++k) dphi[k] = t.signs[k] * t.abs_dphi[k];
  return {detail::fit_normalized_sra(dphi, options), detail::fit_normalized_sra(t.dr, options)};
}

/// erf fit of the normalized radius SRA.
inline ErfFitResult radius_fit(const AngleDecomposition& d, const FitOptions& options = {}) {
  detail::require_length(d.r.size(), 64, "radius_fit");
  return detail::fit_normalized_sra(d.r, options);
}

}  // namespace rcfd
