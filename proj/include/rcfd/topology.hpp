#pragma once

// The four subsamples of a length-2N series: front/back halves (sensitive to
// ultra-long correlations) and odd/even interleaves (sensitive to local
// regression between neighbours), plus the squared-Pearson pair criteria.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rcfd/error.hpp"
#include "rcfd/series.hpp"

namespace rcfd {

struct SubsampleQuad {
  Series s1;  // x_k
  Series s2;  // x_{k+N}
  Series s3;  // x_{2k-1}
  Series s4;  // x_{2k}
  std::size_t source_length = 0;
};

struct PairCriterion {
  double r2_12 = 0.0;
  double r2_34 = 0.0;
  std::size_t n = 0;

  /// Alarm rule: R^2 above factor / N on either pair.
  bool alarm_12(double factor) const { return r2_12 > factor / static_cast<double>(n); }
  bool alarm_34(double factor) const { return r2_34 > factor / static_cast<double>(n); }

  friend bool operator==(const PairCriterion&, const PairCriterion&) = default;
};

inline SubsampleQuad split_quad(std::span<const double> source) {
  const std::size_t len = source.size();
  if (len % 2 != 0) throw Error(ErrorKind::OddLength, "split_quad: length " + std::to_string(len));
  if (len < 2) throw Error(ErrorKind::TooShort, "split_quad: empty input");
  const std::size_t n = len / 2;
  std::vector<double> a(source.begin(), source.begin() + static_cast<std::ptrdiff_t>(n));
  std::vector<double> b(source.begin() + static_cast<std::ptrdiff_t>(n), source.end());
  std::vector<double> odd(n), even(n);
  for (std::size_t k = 0; k < n; ++k) {
    odd[k] = source[2 * k];
    even[k] = source[2 * k + 1];
  }
  return {Series(std::move(a)), Series(std::move(b)), Series(std::move(odd)), Series(std::move(even)), len};
}

inline SubsampleQuad split_quad(const Series& s) { return split_quad(s.values()); }

/// Squared Pearson correlation coefficient.
inline double pearson_r2(const Series& a, const Series& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::LengthMismatch, "pearson_r2: " + std::to_string(a.size()) + " vs " +
                                               std::to_string(b.size()));
  }
  detail::require_length(a.size(), 2, "pearson_r2");
  const double ma = mean(a.values());
  const double mb = mean(b.values());
  CompensatedSum sab, saa, sbb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab.add(da * db);
    saa.add(da * da);
    sbb.add(db * db);
  }
  if (!(saa.value() > 0.0) || !(sbb.value() > 0.0)) {
    throw Error(ErrorKind::DegenerateSeries, "pearson_r2: constant input");
  }
  const double r = sab.value() / std::sqrt(saa.value() * sbb.value());
  return std::min(1.0, r * r);
}

inline PairCriterion pair_criteria(const SubsampleQuad& q) {
  return {pearson_r2(q.s1, q.s2), pearson_r2(q.s3, q.s4), q.s1.size()};
}

}  // namespace rcfd
