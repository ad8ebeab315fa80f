#pragma once

// Series primitives: normalization, centering, ranking into a sequence of
// ranged amplitudes (SRA), the rank-based empirical CDF and sum-functions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rcfd/error.hpp"

namespace rcfd {

/// An ordered sequence of finite real samples.
class Series {
 public:
  Series() = default;

  explicit Series(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw Error(ErrorKind::NonFiniteValue, "non-finite sample at index " + std::to_string(i));
      }
    }
  }

  Series(std::initializer_list<double> values) : Series(std::vector<double>(values)) {}

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& vector() const noexcept { return values_; }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  friend bool operator==(const Series&, const Series&) = default;

 private:
  std::vector<double> values_;
};

enum class Direction { Ascending, Descending };

inline const char* to_string(Direction d) {
  return d == Direction::Ascending ? "ascending" : "descending";
}

/// The SRA of a series: the same multiset, sorted in an explicit direction.
class RankedSeries {
 public:
  RankedSeries() = default;

  std::size_t size() const noexcept { return values_.size(); }
  Direction direction() const noexcept { return direction_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  Series as_series() const { return Series(values_); }

  friend bool operator==(const RankedSeries&, const RankedSeries&) = default;

 private:
  friend RankedSeries rank(const Series&, Direction);
  friend RankedSeries rank_values(std::vector<double>, Direction);
  RankedSeries(std::vector<double> values, Direction direction)
      : values_(std::move(values)), direction_(direction) {}

  std::vector<double> values_;
  Direction direction_ = Direction::Ascending;
};

/// A ranked amplitude paired with its empirical quantile.
struct CdfPoint {
  double x = 0.0;
  double z = 0.0;

  friend bool operator==(const CdfPoint&, const CdfPoint&) = default;
};

namespace detail {

inline void require_length(std::size_t n, std::size_t min, const char* what) {
  if (n < min) {
    throw Error(ErrorKind::TooShort, std::string(what) + ": need at least " + std::to_string(min) +
                                         " samples, got " + std::to_string(n));
  }
}

}  // namespace detail

/// Neumaier-compensated summation; the result does not depend on the
/// ordering of the input beyond a few ulps.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

inline double mean(std::span<const double> v) {
  CompensatedSum s;
  for (double x : v) s.add(x);
  return v.empty() ? 0.0 : s.value() / static_cast<double>(v.size());
}

/// Maps x -> (x - min) / (max - min). Throws DegenerateSeries on constant input.
inline Series normalize(const Series& s) {
  detail::require_length(s.size(), 2, "normalize");
  const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
  const double min = *lo;
  const double range = *hi - min;
  if (!(range > 0.0)) throw Error(ErrorKind::DegenerateSeries, "normalize: max == min");
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = (s[i] - min) / range;
  // Endpoints are pinned exactly so that normalize stays idempotent.
  out[static_cast<std::size_t>(lo - s.begin())] = 0.0;
  out[static_cast<std::size_t>(hi - s.begin())] = 1.0;
  return Series(std::move(out));
}

inline Series center(const Series& s) {
  detail::require_length(s.size(), 2, "center");
  const double m = mean(s.values());
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] - m;
  return Series(std::move(out));
}

inline RankedSeries rank_values(std::vector<double> values, Direction direction) {
  if (direction == Direction::Ascending) {
    std::stable_sort(values.begin(), values.end());
  } else {
    std::stable_sort(values.begin(), values.end(), std::greater<>{});
  }
  return RankedSeries(std::move(values), direction);
}

/// Stable sort into the SRA. Ties keep their original relative order.
inline RankedSeries rank(const Series& s, Direction direction) {
  detail::require_length(s.size(), 2, "rank");
  return rank_values(s.vector(), direction);
}

/// F(x_n; N) = (N + 1 - n) / N on the descending SRA, n is 1-based.
inline double empirical_cdf(const RankedSeries& r, std::size_t n) {
  if (r.direction() != Direction::Descending) {
    throw Error(ErrorKind::WrongDirection, "empirical_cdf requires a descending SRA");
  }
  const std::size_t N = r.size();
  if (n < 1 || n > N) {
    throw Error(ErrorKind::IndexOutOfRange,
                "empirical_cdf: index " + std::to_string(n) + " outside 1.." + std::to_string(N));
  }
  return static_cast<double>(N + 1 - n) / static_cast<double>(N);
}

/// Ascending SRA paired with z_n = n / N.
inline std::vector<CdfPoint> cdf_points(const RankedSeries& r) {
  if (r.direction() != Direction::Ascending) {
    throw Error(ErrorKind::WrongDirection, "cdf_points requires an ascending SRA");
  }
  const auto N = static_cast<double>(r.size());
  std::vector<CdfPoint> out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    out[i] = {r[i], static_cast<double>(i + 1) / N};
  }
  return out;
}

/// Sum of g over the values, compensated left to right.
template <typename G>
double sum_function(std::span<const double> values, G&& g) {
  CompensatedSum s;
  for (double x : values) s.add(static_cast<double>(g(x)));
  return s.value();
}

template <typename G>
double sum_function(const Series& s, G&& g) {
  return sum_function(s.values(), std::forward<G>(g));
}

template <typename G>
double sum_function(const RankedSeries& r, G&& g) {
  return sum_function(r.values(), std::forward<G>(g));
}

}  // namespace rcfd
