#pragma once

// Damped least-squares (Levenberg-Marquardt) fitting of ranked CDF point
// sets to the error-function model z = (1 + erf((w - w0) / dw)) / 2, and to
// the non-extensive variant z = A + B erf(spow(w - w0, theta) / dw).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "rcfd/error.hpp"
#include "rcfd/series.hpp"
#include "rcfd/special.hpp"

namespace rcfd {

struct ErfModel {
  double w0 = 0.5;
  double dw = 0.1;

  double operator()(double w) const { return 0.5 * (1.0 + std::erf((w - w0) / dw)); }

  friend bool operator==(const ErfModel&, const ErfModel&) = default;
};

/// Signed power sign(d) |d|^theta, so that non-integer exponents stay real
/// on both sides of w0.
inline double signed_pow(double d, double theta) {
  if (d == 0.0) return 0.0;
  const double m = std::pow(std::abs(d), theta);
  return d < 0.0 ? -m : m;
}

struct ExtendedErfModel {
  double a = 0.5;
  double b = 0.5;
  double w0 = 0.5;
  double dw = 0.1;
  double theta = 1.0;

  double operator()(double w) const { return a + b * std::erf(signed_pow(w - w0, theta) / dw); }

  friend bool operator==(const ExtendedErfModel&, const ExtendedErfModel&) = default;
};

struct FitOptions {
  int max_iterations = 200;
  double rss_tolerance = 1e-10;   // relative RSS change on an accepted step
  double step_tolerance = 1e-12;  // largest absolute parameter change
  std::size_t max_points = 100000;
};

template <typename Model>
struct FitResult {
  Model model{};
  double r2 = 0.0;
  double rss = 0.0;
  int iterations = 0;
  bool converged = false;
  /// RSS after the initial guess and after every accepted step.
  std::vector<double> rss_trace;
};

using ErfFitResult = FitResult<ErfModel>;
using ExtendedFitResult = FitResult<ExtendedErfModel>;

/// Uniform-in-n thinning to at most `cap` points; keeps the last point and
/// the original z values.
inline std::vector<CdfPoint> decimate(std::span<const CdfPoint> points, std::size_t cap) {
  const std::size_t n = points.size();
  if (cap == 0 || n <= cap) return {points.begin(), points.end()};
  std::vector<CdfPoint> out(cap);
  for (std::size_t j = 0; j < cap; ++j) out[j] = points[((j + 1) * n) / cap - 1];
  return out;
}

namespace detail {

inline void validate_points(std::span<const CdfPoint> points) {
  if (points.size() < 8) {
    throw Error(ErrorKind::TooShort, "erf fit needs at least 8 points, got " + std::to_string(points.size()));
  }
  double prev = 0.0;
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !(p.z > 0.0) || p.z > 1.0 || p.z < prev) {
      throw Error(ErrorKind::InvalidArgument, "erf fit: z must lie in (0, 1] and be nondecreasing");
    }
    prev = p.z;
  }
  const auto [lo, hi] = std::minmax_element(points.begin(), points.end(),
                                            [](const CdfPoint& a, const CdfPoint& b) { return a.x < b.x; });
  if (!(hi->x > lo->x)) throw Error(ErrorKind::DegenerateInput, "erf fit: all abscissae equal");
}

inline double total_sum_of_squares(std::span<const CdfPoint> points) {
  CompensatedSum s;
  for (const auto& p : points) s.add(p.z);
  const double m = s.value() / static_cast<double>(points.size());
  CompensatedSum t;
  for (const auto& p : points) t.add((p.z - m) * (p.z - m));
  return t.value();
}

// Solves (A + lambda diag(A)) x = g by Gaussian elimination with partial
// pivoting. Returns false when the damped system is singular.
template <std::size_t P>
bool solve_damped(std::array<std::array<double, P>, P> a, std::array<double, P> g, double lambda,
                  std::array<double, P>& x) {
  for (std::size_t i = 0; i < P; ++i) a[i][i] += lambda * std::max(a[i][i], 1e-300);
  for (std::size_t col = 0; col < P; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < P; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (!(std::abs(a[pivot][col]) > 0.0)) return false;
    std::swap(a[pivot], a[col]);
    std::swap(g[pivot], g[col]);
    for (std::size_t r = col + 1; r < P; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < P; ++c) a[r][c] -= f * a[col][c];
      g[r] -= f * g[col];
    }
  }
  for (std::size_t i = P; i-- > 0;) {
    double s = g[i];
    for (std::size_t c = i + 1; c < P; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

template <std::size_t P>
struct LmOutcome {
  std::array<double, P> params{};
  double rss = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> rss_trace;
};

// Generic Levenberg-Marquardt with Marquardt's diagonal scaling, which makes
// the iterates invariant under rescaling of individual parameters.
// `model(params, w, grad)` returns the model value and fills the gradient;
// `feasible(params)` rejects steps leaving the parameter domain.
template <std::size_t P, typename ModelFn, typename Feasible>
LmOutcome<P> levenberg_marquardt(std::span<const CdfPoint> points, std::array<double, P> start, ModelFn&& model,
                                 Feasible&& feasible, const FitOptions& options) {
  using Vec = std::array<double, P>;
  using Mat = std::array<Vec, P>;

  auto rss_at = [&](const Vec& p) {
    CompensatedSum s;
    Vec grad{};
    for (const auto& pt : points) {
      const double r = pt.z - model(p, pt.x, grad);
      s.add(r * r);
    }
    return s.value();
  };
  auto normal_equations = [&](const Vec& p, Mat& jtj, Vec& jtr) {
    jtj = Mat{};
    jtr = Vec{};
    Vec grad{};
    for (const auto& pt : points) {
      const double r = pt.z - model(p, pt.x, grad);
      for (std::size_t i = 0; i < P; ++i) {
        jtr[i] += grad[i] * r;
        for (std::size_t j = 0; j <= i; ++j) jtj[i][j] += grad[i] * grad[j];
      }
    }
    for (std::size_t i = 0; i < P; ++i) {
      for (std::size_t j = i + 1; j < P; ++j) jtj[i][j] = jtj[j][i];
    }
  };

  LmOutcome<P> out;
  out.params = start;
  out.rss = rss_at(start);
  out.rss_trace.push_back(out.rss);
  if (out.rss == 0.0) {
    out.converged = true;
    return out;
  }

  double lambda = 1e-3;
  Mat jtj;
  Vec jtr;
  bool refresh = true;
  while (out.iterations < options.max_iterations) {
    ++out.iterations;
    if (refresh) normal_equations(out.params, jtj, jtr);
    Vec step{};
    if (!solve_damped<P>(jtj, jtr, lambda, step)) {
      lambda *= 10.0;
      refresh = false;
      if (lambda > 1e20) break;
      continue;
    }
    double max_step = 0.0;
    Vec trial = out.params;
    for (std::size_t i = 0; i < P; ++i) {
      trial[i] += step[i];
      max_step = std::max(max_step, std::abs(step[i]));
    }
    if (max_step < options.step_tolerance) {
      out.converged = true;
      break;
    }
    const double trial_rss = feasible(trial) ? rss_at(trial) : std::numeric_limits<double>::infinity();
    if (trial_rss < out.rss) {
      const double relative_change = (out.rss - trial_rss) / out.rss;
      out.params = trial;
      out.rss = trial_rss;
      out.rss_trace.push_back(trial_rss);
      lambda = std::max(lambda / 10.0, 1e-12);
      refresh = true;
      if (relative_change < options.rss_tolerance || trial_rss == 0.0) {
        out.converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      refresh = false;
      // No descent direction left at working precision: we are at the minimum.
      if (lambda > 1e20) {
        out.converged = true;
        break;
      }
    }
  }
  return out;
}

inline constexpr double two_over_sqrt_pi = 2.0 * std::numbers::inv_sqrtpi;

}  // namespace detail

/// Starting point: w0 at the interpolated median, dw = sqrt(2) * std(w).
inline ErfModel initial_guess(std::span<const CdfPoint> points) {
  if (points.size() < 8) {
    throw Error(ErrorKind::TooShort, "initial_guess needs at least 8 points");
  }
  double w0 = points.back().x;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].z >= 0.5) {
      if (i == 0 || points[i].z == 0.5) {
        w0 = points[i].x;
      } else {
        const auto& lo = points[i - 1];
        const auto& hi = points[i];
        const double t = (0.5 - lo.z) / (hi.z - lo.z);
        w0 = lo.x + t * (hi.x - lo.x);
      }
      break;
    }
  }
  CompensatedSum s;
  for (const auto& p : points) s.add(p.x);
  const double m = s.value() / static_cast<double>(points.size());
  CompensatedSum v;
  for (const auto& p : points) v.add((p.x - m) * (p.x - m));
  const double sd = std::sqrt(v.value() / static_cast<double>(points.size()));
  return {w0, std::max(std::numbers::sqrt2 * sd, 1e-9)};
}

/// Gradient of the base model with respect to (w0, dw).
inline double erf_model_gradient(const ErfModel& m, double w, std::array<double, 2>& grad) {
  const double u = (w - m.w0) / m.dw;
  const double g = 0.5 * detail::two_over_sqrt_pi * std::exp(-u * u) / m.dw;
  grad[0] = -g;
  grad[1] = -g * u;
  return 0.5 * (1.0 + std::erf(u));
}

/// Gradient of the extended model with respect to (a, b, w0, dw), theta fixed.
inline double extended_model_gradient(const ExtendedErfModel& m, double w, std::array<double, 4>& grad) {
  const double d = w - m.w0;
  const double v = signed_pow(d, m.theta) / m.dw;
  const double e = std::erf(v);
  const double g = m.b * detail::two_over_sqrt_pi * std::exp(-v * v);
  double dpow = 0.0;  // d/dd of signed_pow(d, theta)
  if (d != 0.0) {
    dpow = m.theta * std::pow(std::abs(d), m.theta - 1.0);
  } else if (m.theta == 1.0) {
    dpow = 1.0;
  }
  grad[0] = 1.0;
  grad[1] = e;
  grad[2] = -g * dpow / m.dw;
  grad[3] = -g * v / m.dw;
  return m.a + m.b * e;
}

inline ErfFitResult fit_erf(std::span<const CdfPoint> all_points, const FitOptions& options = {}) {
  detail::validate_points(all_points);
  const auto points = decimate(all_points, options.max_points);
  const ErfModel guess = initial_guess(points);

  auto model = [](const std::array<double, 2>& p, double w, std::array<double, 2>& grad) {
    return erf_model_gradient(ErfModel{p[0], p[1]}, w, grad);
  };
  auto feasible = [](const std::array<double, 2>& p) { return p[1] > 0.0 && std::isfinite(p[0]); };
  auto lm = detail::levenberg_marquardt<2>(points, {guess.w0, guess.dw}, model, feasible, options);

  ErfFitResult result;
  result.model = {lm.params[0], lm.params[1]};
  result.rss = lm.rss;
  const double tss = detail::total_sum_of_squares(points);
  result.r2 = tss > 0.0 ? 1.0 - lm.rss / tss : 1.0;
  result.iterations = lm.iterations;
  result.converged = lm.converged;
  result.rss_trace = std::move(lm.rss_trace);
  return result;
}

/// Default theta grid 0.5, 0.55, ..., 2.0.
inline std::vector<double> default_theta_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 30; ++i) grid.push_back(0.5 + 0.05 * i);
  return grid;
}

/// Fits {A, B, w0, dw} for every theta on the grid and keeps the theta with
/// the smallest RSS.
inline ExtendedFitResult fit_erf_extended(std::span<const CdfPoint> all_points, std::span<const double> theta_grid,
                                          const FitOptions& options = {}) {
  if (theta_grid.empty()) throw Error(ErrorKind::InvalidArgument, "fit_erf_extended: empty theta grid");
  for (double t : theta_grid) {
    if (!(t > 0.0)) throw Error(ErrorKind::InvalidArgument, "fit_erf_extended: theta must be positive");
  }
  detail::validate_points(all_points);
  const auto points = decimate(all_points, options.max_points);
  const ErfFitResult base = fit_erf(points, options);
  const double tss = detail::total_sum_of_squares(points);

  ExtendedFitResult best;
  bool have_best = false;
  for (double theta : theta_grid) {
    auto model = [theta](const std::array<double, 4>& p, double w, std::array<double, 4>& grad) {
      return extended_model_gradient(ExtendedErfModel{p[0], p[1], p[2], p[3], theta}, w, grad);
    };
    auto feasible = [](const std::array<double, 4>& p) { return p[3] > 0.0 && std::isfinite(p[2]); };
    const std::array<double, 4> start{0.5, 0.5, base.model.w0, std::pow(base.model.dw, theta)};
    auto lm = detail::levenberg_marquardt<4>(points, start, model, feasible, options);
    if (!have_best || lm.rss < best.rss) {
      best.model = {lm.params[0], lm.params[1], lm.params[2], lm.params[3], theta};
      best.rss = lm.rss;
      best.r2 = tss > 0.0 ? 1.0 - lm.rss / tss : 1.0;
      best.iterations = lm.iterations;
      best.converged = lm.converged;
      best.rss_trace = std::move(lm.rss_trace);
      have_best = true;
    }
  }
  return best;
}

inline ExtendedFitResult fit_erf_extended(std::span<const CdfPoint> points, const FitOptions& options = {}) {
  const auto grid = default_theta_grid();
  return fit_erf_extended(points, grid, options);
}

}  // namespace rcfd
