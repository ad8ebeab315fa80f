#pragma once

// Deterministic synthetic raw streams: the Gaussian null and injected
// defects (lag-1 regression, duplicated halves, slow sinusoidal drift), plus
// uniform quantization to emulate ADC discretization.
//
// Generator: SplitMix64 evaluated in counter mode. Draw i of seed s is
//   mix(s + (i + 1) * 0x9E3779B97F4A7C15)
// with the SplitMix64 finalizer. Uniforms take the top 53 bits,
// u = (x >> 11 + 0.5) / 2^53, which lies strictly inside (0, 1). Normals are
// obtained by inversion (AS 241), one uniform per normal.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "rcfd/error.hpp"
#include "rcfd/series.hpp"
#include "rcfd/special.hpp"

namespace rcfd::synth {

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t at(std::uint64_t counter) const {
    std::uint64_t z = seed_ + (counter + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double uniform_at(std::uint64_t counter) const {
    return (static_cast<double>(at(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal_at(std::uint64_t counter) const { return special::normal_quantile(uniform_at(counter)); }

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

/// Derives an independent seed for sub-stream `index` of `master`.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return CounterRng(master ^ 0xD1B54A32D192ED03ULL).at(index);
}

enum class Kind { Gaussian, Ar1, DuplicateHalves, SinusoidDrift };

struct SourceSpec {
  Kind kind = Kind::Gaussian;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double rho = 0.0;
  double jitter = 0.0;
  double amplitude = 0.0;
  double period = 2.0;
};

namespace detail {

inline void require_n(std::size_t n) {
  if (n < 4) throw Error(ErrorKind::TooShort, "synthetic source needs n >= 4");
}

}  // namespace detail

inline Series gaussian(std::size_t n, std::uint64_t seed) {
  detail::require_n(n);
  const CounterRng rng(seed);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = rng.normal_at(i);
  return Series(std::move(out));
}

/// Stationary unit-variance AR(1): x_{k+1} = rho x_k + sqrt(1 - rho^2) g_{k+1}.
inline Series ar1(std::size_t n, double rho, std::uint64_t seed) {
  detail::require_n(n);
  if (!(std::abs(rho) < 1.0)) throw Error(ErrorKind::InvalidRho, "ar1 requires |rho| < 1");
  const CounterRng rng(seed);
  const double innovation = std::sqrt(1.0 - rho * rho);
  std::vector<double> out(n);
  out[0] = rng.normal_at(0);
  for (std::size_t i = 1; i < n; ++i) out[i] = rho * out[i - 1] + innovation * rng.normal_at(i);
  return Series(std::move(out));
}

/// Back half repeats the front half plus jitter-scaled fresh noise.
inline Series duplicate_halves(std::size_t n, double jitter, std::uint64_t seed) {
  detail::require_n(n);
  if (n % 2 != 0) throw Error(ErrorKind::OddLength, "duplicate_halves requires even n");
  if (!(jitter >= 0.0)) throw Error(ErrorKind::InvalidArgument, "jitter must be >= 0");
  const CounterRng rng(seed);
  const std::size_t half = n / 2;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < half; ++i) out[i] = rng.normal_at(i);
  for (std::size_t i = 0; i < half; ++i) {
    out[half + i] = jitter == 0.0 ? out[i] : out[i] + jitter * rng.normal_at(half + i);
  }
  return Series(std::move(out));
}

inline Series sinusoid_drift(std::size_t n, double amplitude, double period, std::uint64_t seed) {
  detail::require_n(n);
  if (!(period >= 2.0)) throw Error(ErrorKind::InvalidPeriod, "sinusoid_drift requires period >= 2");
  const CounterRng rng(seed);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = rng.normal_at(i);
    if (amplitude != 0.0) {
      out[i] += amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / period);
    }
  }
  return Series(std::move(out));
}

inline Series generate(const SourceSpec& spec) {
  switch (spec.kind) {
    case Kind::Gaussian: return gaussian(spec.n, spec.seed);
    case Kind::Ar1: return ar1(spec.n, spec.rho, spec.seed);
    case Kind::DuplicateHalves: return duplicate_halves(spec.n, spec.jitter, spec.seed);
    case Kind::SinusoidDrift: return sinusoid_drift(spec.n, spec.amplitude, spec.period, spec.seed);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown source kind");
}

/// Uniform quantization of [min, max] into 2^bits cells of width
/// (max - min) / 2^bits. Cell q is reconstructed at min + q (max - min) /
/// (2^bits - 1), so the extremes are kept and re-quantizing is a no-op.
inline Series quantize(const Series& s, int bits) {
  if (bits < 1 || bits > 24) throw Error(ErrorKind::InvalidBitDepth, "quantize: bits must be in 1..24");
  rcfd::detail::require_length(s.size(), 2, "quantize");
  const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
  const double min = *lo;
  const double range = *hi - min;
  if (!(range > 0.0)) return s;
  const auto levels = static_cast<double>(std::uint32_t{1} << bits);
  const double cell = range / levels;
  const double spacing = range / (levels - 1.0);
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double q = std::min(std::floor((s[i] - min) / cell), levels - 1.0);
    out[i] = q == levels - 1.0 ? *hi : min + q * spacing;
  }
  return Series(std::move(out));
}

inline const char* to_string(Kind k) {
  switch (k) {
    case Kind::Gaussian: return "gaussian";
    case Kind::Ar1: return "ar1";
    case Kind::DuplicateHalves: return "duplicate_halves";
    case Kind::SinusoidDrift: return "sinusoid_drift";
  }
  return "unknown";
}

inline Kind kind_from_string(const std::string& s) {
  if (s == "gaussian") return Kind::Gaussian;
  if (s == "ar1") return Kind::Ar1;
  if (s == "duplicate_halves") return Kind::DuplicateHalves;
  if (s == "sinusoid_drift") return Kind::SinusoidDrift;
  throw Error(ErrorKind::InvalidArgument, "unknown source kind '" + s + "'");
}

}  // namespace rcfd::synth
