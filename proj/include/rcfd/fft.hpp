#pragma once

// Discrete Fourier transform of arbitrary length in O(n log n): iterative
// radix-2 for powers of two, Bluestein's chirp-z reduction otherwise.

#include <bit>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace rcfd::fft {

using cd = std::complex<double>;

namespace detail {

inline void radix2(std::vector<cd>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<cd> twiddle(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    twiddle[k] = std::polar(1.0, sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cd u = a[i + k];
        const cd v = a[i + k + len / 2] * twiddle[k * stride];
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
  if (inverse) {
    for (auto& x : a) x /= static_cast<double>(n);
  }
}

}  // namespace detail

/// Forward transform X_k = sum_j x_j exp(-2 pi i jk / n).
inline std::vector<cd> dft(std::span<const cd> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  if (std::has_single_bit(n)) {
    std::vector<cd> a(x.begin(), x.end());
    detail::radix2(a, false);
    return a;
  }
  // Bluestein: jk = (j^2 + k^2 - (k - j)^2) / 2.
  const std::size_t m = std::bit_ceil(2 * n - 1);
  std::vector<cd> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto k2 = static_cast<unsigned __int128>(k) * k % (2 * n);
    chirp[k] = std::polar(1.0, -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n));
  }
  std::vector<cd> a(m), b(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
  b[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);
  detail::radix2(a, false);
  detail::radix2(b, false);
  for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
  detail::radix2(a, true);
  std::vector<cd> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * chirp[k];
  return out;
}

inline std::vector<cd> dft(std::span<const double> x) {
  std::vector<cd> c(x.begin(), x.end());
  return dft(std::span<const cd>(c));
}

}  // namespace rcfd::fft
