#pragma once

// The eight SP 800-22 tests applied to split bit streams: frequency, block
// frequency, runs, longest run of ones, binary matrix rank, spectral (DFT),
// Maurer's universal test and cumulative sums. Constants and formulas follow
// NIST SP 800-22 Rev. 1a and its reference implementation (sts-2.1.2).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rcfd/error.hpp"
#include "rcfd/fft.hpp"
#include "rcfd/special.hpp"

namespace rcfd::nist {

using Bits = std::span<const std::uint8_t>;

inline constexpr double kDefaultAlpha = 0.01;

struct TestResult {
  std::string name;
  double statistic = 0.0;
  double p_value = 0.0;
  bool passed = false;
  std::size_t n_bits = 0;

  friend bool operator==(const TestResult&, const TestResult&) = default;
};

struct SkippedTest {
  std::string name;
  std::string reason;

  friend bool operator==(const SkippedTest&, const SkippedTest&) = default;
};

struct BatteryReport {
  std::vector<TestResult> results;
  std::vector<SkippedTest> skipped;
  bool all_passed = true;
  bool empty_input = false;

  friend bool operator==(const BatteryReport&, const BatteryReport&) = default;
};

/// Length checks can be relaxed to evaluate the standard's short worked examples.
enum class Length { Enforce, Relaxed };

namespace names {
inline constexpr const char* frequency = "FREQUENCY";
inline constexpr const char* block_frequency = "BLOCK FREQUENCY";
inline constexpr const char* runs = "RUNS";
inline constexpr const char* longest_runs = "LONGEST RUNS";
inline constexpr const char* rank = "RANK";
inline constexpr const char* fft = "FFT";
inline constexpr const char* universal = "UNIVERSAL";
inline constexpr const char* cusum_forward = "CUMULATIVE SUMS (forward)";
inline constexpr const char* cusum_backward = "CUMULATIVE SUMS (backward)";
}  // namespace names

namespace detail {

inline double clamp_p(double p) {
  if (!(p > 0.0)) return 0.0;  // also maps NaN from underflow to a failing 0
  return std::min(p, 1.0);
}

inline TestResult make_result(const char* name, double statistic, double p, std::size_t n, double alpha) {
  const double pv = clamp_p(p);
  return {name, statistic, pv, pv > alpha, n};
}

inline void require_bits(Bits bits, std::size_t min, const char* name, Length length) {
  if (length == Length::Enforce && bits.size() < min) {
    throw Error(ErrorKind::TooFewBits, std::string(name) + ": need at least " + std::to_string(min) +
                                           " bits, got " + std::to_string(bits.size()));
  }
  if (bits.empty()) throw Error(ErrorKind::TooFewBits, std::string(name) + ": empty input");
}

}  // namespace detail

inline TestResult frequency(Bits bits, Length length = Length::Enforce, double alpha = kDefaultAlpha) {
  detail::require_bits(bits, 100, names::frequency, length);
  long long sum = 0;
  for (auto b : bits) sum += b ? 1 : -1;
  const double s_obs = std::abs(static_cast<double>(sum)) / std::sqrt(static_cast<double>(bits.size()));
  return detail::make_result(names::frequency, s_obs, special::erfc(s_obs / std::numbers::sqrt2), bits.size(),
                             alpha);
}

inline TestResult block_frequency(Bits bits, std::size_t block_len = 128, Length length = Length::Enforce,
                                  double alpha = kDefaultAlpha) {
  detail::require_bits(bits, 100, names::block_frequency, length);
  if (length == Length::Enforce && block_len < 20) {
    throw Error(ErrorKind::InvalidArgument, "block_frequency: block length must be >= 20");
  }
  const std::size_t blocks = block_len == 0 ? 0 : bits.size() / block_len;
  if (blocks < 1) throw Error(ErrorKind::TooFewBits, "block_frequency: fewer bits than one block");
  double chi2 = 0.0;
  for (std::size_t i = 0; i < blocks; ++i) {
    std::size_t ones = 0;
    for (std::size_t j = 0; j < block_len; ++j) ones += bits[i * block_len + j];
    const double pi = static_cast<double>(ones) / static_cast<double>(block_len) - 0.5;
    chi2 += pi * pi;
  }
  chi2 *= 4.0 * static_cast<double>(block_len);
  return detail::make_result(names::block_frequency, chi2,
                             special::igamc(static_cast<double>(blocks) / 2.0, chi2 / 2.0), bits.size(), alpha);
}

/// Fails with p = 0 when the ones proportion misses the frequency prerequisite.
inline TestResult runs(Bits bits, Length length = Length::Enforce, double alpha = kDefaultAlpha) {
  detail::require_bits(bits, 100, names::runs, length);
  const auto n = static_cast<double>(bits.size());
  std::size_t ones = 0;
  for (auto b : bits) ones += b;
  const double pi = static_cast<double>(ones) / n;
  if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(n)) {
    return detail::make_result(names::runs, 0.0, 0.0, bits.size(), alpha);
  }
  std::size_t v = 1;
  for (std::size_t k = 0; k + 1 < bits.size(); ++k) v += bits[k] != bits[k + 1];
  const double vobs = static_cast<double>(v);
  const double arg = std::abs(vobs - 2.0 * n * pi * (1.0 - pi)) / (2.0 * std::sqrt(2.0 * n) * pi * (1.0 - pi));
  return detail::make_result(names::runs, vobs, special::erfc(arg), bits.size(), alpha);
}

/// Category tables for the longest-run test, selected by stream length.
struct LongestRunTable {
  std::size_t min_bits;
  std::size_t block_len;
  int first_category;  // longest run <= first_category falls in bin 0
  std::vector<double> probabilities;
};

inline const std::array<LongestRunTable, 3>& longest_run_tables() {
  // SP 800-22 Rev. 1a, section 2.4.4 and 3.4.
  static const std::array<LongestRunTable, 3> tables{{
      {128, 8, 1, {0.2148, 0.3672, 0.2305, 0.1875}},
      {6272, 128, 4, {0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124}},
      {750000, 10000, 10, {0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727}},
  }};
  return tables;
}

inline TestResult longest_runs(Bits bits, double alpha = kDefaultAlpha) {
  detail::require_bits(bits, 128, names::longest_runs, Length::Enforce);
  const auto& tables = longest_run_tables();
  const LongestRunTable* table = &tables[0];
  for (const auto& t : tables) {
    if (bits.size() >= t.min_bits) table = &t;
  }
  const std::size_t blocks = bits.size() / table->block_len;
  const std::size_t categories = table->probabilities.size();
  std::vector<double> counts(categories, 0.0);
  for (std::size_t i = 0; i < blocks; ++i) {
    int longest = 0, run = 0;
    for (std::size_t j = 0; j < table->block_len; ++j) {
      run = bits[i * table->block_len + j] ? run + 1 : 0;
      longest = std::max(longest, run);
    }
    const int bin = std::clamp(longest - table->first_category, 0, static_cast<int>(categories) - 1);
    counts[static_cast<std::size_t>(bin)] += 1.0;
  }
  double chi2 = 0.0;
  const auto nb = static_cast<double>(blocks);
  for (std::size_t i = 0; i < categories; ++i) {
    const double expected = nb * table->probabilities[i];
    chi2 += (counts[i] - expected) * (counts[i] - expected) / expected;
  }
  const double k = static_cast<double>(categories - 1);
  return detail::make_result(names::longest_runs, chi2, special::igamc(k / 2.0, chi2 / 2.0), bits.size(), alpha);
}

/// Rank over GF(2) of a matrix with up to 64 columns, one row per word.
inline int gf2_rank(std::vector<std::uint64_t> rows, int cols) {
  int rank = 0;
  for (int c = cols - 1; c >= 0 && rank < static_cast<int>(rows.size()); --c) {
    const std::uint64_t mask = std::uint64_t{1} << c;
    auto pivot = std::find_if(rows.begin() + rank, rows.end(), [mask](std::uint64_t r) { return r & mask; });
    if (pivot == rows.end()) continue;
    std::iter_swap(rows.begin() + rank, pivot);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != static_cast<std::size_t>(rank) && (rows[r] & mask)) rows[r] ^= rows[static_cast<std::size_t>(rank)];
    }
    ++rank;
  }
  return rank;
}

/// Probability that a random rows x cols GF(2) matrix has rank r.
inline double rank_probability(int r, int rows, int cols) {
  double product = 1.0;
  for (int i = 0; i < r; ++i) {
    product *= (1.0 - std::ldexp(1.0, i - rows)) * (1.0 - std::ldexp(1.0, i - cols)) / (1.0 - std::ldexp(1.0, i - r));
  }
  return std::ldexp(product, r * (rows + cols - r) - rows * cols);
}

inline TestResult matrix_rank(Bits bits, double alpha = kDefaultAlpha) {
  constexpr int dim = 32;
  constexpr std::size_t per_matrix = dim * dim;
  detail::require_bits(bits, 38 * per_matrix, names::rank, Length::Enforce);
  const std::size_t matrices = bits.size() / per_matrix;
  double full = 0, minus_one = 0, rest = 0;
  std::vector<std::uint64_t> rows(dim);
  for (std::size_t m = 0; m < matrices; ++m) {
    for (int i = 0; i < dim; ++i) {
      std::uint64_t row = 0;
      for (int j = 0; j < dim; ++j) row = (row << 1) | bits[m * per_matrix + static_cast<std::size_t>(i * dim + j)];
      rows[static_cast<std::size_t>(i)] = row;
    }
    const int r = gf2_rank(rows, dim);
    if (r == dim) {
      full += 1;
    } else if (r == dim - 1) {
      minus_one += 1;
    } else {
      rest += 1;
    }
  }
  const double p_full = rank_probability(dim, dim, dim);
  const double p_minus = rank_probability(dim - 1, dim, dim);
  const double p_rest = 1.0 - p_full - p_minus;
  const auto n = static_cast<double>(matrices);
  const double chi2 = (full - n * p_full) * (full - n * p_full) / (n * p_full) +
                      (minus_one - n * p_minus) * (minus_one - n * p_minus) / (n * p_minus) +
                      (rest - n * p_rest) * (rest - n * p_rest) / (n * p_rest);
  return detail::make_result(names::rank, chi2, std::exp(-chi2 / 2.0), bits.size(), alpha);
}

inline TestResult spectral_fft(Bits bits, double alpha = kDefaultAlpha) {
  detail::require_bits(bits, 1000, names::fft, Length::Enforce);
  const std::size_t n = bits.size() & ~std::size_t{1};
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = bits[i] ? 1.0 : -1.0;
  const auto spectrum = fft::dft(std::span<const double>(x));
  const auto nd = static_cast<double>(n);
  const double threshold = std::sqrt(std::log(1.0 / 0.05) * nd);
  std::size_t below = 0;
  for (std::size_t i = 0; i < n / 2; ++i) below += std::abs(spectrum[i]) < threshold;
  const double expected = 0.95 * nd / 2.0;
  const double d = (static_cast<double>(below) - expected) / std::sqrt(nd * 0.95 * 0.05 / 4.0);
  return detail::make_result(names::fft, d, special::erfc(std::abs(d) / std::numbers::sqrt2), n, alpha);
}

/// Block length L for Maurer's test, or nullopt below the 387,840-bit floor.
inline std::optional<int> universal_block_length(std::size_t n) {
  constexpr std::array<std::pair<std::size_t, int>, 11> thresholds{{
      {1059061760, 16}, {496435200, 15}, {231669760, 14}, {107560960, 13}, {49643520, 12}, {22753280, 11},
      {10342400, 10}, {4654080, 9}, {2068480, 8}, {904960, 7}, {387840, 6},
  }};
  for (auto [min_bits, L] : thresholds) {
    if (n >= min_bits) return L;
  }
  return std::nullopt;
}

inline TestResult maurer_universal(Bits bits, double alpha = kDefaultAlpha) {
  const auto block = universal_block_length(bits.size());
  if (!block) {
    throw Error(ErrorKind::TooFewBits, "UNIVERSAL: need at least 387840 bits, got " + std::to_string(bits.size()));
  }
  // Expected value and variance of f_n for L = 1..16.
  static constexpr std::array<double, 17> expected_value{
      0, 0.73264948, 1.5374383, 2.40160681, 3.31122472, 4.25342659, 5.2177052, 6.1962507, 7.1836656,
      8.1764248, 9.1723243, 10.170032, 11.168765, 12.168070, 13.167693, 14.167488, 15.167379};
  static constexpr std::array<double, 17> variance{0,     0.690, 1.338, 1.901, 2.358, 2.705, 2.954, 3.125, 3.238,
                                                   3.311, 3.356, 3.384, 3.401, 3.410, 3.416, 3.419, 3.421};
  const int L = *block;
  const std::size_t Q = 10 * (std::size_t{1} << L);
  const std::size_t K = bits.size() / static_cast<std::size_t>(L) - Q;
  std::vector<std::size_t> last_seen(std::size_t{1} << L, 0);
  auto pattern = [&](std::size_t i) {  // block i, 1-based
    std::size_t v = 0;
    for (int j = 0; j < L; ++j) v = (v << 1) | bits[(i - 1) * static_cast<std::size_t>(L) + static_cast<std::size_t>(j)];
    return v;
  };
  for (std::size_t i = 1; i <= Q; ++i) last_seen[pattern(i)] = i;
  double sum = 0.0;
  for (std::size_t i = Q + 1; i <= Q + K; ++i) {
    const std::size_t p = pattern(i);
    sum += std::log2(static_cast<double>(i - last_seen[p]));
    last_seen[p] = i;
  }
  const auto kd = static_cast<double>(K);
  const double fn = sum / kd;
  const double c = 0.7 - 0.8 / L + (4.0 + 32.0 / L) * std::pow(kd, -3.0 / L) / 15.0;
  const double sigma = c * std::sqrt(variance[static_cast<std::size_t>(L)] / kd);
  const double arg = std::abs(fn - expected_value[static_cast<std::size_t>(L)]) / (std::numbers::sqrt2 * sigma);
  return detail::make_result(names::universal, fn, special::erfc(arg), bits.size(), alpha);
}

namespace detail {

/// p-value of the maximal partial-sum excursion z over n steps.
inline double cusum_p_value(long long n, long long z) {
  if (z == 0) return 1.0;
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const double zd = static_cast<double>(z);
  double sum1 = 0.0;
  for (long long k = (-n / z + 1) / 4; k <= (n / z - 1) / 4; ++k) {
    sum1 += special::normal_cdf((4.0 * k + 1.0) * zd / sqrt_n) - special::normal_cdf((4.0 * k - 1.0) * zd / sqrt_n);
  }
  double sum2 = 0.0;
  for (long long k = (-n / z - 3) / 4; k <= (n / z - 1) / 4; ++k) {
    sum2 += special::normal_cdf((4.0 * k + 3.0) * zd / sqrt_n) - special::normal_cdf((4.0 * k + 1.0) * zd / sqrt_n);
  }
  return 1.0 - sum1 + sum2;
}

}  // namespace detail

/// Forward and backward cumulative-sums results, in that order.
inline std::pair<TestResult, TestResult> cumulative_sums(Bits bits, double alpha = kDefaultAlpha) {
  detail::require_bits(bits, 100, "CUMULATIVE SUMS", Length::Enforce);
  const auto n = static_cast<long long>(bits.size());
  long long s = 0, forward = 0;
  for (auto b : bits) {
    s += b ? 1 : -1;
    forward = std::max(forward, std::abs(s));
  }
  s = 0;
  long long backward = 0;
  for (auto it = bits.rbegin(); it != bits.rend(); ++it) {
    s += *it ? 1 : -1;
    backward = std::max(backward, std::abs(s));
  }
  return {detail::make_result(names::cusum_forward, static_cast<double>(forward), detail::cusum_p_value(n, forward),
                              bits.size(), alpha),
          detail::make_result(names::cusum_backward, static_cast<double>(backward),
                              detail::cusum_p_value(n, backward), bits.size(), alpha)};
}

struct BatteryConfig {
  std::size_t block_len = 128;
  double alpha = kDefaultAlpha;
};

/// Runs all eight tests in fixed order; a length-precondition failure moves
/// the test to `skipped` instead of failing it.
inline BatteryReport run_battery(Bits bits, const BatteryConfig& config = {}) {
  BatteryReport report;
  report.empty_input = bits.empty();
  auto attempt = [&](const char* name, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::TooFewBits) throw;
      report.skipped.push_back({name, "insufficient bits"});
    }
  };
  attempt(names::frequency, [&] { report.results.push_back(frequency(bits, Length::Enforce, config.alpha)); });
  attempt(names::block_frequency, [&] {
    report.results.push_back(block_frequency(bits, config.block_len, Length::Enforce, config.alpha));
  });
  attempt(names::runs, [&] { report.results.push_back(runs(bits, Length::Enforce, config.alpha)); });
  attempt(names::longest_runs, [&] { report.results.push_back(longest_runs(bits, config.alpha)); });
  attempt(names::rank, [&] { report.results.push_back(matrix_rank(bits, config.alpha)); });
  attempt(names::fft, [&] { report.results.push_back(spectral_fft(bits, config.alpha)); });
  attempt(names::universal, [&] { report.results.push_back(maurer_universal(bits, config.alpha)); });
  attempt("CUMULATIVE SUMS", [&] {
    auto [fwd, bwd] = cumulative_sums(bits, config.alpha);
    report.results.push_back(std::move(fwd));
    report.results.push_back(std::move(bwd));
  });
  report.all_passed = std::all_of(report.results.begin(), report.results.end(),
                                  [](const TestResult& r) { return r.passed; });
  return report;
}

}  // namespace rcfd::nist
