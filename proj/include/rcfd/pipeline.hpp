#pragma once

// End-to-end analysis of a raw stream: subsample topology, w-statistics,
// angle split with bit extraction, the NIST battery, and verdict assembly.
// Also the chunked monitor with its consecutive-failure alarm.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rcfd/angle_split.hpp"
#include "rcfd/erf_fit.hpp"
#include "rcfd/error.hpp"
#include "rcfd/io.hpp"
#include "rcfd/nist.hpp"
#include "rcfd/series.hpp"
#include "rcfd/topology.hpp"
#include "rcfd/w_statistics.hpp"

namespace rcfd {

inline constexpr const char* kSchemaVersion = "1.0.0";
inline constexpr std::size_t kMinAnalysisLength = 2048;

struct AnalysisConfig {
  double pearson_factor = 10.0;  // alarm when R^2 > pearson_factor / N
  int bootstrap_draws = 200;
  double bootstrap_quantile = 0.99;
  double nist_alpha = 0.01;
  std::size_t chunk_size = 0;  // monitor mode only
  int consecutive_alarms = 3;
  std::uint64_t seed = 42;
  std::size_t bit_stride = 2;  // signs fed to the NIST battery: every bit_stride-th
  bool w_significance_hard = true;
  bool uniformity_hard = false;

  friend bool operator==(const AnalysisConfig&, const AnalysisConfig&) = default;
};

/// Throws InvalidArgument on a non-positive field.
inline void validate(const AnalysisConfig& c) {
  auto fail = [](const char* what) { throw Error(ErrorKind::InvalidArgument, std::string("config: ") + what); };
  if (!(c.pearson_factor > 0.0)) fail("pearson_factor must be positive");
  if (c.bootstrap_draws < 2) fail("bootstrap_draws must be >= 2");
  if (!(c.bootstrap_quantile >= 0.5 && c.bootstrap_quantile < 1.0)) fail("bootstrap_quantile must be in [0.5, 1)");
  if (!(c.nist_alpha > 0.0 && c.nist_alpha < 1.0)) fail("nist_alpha must be in (0, 1)");
  if (c.consecutive_alarms < 1) fail("consecutive_alarms must be >= 1");
  if (c.bit_stride < 1) fail("bit_stride must be >= 1");
}

/// The parts of an erf fit that go into a report.
struct FitSummary {
  double w0 = 0.0;
  double dw = 0.0;
  double r2 = 0.0;
  double rss = 0.0;
  int iterations = 0;
  bool converged = false;

  static FitSummary of(const ErfFitResult& f) {
    return {f.model.w0, f.model.dw, f.r2, f.rss, f.iterations, f.converged};
  }
  friend bool operator==(const FitSummary&, const FitSummary&) = default;
};

struct WSummary {
  std::string label;
  std::size_t n_points = 0;  // points entering the fit after decimation
  FitSummary fit;

  friend bool operator==(const WSummary&, const WSummary&) = default;
};

struct AngleSummary {
  std::string label;
  double uniformity = 0.0;
  double uniformity_band = 0.0;
  double zero_fraction = 0.0;
  std::size_t dropped = 0;
  FitSummary radius_fit;
  FitSummary dphi_fit;
  FitSummary dr_fit;
  std::size_t n_bits = 0;
  double ones_fraction = 0.0;

  friend bool operator==(const AngleSummary&, const AngleSummary&) = default;
};

enum class Verdict { Pass, Warn, Fail };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Warn: return "warn";
    case Verdict::Fail: return "fail";
  }
  return "fail";
}

inline Verdict verdict_from_string(const std::string& s) {
  if (s == "pass") return Verdict::Pass;
  if (s == "warn") return Verdict::Warn;
  if (s == "fail") return Verdict::Fail;
  throw Error(ErrorKind::ParseError, "unknown verdict '" + s + "'");
}

struct FullReport {
  std::string schema_version = kSchemaVersion;
  std::string input_descriptor;
  std::string input_hash;
  std::size_t n_samples = 0;
  AnalysisConfig config;
  PairCriterion pair_criterion;
  double pearson_threshold = 0.0;
  WSummary w12;
  WSummary w34;
  WBands w_bands;
  WCriterion w_criterion;
  AngleSummary angle12;
  AngleSummary angle34;
  nist::BatteryReport nist12;
  nist::BatteryReport nist34;
  std::vector<std::string> failures;  // hard criteria violated
  std::vector<std::string> warnings;  // soft flags and input notes
  Verdict verdict = Verdict::Pass;

  friend bool operator==(const FullReport&, const FullReport&) = default;
};

/// Plot-ready curves kept alongside a report when requested.
struct AnalysisArtifacts {
  std::vector<CdfPoint> w12_points;
  std::vector<CdfPoint> w34_points;
  std::vector<std::pair<double, double>> inhomogeneity12;  // (r', phi')
  std::vector<std::pair<double, double>> inhomogeneity34;
};

/// Sup-norm band for angle_uniformity under the null: the two-sided
/// Kolmogorov-Smirnov critical value at level 0.001.
inline double uniformity_band(std::size_t n) {
  return std::sqrt(-0.5 * std::log(0.0005)) / std::sqrt(static_cast<double>(n));
}

namespace detail {

struct AngleChannel {
  AngleSummary summary;
  nist::BatteryReport battery;
  std::vector<std::pair<double, double>> scatter;
  bool degenerate = false;  // a fit had no spread to work with
};

inline AngleChannel angle_channel(const Series& a, const Series& b, const std::string& label,
                                  const AnalysisConfig& config, bool keep_scatter) {
  AngleChannel out;
  const auto d = decompose(center(a), center(b));
  const auto t = split(d);
  const auto bits = extract_bits_strided(t, config.bit_stride);
  auto& s = out.summary;
  s.label = label;
  s.uniformity = angle_uniformity(d.phi);
  s.uniformity_band = uniformity_band(d.phi.size());
  s.zero_fraction = t.zero_fraction;
  s.dropped = d.dropped;
  // Constant phi or r (e.g. identical subsamples) leaves nothing to fit.
  auto guarded = [&](auto&& fit) {
    try {
      return FitSummary::of(fit());
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateSeries && e.kind() != ErrorKind::DegenerateInput) throw;
      out.degenerate = true;
      return FitSummary{};
    }
  };
  s.radius_fit = guarded([&] { return radius_fit(d); });
  std::vector<double> dphi(t.signs.size());
  for (std::size_t k = 0; k < dphi.size(); ++k) dphi[k] = t.signs[k] * t.abs_dphi[k];
  s.dphi_fit = guarded([&] { return detail::fit_normalized_sra(dphi, {}); });
  s.dr_fit = guarded([&] { return detail::fit_normalized_sra(t.dr, {}); });
  s.n_bits = bits.size();
  std::size_t ones = 0;
  for (auto bit : bits.bits) ones += bit;
  s.ones_fraction = bits.size() ? static_cast<double>(ones) / static_cast<double>(bits.size()) : 0.0;
  out.battery = nist::run_battery(bits.bits, {128, config.nist_alpha});
  if (keep_scatter) {
    out.scatter.reserve(t.dr.size());
    for (std::size_t k = 0; k < t.dr.size(); ++k) out.scatter.emplace_back(t.dr[k], dphi[k]);
  }
  return out;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return s;
}

}  // namespace detail

/// Runs every criterion on one raw series and composes the verdict.
inline FullReport analyze(const Series& input, const AnalysisConfig& config, const std::string& descriptor = "",
                          AnalysisArtifacts* artifacts = nullptr) {
  validate(config);
  FullReport report;
  report.config = config;
  report.input_descriptor = descriptor;
  report.input_hash = "fnv1a64:" + detail::hex64(io::content_hash(input.values()));
  report.n_samples = input.size();

  auto values = input.values();
  if (values.size() % 2 != 0) {
    values = values.first(values.size() - 1);
    report.warnings.push_back("input_truncated_to_even");
  }
  if (values.size() < kMinAnalysisLength) {
    throw Error(ErrorKind::TooShort, "analyze needs at least " + std::to_string(kMinAnalysisLength) + " samples");
  }
  if (config.nist_alpha != nist::kDefaultAlpha) report.warnings.push_back("nist_alpha_overridden");

  const auto quad = split_quad(values);
  const std::size_t n = quad.s1.size();

  report.pair_criterion = pair_criteria(quad);
  report.pearson_threshold = config.pearson_factor / static_cast<double>(n);
  if (report.pair_criterion.alarm_12(config.pearson_factor)) report.failures.push_back("pearson_12");
  if (report.pair_criterion.alarm_34(config.pearson_factor)) report.failures.push_back("pearson_34");

  const auto w12 = w_criterion_pipeline(quad.s1, quad.s2, "1&2");
  const auto w34 = w_criterion_pipeline(quad.s3, quad.s4, "3&4");
  const std::size_t fit_points = std::min(n, FitOptions{}.max_points);
  report.w12 = {w12.pair_label, fit_points, FitSummary::of(w12.fit)};
  report.w34 = {w34.pair_label, fit_points, FitSummary::of(w34.fit)};

  // Bands describe one fit; the delta of two fits gets sqrt(2) headroom.
  WBands bands = bootstrap_bands_cached(n, config.bootstrap_draws, config.bootstrap_quantile, config.seed);
  bands.band_w0 *= std::numbers::sqrt2;
  bands.band_dw *= std::numbers::sqrt2;
  report.w_bands = bands;
  if (bands.low_confidence) report.warnings.push_back("bootstrap_low_confidence");
  if (w12.fit.converged && w34.fit.converged) {
    report.w_criterion = compare_w(w12, w34, bands);
    if (report.w_criterion.significant) {
      (config.w_significance_hard ? report.failures : report.warnings).push_back("w_significant");
    }
  } else {
    report.failures.push_back("w_fit_unconverged");
  }

  const bool keep = artifacts != nullptr;
  auto a12 = detail::angle_channel(quad.s1, quad.s2, "1&2", config, keep);
  auto a34 = detail::angle_channel(quad.s3, quad.s4, "3&4", config, keep);
  for (const auto* a : {&a12, &a34}) {
    const auto& s = a->summary;
    const std::string suffix = s.label == "1&2" ? "_12" : "_34";
    if (a->degenerate) report.failures.push_back("angle_degenerate" + suffix);
    if (s.uniformity > s.uniformity_band) {
      (config.uniformity_hard ? report.failures : report.warnings).push_back("angle_uniformity" + suffix);
    }
    for (const auto& r : a->battery.results) {
      if (!r.passed) report.failures.push_back("nist" + suffix + ":" + r.name);
    }
    if (a->battery.results.empty()) report.warnings.push_back("nist" + suffix + ":no_tests_executed");
  }
  report.angle12 = a12.summary;
  report.angle34 = a34.summary;
  report.nist12 = std::move(a12.battery);
  report.nist34 = std::move(a34.battery);

  bool soft = false;
  for (const auto& w : report.warnings) {
    soft = soft || (w != "input_truncated_to_even" && w != "nist_alpha_overridden");
  }
  report.verdict = !report.failures.empty() ? Verdict::Fail : (soft ? Verdict::Warn : Verdict::Pass);

  if (artifacts) {
    artifacts->w12_points = decimate(cdf_points(w12.w_ranked), FitOptions{}.max_points);
    artifacts->w34_points = decimate(cdf_points(w34.w_ranked), FitOptions{}.max_points);
    artifacts->inhomogeneity12 = std::move(a12.scatter);
    artifacts->inhomogeneity34 = std::move(a34.scatter);
  }
  return report;
}

struct ChunkRecord {
  std::size_t index = 0;
  bool errored = false;
  std::string error;
  std::optional<FullReport> report;

  bool failing() const { return !errored && report && report->verdict == Verdict::Fail; }
};

struct AlarmEvent {
  std::size_t chunk_index = 0;
  int consecutive = 0;

  friend bool operator==(const AlarmEvent&, const AlarmEvent&) = default;
};

/// Incremental chunk monitor. Only the consecutive-failure counter carries
/// over between chunks; an errored chunk resets it.
class Monitor {
 public:
  explicit Monitor(AnalysisConfig config) : config_(std::move(config)) {
    validate(config_);
    if (config_.chunk_size < kMinAnalysisLength || config_.chunk_size % 2 != 0) {
      throw Error(ErrorKind::InvalidArgument, "monitor: chunk_size must be even and >= 2048");
    }
  }

  /// Analyzes one chunk; returns the alarm raised by it, if any.
  std::optional<AlarmEvent> push(std::span<const double> chunk, ChunkRecord* record_out = nullptr) {
    ChunkRecord record;
    record.index = next_index_++;
    try {
      record.report = analyze(Series(std::vector<double>(chunk.begin(), chunk.end())), config_,
                              "chunk " + std::to_string(record.index));
    } catch (const Error& e) {
      record.errored = true;
      record.error = e.what();
    }
    std::optional<AlarmEvent> alarm;
    if (record.failing()) {
      if (++streak_ >= config_.consecutive_alarms) {
        alarm = AlarmEvent{record.index, streak_};
        streak_ = 0;
      }
    } else {
      streak_ = 0;
    }
    if (record_out) *record_out = std::move(record);
    return alarm;
  }

  const AnalysisConfig& config() const { return config_; }

 private:
  AnalysisConfig config_;
  std::size_t next_index_ = 0;
  int streak_ = 0;
};

struct MonitorResult {
  std::vector<ChunkRecord> chunks;
  std::vector<AlarmEvent> alarms;
  std::size_t trailing_samples = 0;  // tail shorter than one chunk, not analyzed
};

inline MonitorResult monitor(std::span<const double> stream, const AnalysisConfig& config) {
  Monitor m(config);
  MonitorResult out;
  const std::size_t size = config.chunk_size;
  std::size_t pos = 0;
  for (; pos + size <= stream.size(); pos += size) {
    ChunkRecord record;
    if (auto alarm = m.push(stream.subspan(pos, size), &record)) out.alarms.push_back(*alarm);
    out.chunks.push_back(std::move(record));
  }
  out.trailing_samples = stream.size() - pos;
  return out;
}

}  // namespace rcfd
