#pragma once

// JSON form of reports and configuration. Field names are fixed by
// schema/report.schema.json; bump kSchemaVersion on any change.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rcfd/error.hpp"
#include "rcfd/nist.hpp"
#include "rcfd/pipeline.hpp"

namespace rcfd {

using json = nlohmann::json;

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PairCriterion, r2_12, r2_34, n)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(WBands, band_w0, band_dw, draws, quantile, low_confidence)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(WCriterion, delta_w0, delta_dw, band_w0, band_dw, significant)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(FitSummary, w0, dw, r2, rss, iterations, converged)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(WSummary, label, n_points, fit)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(AngleSummary, label, uniformity, uniformity_band, zero_fraction, dropped,
                                   radius_fit, dphi_fit, dr_fit, n_bits, ones_fraction)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(AnalysisConfig, pearson_factor, bootstrap_draws, bootstrap_quantile, nist_alpha,
                                   chunk_size, consecutive_alarms, seed, bit_stride, w_significance_hard,
                                   uniformity_hard)

namespace nist {
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TestResult, name, statistic, p_value, passed, n_bits)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SkippedTest, name, reason)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(BatteryReport, results, skipped, all_passed, empty_input)
}  // namespace nist

inline void to_json(json& j, const FullReport& r) {
  j = json::object();
  j["schema_version"] = r.schema_version;
  j["input"]["descriptor"] = r.input_descriptor;
  j["input"]["hash"] = r.input_hash;
  j["input"]["n_samples"] = r.n_samples;
  j["config"] = r.config;
  j["pair_criterion"]["values"] = r.pair_criterion;
  j["pair_criterion"]["threshold"] = r.pearson_threshold;
  j["w_stats"]["w12"] = r.w12;
  j["w_stats"]["w34"] = r.w34;
  j["w_stats"]["bands"] = r.w_bands;
  j["w_stats"]["criterion"] = r.w_criterion;
  j["angle"]["a12"] = r.angle12;
  j["angle"]["a34"] = r.angle34;
  j["nist"]["b12"] = r.nist12;
  j["nist"]["b34"] = r.nist34;
  j["failures"] = r.failures;
  j["warnings"] = r.warnings;
  j["verdict"] = to_string(r.verdict);
}

inline void from_json(const json& j, FullReport& r) {
  r.schema_version = j.at("schema_version").get<std::string>();
  const auto& in = j.at("input");
  r.input_descriptor = in.at("descriptor").get<std::string>();
  r.input_hash = in.at("hash").get<std::string>();
  r.n_samples = in.at("n_samples").get<std::size_t>();
  r.config = j.at("config").get<AnalysisConfig>();
  r.pair_criterion = j.at("pair_criterion").at("values").get<PairCriterion>();
  r.pearson_threshold = j.at("pair_criterion").at("threshold").get<double>();
  const auto& w = j.at("w_stats");
  r.w12 = w.at("w12").get<WSummary>();
  r.w34 = w.at("w34").get<WSummary>();
  r.w_bands = w.at("bands").get<WBands>();
  r.w_criterion = w.at("criterion").get<WCriterion>();
  r.angle12 = j.at("angle").at("a12").get<AngleSummary>();
  r.angle34 = j.at("angle").at("a34").get<AngleSummary>();
  r.nist12 = j.at("nist").at("b12").get<nist::BatteryReport>();
  r.nist34 = j.at("nist").at("b34").get<nist::BatteryReport>();
  r.failures = j.at("failures").get<std::vector<std::string>>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
}

/// Canonical serialization; identical reports give identical bytes.
inline std::string report_to_string(const FullReport& r) { return json(r).dump(2) + "\n"; }

inline FullReport parse_report(const std::string& text) {
  try {
    const auto j = json::parse(text);
    if (j.at("schema_version").get<std::string>() != kSchemaVersion) {
      throw Error(ErrorKind::ParseError, "unsupported schema_version");
    }
    return j.get<FullReport>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("report: ") + e.what());
  }
}

inline void emit_report(const FullReport& r, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot create '" + path + "'");
  out << report_to_string(r);
  if (!out) throw Error(ErrorKind::IoError, "write failed on '" + path + "'");
}

/// Two-column whitespace-separated value file, full double precision.
template <typename Pairs>
void write_columns(const std::string& path, const Pairs& rows, const char* header) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot create '" + path + "'");
  out << "# " << header << "\n" << std::setprecision(17);
  for (const auto& [a, b] : rows) out << a << ' ' << b << '\n';
  if (!out) throw Error(ErrorKind::IoError, "write failed on '" + path + "'");
}

/// Writes the w-SRA curves and the (r', phi') inhomogeneity scatter.
inline void emit_plots(const AnalysisArtifacts& a, const std::string& dir) {
  auto points = [](const std::vector<CdfPoint>& pts) {
    std::vector<std::pair<double, double>> rows;
    rows.reserve(pts.size());
    for (const auto& p : pts) rows.emplace_back(p.x, p.z);
    return rows;
  };
  write_columns(dir + "/w12_sra.dat", points(a.w12_points), "w z");
  write_columns(dir + "/w34_sra.dat", points(a.w34_points), "w z");
  write_columns(dir + "/inhomogeneity12.dat", a.inhomogeneity12, "dr dphi");
  write_columns(dir + "/inhomogeneity34.dat", a.inhomogeneity34, "dr dphi");
}

/// Parses a config document; unknown keys are rejected, missing keys keep
/// their defaults.
inline AnalysisConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::ParseError, "config: expected an object");
  AnalysisConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "pearson_factor") {
        c.pearson_factor = value.get<double>();
      } else if (key == "bootstrap_draws") {
        c.bootstrap_draws = value.get<int>();
      } else if (key == "bootstrap_quantile") {
        c.bootstrap_quantile = value.get<double>();
      } else if (key == "nist_alpha") {
        c.nist_alpha = value.get<double>();
      } else if (key == "chunk_size") {
        c.chunk_size = value.get<std::size_t>();
      } else if (key == "consecutive_alarms") {
        c.consecutive_alarms = value.get<int>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "bit_stride") {
        c.bit_stride = value.get<std::size_t>();
      } else if (key == "w_significance_hard") {
        c.w_significance_hard = value.get<bool>();
      } else if (key == "uniformity_hard") {
        c.uniformity_hard = value.get<bool>();
      } else {
        throw Error(ErrorKind::ParseError, "config: unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

inline AnalysisConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace rcfd
