// rcfd: command-line front end for the analysis pipeline.
//
// Exit codes: 0 pass, 1 fail or warn, 2 usage / input / IO error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rcfd/rcfd.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitError = 2;

int verdict_exit(rcfd::Verdict v) { return v == rcfd::Verdict::Pass ? kExitPass : kExitFail; }

struct AnalyzeArgs {
  std::string file;
  std::string format = "f64le";
  std::string config;
  std::string plots;
  std::string json_out;
};

struct MonitorArgs {
  std::string file;
  std::string format = "f64le";
  std::string config;
  std::size_t chunk_size = 0;
};

struct SynthArgs {
  std::string kind;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double rho = 0.0;
  double jitter = 0.0;
  double amplitude = 0.0;
  double period = 1000.0;
  int quantize_bits = 0;
  std::string out;
};

struct NistArgs {
  std::string file;
  double alpha = rcfd::nist::kDefaultAlpha;
  std::size_t block_len = 128;
  bool ascii = false;
};

struct FitArgs {
  std::string file;
  std::string format = "f64le";
  bool extended = false;
};

rcfd::AnalysisConfig config_from(const std::string& path) {
  return path.empty() ? rcfd::AnalysisConfig{} : rcfd::load_config(path);
}

int run_analyze(const AnalyzeArgs& a) {
  const auto config = config_from(a.config);
  const auto series = rcfd::io::ingest(a.file, rcfd::io::format_from_string(a.format));
  rcfd::AnalysisArtifacts artifacts;
  const auto descriptor = std::filesystem::path(a.file).filename().string() + " (" + a.format + ")";
  const auto report = rcfd::analyze(series, config, descriptor, a.plots.empty() ? nullptr : &artifacts);
  if (!a.plots.empty()) {
    std::filesystem::create_directories(a.plots);
    rcfd::emit_plots(artifacts, a.plots);
  }
  if (a.json_out.empty()) {
    std::cout << rcfd::report_to_string(report);
  } else {
    rcfd::emit_report(report, a.json_out);
    std::cout << "verdict: " << rcfd::to_string(report.verdict);
    for (const auto& f : report.failures) std::cout << ' ' << f;
    std::cout << '\n';
  }
  return verdict_exit(report.verdict);
}

int run_monitor(const MonitorArgs& a) {
  auto config = config_from(a.config);
  if (a.chunk_size) config.chunk_size = a.chunk_size;
  rcfd::Monitor monitor(config);

  std::ifstream file;
  if (a.file != "-") {
    file.open(a.file, std::ios::binary);
    if (!file) throw rcfd::Error(rcfd::ErrorKind::IoError, "cannot open '" + a.file + "'");
  }
  std::istream& in = a.file == "-" ? std::cin : file;
  rcfd::io::StreamReader reader(in, rcfd::io::format_from_string(a.format));

  std::size_t alarms = 0;
  std::size_t failing = 0;
  for (;;) {
    const auto chunk = reader.next(config.chunk_size);
    if (chunk.size() < config.chunk_size) {
      if (!chunk.empty()) std::cout << rcfd::json{{"trailing_samples", chunk.size()}}.dump() << '\n';
      break;
    }
    rcfd::ChunkRecord record;
    const auto alarm = monitor.push(chunk, &record);
    rcfd::json line{{"chunk", record.index}};
    if (record.errored) {
      line["errored"] = true;
      line["error"] = record.error;
    } else {
      line["verdict"] = rcfd::to_string(record.report->verdict);
      line["failures"] = record.report->failures;
      line["warnings"] = record.report->warnings;
      line["pair_criterion"] = record.report->pair_criterion;
      failing += record.failing();
    }
    std::cout << line.dump() << '\n';
    if (alarm) {
      ++alarms;
      std::cout << rcfd::json{{"alarm", {{"chunk", alarm->chunk_index}, {"consecutive", alarm->consecutive}}}}.dump()
                << '\n';
    }
    std::cout.flush();
  }
  return alarms == 0 && failing == 0 ? kExitPass : kExitFail;
}

int run_synth(const SynthArgs& a) {
  rcfd::synth::SourceSpec spec;
  spec.kind = rcfd::synth::kind_from_string(a.kind);
  spec.n = a.n;
  spec.seed = a.seed;
  spec.rho = a.rho;
  spec.jitter = a.jitter;
  spec.amplitude = a.amplitude;
  spec.period = a.period;
  auto s = rcfd::synth::generate(spec);
  if (a.quantize_bits) s = rcfd::synth::quantize(s, a.quantize_bits);
  rcfd::io::write_file(a.out, rcfd::io::encode_f64le(s.values()));
  return kExitPass;
}

int run_nist(const NistArgs& a) {
  const auto bytes = rcfd::io::read_file(a.file);
  const auto bits = a.ascii ? rcfd::io::decode_ascii_bits(bytes) : rcfd::io::decode_bits(bytes);
  const auto report = rcfd::nist::run_battery(bits, {a.block_len, a.alpha});
  std::cout << rcfd::json(report).dump(2) << '\n';
  return report.all_passed && !report.empty_input ? kExitPass : kExitFail;
}

int run_fit(const FitArgs& a) {
  const auto series = rcfd::io::ingest(a.file, rcfd::io::format_from_string(a.format));
  const auto points = rcfd::cdf_points(rcfd::rank(rcfd::normalize(series), rcfd::Direction::Ascending));
  rcfd::json out;
  bool converged = false;
  if (a.extended) {
    const auto f = rcfd::fit_erf_extended(points);
    out = {{"model", "A+B*erf(sgn(w-w0)|w-w0|^theta/dw)"},
           {"a", f.model.a},
           {"b", f.model.b},
           {"w0", f.model.w0},
           {"dw", f.model.dw},
           {"theta", f.model.theta},
           {"r2", f.r2},
           {"rss", f.rss},
           {"iterations", f.iterations},
           {"converged", f.converged}};
    converged = f.converged;
  } else {
    const auto f = rcfd::fit_erf(points);
    out = rcfd::json(rcfd::FitSummary::of(f));
    out["model"] = "(1+erf((w-w0)/dw))/2";
    converged = f.converged;
  }
  out["n_samples"] = series.size();
  out["n_points"] = std::min(points.size(), rcfd::FitOptions{}.max_points);
  std::cout << out.dump(2) << '\n';
  return converged ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Raw-stream quality analysis: subsample topology, w-statistics, angle split, NIST battery"};
  app.require_subcommand(1);
  const std::vector<std::string> formats{"f64le", "i16le", "csv"};

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "Run every criterion on one stream and print the report");
  analyze->add_option("file", aa.file, "Input stream")->required();
  analyze->add_option("--format", aa.format, "Sample encoding")->check(CLI::IsMember(formats));
  analyze->add_option("--config", aa.config, "JSON config file");
  analyze->add_option("--plots", aa.plots, "Directory for plot-ready .dat files");
  analyze->add_option("--json", aa.json_out, "Write the report here instead of stdout");

  MonitorArgs ma;
  auto* monitor = app.add_subcommand("monitor", "Analyze consecutive chunks; one JSON line per chunk");
  monitor->add_option("file", ma.file, "Input stream, '-' for stdin")->required();
  monitor->add_option("--chunk-size", ma.chunk_size, "Samples per chunk (even, >= 2048)")->required();
  monitor->add_option("--format", ma.format, "Sample encoding")->check(CLI::IsMember(formats));
  monitor->add_option("--config", ma.config, "JSON config file");

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic f64le stream");
  synth->add_option("kind", sa.kind, "gaussian | ar1 | duplicate_halves | sinusoid_drift")->required();
  synth->add_option("--n", sa.n, "Number of samples")->required();
  synth->add_option("--seed", sa.seed, "Seed")->required();
  synth->add_option("--rho", sa.rho, "ar1 coefficient");
  synth->add_option("--jitter", sa.jitter, "duplicate_halves jitter");
  synth->add_option("--amplitude", sa.amplitude, "sinusoid_drift amplitude");
  synth->add_option("--period", sa.period, "sinusoid_drift period");
  synth->add_option("--quantize", sa.quantize_bits, "Quantize to this many bits");
  synth->add_option("--out", sa.out, "Output file")->required();

  NistArgs na;
  auto* nist = app.add_subcommand("nist", "Run the battery on a packed bit file");
  nist->add_option("bitfile", na.file, "8-byte LE bit count, then bits MSB first")->required();
  nist->add_option("--alpha", na.alpha, "Significance level");
  nist->add_option("--block-len", na.block_len, "Block frequency block length");
  nist->add_flag("--ascii", na.ascii, "Bit file is '0'/'1' text");

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "erf fit of the normalized ascending SRA of one series");
  fit->add_option("file", fa.file, "Input stream")->required();
  fit->add_option("--format", fa.format, "Sample encoding")->check(CLI::IsMember(formats));
  fit->add_flag("--extended", fa.extended, "Fit the A + B erf(.^theta) model");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitError;
  }

  try {
    if (*analyze) return run_analyze(aa);
    if (*monitor) return run_monitor(ma);
    if (*synth) return run_synth(sa);
    if (*nist) return run_nist(na);
    if (*fit) return run_fit(fa);
  } catch (const rcfd::Error& e) {
    std::cerr << "rcfd: " << rcfd::to_string(e.kind()) << ": " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "rcfd: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
