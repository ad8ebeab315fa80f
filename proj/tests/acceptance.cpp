// Acceptance run: one PASS/FAIL line per criterion, informational lines
// indented underneath. Exit status is nonzero if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rcfd/rcfd.hpp"

using namespace rcfd;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Check {
  bool ok = true;
  std::vector<std::string> notes;

  void require(bool cond, const std::string& what) {
    if (!cond) ok = false;
    notes.push_back(std::string(cond ? "ok   " : "MISS ") + what);
  }
  void info(const std::string& what) { notes.push_back("info " + what); }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int failures = 0;

void report(int id, const std::string& title, const Check& c) {
  std::printf("criterion %d %s: %s\n", id, c.ok ? "PASS" : "FAIL", title.c_str());
  for (const auto& n : c.notes) std::printf("    %s\n", n.c_str());
  std::fflush(stdout);
  failures += !c.ok;
}

// Runs one criterion; an escaped exception is a failure, not a crash.
void run(int id, const std::string& title, const std::function<void(Check&)>& body) {
  Check c;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.require(false, std::string("exception: ") + e.what());
  }
  report(id, title, c);
}

// ---------------------------------------------------------------- 1
void sra_invariance(Check& c) {
  const auto t0 = Clock::now();
  std::mt19937_64 g(20240601);
  std::uniform_int_distribution<std::size_t> len(2, 10000);
  std::normal_distribution<double> nd(0.0, 3.0);
  const std::array<std::function<double(double)>, 3> gs{
      [](double x) { return x; }, [](double x) { return x * x; }, [](double x) { return std::exp(-x * x); }};
  int bad_perm = 0, bad_sum = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> v(len(g));
    for (auto& x : v) x = trial % 5 == 0 ? std::round(nd(g)) : nd(g);  // some with ties
    const Series s(v);
    for (auto dir : {Direction::Ascending, Direction::Descending}) {
      const auto r = rank(s, dir);
      std::vector<double> a(r.values().begin(), r.values().end()), b = v;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      bad_perm += a != b;
      for (const auto& fn : gs) {
        double mag = 0;
        for (double x : v) mag += std::abs(fn(x));
        bad_sum += std::abs(sum_function(r, fn) - sum_function(s, fn)) > 1e-13 * std::max(mag, 1.0);
      }
    }
  }
  const double secs = seconds_since(t0);
  c.require(bad_perm == 0, "multiset mismatches: " + std::to_string(bad_perm) + " of 2000 rankings");
  c.require(bad_sum == 0, "sum-function mismatches: " + std::to_string(bad_sum) + " of 6000");
  c.require(secs < 30.0, "runtime " + fmt("%.2f s", secs) + " < 30 s");
}

// ---------------------------------------------------------------- 2
void cdf_consistency(Check& c) {
  std::mt19937_64 g(77);
  std::uniform_int_distribution<std::size_t> len(2, 5000);
  std::normal_distribution<double> nd;
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t N = len(g);
    std::vector<double> v(N);
    for (auto& x : v) x = nd(g);
    const Series s(v);
    const auto desc = rank(s, Direction::Descending);
    const auto asc = cdf_points(rank(s, Direction::Ascending));
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t n = 1; n <= N; ++n) {
      const double x = desc[n - 1];
      // Fraction of the sample at or below x, counted directly.
      const double direct =
          static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin()) / N;
      const double z = asc[N - n].z;
      worst = std::max({worst, std::abs(empirical_cdf(desc, n) - z) * N, std::abs(empirical_cdf(desc, n) - direct) * N});
    }
  }
  c.require(worst <= 1.0 + 1e-9, "max |F_desc - z_asc|, |F_desc - direct| in units of 1/N: " + fmt("%.3g", worst));
}

// ---------------------------------------------------------------- 3
std::vector<CdfPoint> model_points(double w0, double dw, std::size_t n) {
  std::vector<CdfPoint> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = static_cast<double>(i + 1) / static_cast<double>(n + 1);
    pts[i] = {w0 + dw * special::erf_inv(2.0 * z - 1.0), z};
  }
  return pts;
}

void erf_recovery(Check& c) {
  std::mt19937_64 g(314);
  std::uniform_real_distribution<double> uw(0.1, 0.9), ud(0.01, 1.0);
  std::normal_distribution<double> noise(0.0, 0.001);
  double worst_clean = 0, worst_noisy = 0;
  int unconverged = 0;
  for (int i = 0; i < 50; ++i) {
    const double w0 = uw(g), dw = ud(g);
    auto pts = model_points(w0, dw, 1000);
    const auto f = fit_erf(pts);
    unconverged += !f.converged;
    worst_clean = std::max({worst_clean, std::abs(f.model.w0 - w0), std::abs(f.model.dw - dw)});
    for (auto& p : pts) p.x += noise(g);  // noisy samples on the fixed z grid
    const auto fn = fit_erf(pts);
    unconverged += !fn.converged;
    worst_noisy = std::max({worst_noisy, std::abs(fn.model.w0 - w0), std::abs(fn.model.dw - dw)});
  }
  c.require(unconverged == 0, "unconverged fits: " + std::to_string(unconverged));
  c.require(worst_clean <= 1e-6, "noiseless max parameter error " + fmt("%.3g", worst_clean) + " <= 1e-6");
  c.require(worst_noisy <= 1e-3, "sigma=0.001 max parameter error " + fmt("%.3g", worst_noisy) + " <= 1e-3");

  // Analytic Jacobian against central differences.
  std::uniform_real_distribution<double> ux(-1.5, 1.5);
  const double h = 1e-6;
  double worst_rel = 0;
  for (int i = 0; i < 200; ++i) {
    const ErfModel m{uw(g), ud(g)};
    const double w = m.w0 + ux(g) * m.dw;
    std::array<double, 2> grad{};
    erf_model_gradient(m, w, grad);
    const double n0 = (ErfModel{m.w0 + h, m.dw}(w) - ErfModel{m.w0 - h, m.dw}(w)) / (2 * h);
    const double n1 = (ErfModel{m.w0, m.dw + h}(w) - ErfModel{m.w0, m.dw - h}(w)) / (2 * h);
    worst_rel = std::max({worst_rel, std::abs(grad[0] - n0) / std::max(std::abs(n0), 1e-3),
                          std::abs(grad[1] - n1) / std::max(std::abs(n1), 1e-3)});
  }
  c.require(worst_rel <= 1e-5, "Jacobian max relative error " + fmt("%.3g", worst_rel) + " <= 1e-5");
}

// ---------------------------------------------------------------- 4
void topology_sensitivity(Check& c) {
  const auto t0 = Clock::now();
  constexpr std::size_t n = 2000000;
  const auto g = pair_criteria(split_quad(synth::gaussian(n, 42)));
  const auto a = pair_criteria(split_quad(synth::ar1(n, 0.1, 42)));
  const auto d = pair_criteria(split_quad(synth::duplicate_halves(n, 0.0, 42)));
  const double secs = seconds_since(t0);
  c.require(g.r2_12 < 5e-5 && g.r2_34 < 5e-5,
            "gaussian R2_12 = " + fmt("%.3g", g.r2_12) + ", R2_34 = " + fmt("%.3g", g.r2_34) + " < 5e-5");
  c.require(a.r2_34 >= 0.005 && a.r2_34 <= 0.02, "ar1(0.1) R2_34 = " + fmt("%.4g", a.r2_34) + " in [0.005, 0.02]");
  c.require(a.r2_12 < 5e-5, "ar1(0.1) R2_12 = " + fmt("%.3g", a.r2_12) + " < 5e-5");
  c.require(d.r2_12 == 1.0, "duplicate_halves R2_12 = " + fmt("%.17g", d.r2_12) + " == 1");
  c.require(d.r2_34 < 5e-5, "duplicate_halves R2_34 = " + fmt("%.3g", d.r2_34) + " < 5e-5");
  c.require(secs < 60.0, "runtime " + fmt("%.2f s", secs) + " < 60 s");
}

// ---------------------------------------------------------------- 5
void angle_null(Check& c) {
  const auto q = split_quad(synth::gaussian(2000000, 42));
  const auto x = center(q.s1), y = center(q.s2);
  const auto d = decompose(x, y);
  const auto t = split(d);
  const double u = angle_uniformity(d.phi);
  c.require(u < 2e-3, "angle uniformity deviation " + fmt("%.3g", u) + " < 2e-3");
  const auto radius = radius_fit(d);
  c.require(radius.converged && radius.r2 >= 0.999, "radius erf fit r2 = " + fmt("%.6f", radius.r2) + " >= 0.999");
  const auto inh = inhomogeneity_fits(t);
  c.require(inh.dphi.converged && inh.dphi.r2 >= 0.999, "dphi erf fit r2 = " + fmt("%.6f", inh.dphi.r2) + " >= 0.999");
  c.require(inh.dr.converged && inh.dr.r2 >= 0.999, "dr erf fit r2 = " + fmt("%.6f", inh.dr.r2) + " >= 0.999");
  const auto bits = extract_bits(t);
  std::size_t ones = 0;
  for (auto b : bits.bits) ones += b;
  const double frac = static_cast<double>(ones) / static_cast<double>(bits.size());
  c.require(std::abs(frac - 0.5) <= 0.002, "ones fraction " + fmt("%.5f", frac) + " in 0.5 +- 0.002");
  c.require(t.zero_fraction == 0.0, "unquantized zero fraction " + fmt("%.3g", t.zero_fraction) + " == 0");
  auto quantized_zf = [&](int b) {
    return split(decompose(center(synth::quantize(q.s1, b)), center(synth::quantize(q.s2, b)))).zero_fraction;
  };
  const double zf12 = quantized_zf(12);
  c.require(zf12 >= 5e-5 && zf12 <= 5e-3, "12-bit zero fraction " + fmt("%.3g", zf12) + " in [5e-5, 5e-3]");
  c.info("8-bit zero fraction " + fmt("%.3g", quantized_zf(8)) + ", 10-bit " + fmt("%.3g", quantized_zf(10)));
}

// ---------------------------------------------------------------- 6
std::vector<std::uint8_t> from_string(const std::string& s) {
  std::vector<std::uint8_t> b;
  for (char ch : s) b.push_back(ch == '1');
  return b;
}

void nist_battery(Check& c) {
  const auto t0 = Clock::now();
  const auto f = nist::frequency(from_string("1011010101"), nist::Length::Relaxed);
  const auto r = nist::runs(from_string("1001101011"), nist::Length::Relaxed);
  c.require(std::abs(f.p_value - 0.527089) <= 1e-6, "frequency worked example p = " + fmt("%.7f", f.p_value));
  c.require(std::abs(r.p_value - 0.147232) <= 1e-6, "runs worked example p = " + fmt("%.7f", r.p_value));

  for (std::uint8_t v : {0, 1}) {
    const auto rep = nist::run_battery(std::vector<std::uint8_t>(1000000, v));
    std::vector<std::string> passed;
    for (const auto& t : rep.results) {
      if (t.passed) passed.push_back(t.name);
    }
    const char* designated[] = {nist::names::frequency, nist::names::runs, nist::names::rank,
                                nist::names::universal, nist::names::cusum_forward, nist::names::cusum_backward};
    bool all_fail = true;
    for (const char* name : designated) {
      all_fail = all_fail && std::find(passed.begin(), passed.end(), name) == passed.end();
    }
    std::string list;
    for (const auto& p : passed) list += (list.empty() ? "" : ", ") + p;
    c.require(all_fail && !rep.all_passed, std::string(v ? "all-ones" : "all-zeros") +
                                               " 1e6 fails frequency/runs/rank/universal/cusum (still passing: " +
                                               (list.empty() ? "none" : list) + ")");
  }

  // Null uniformity: 1000 independent 1e5-bit streams.
  std::vector<std::string> names;
  std::vector<int> pass_count, executed;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const synth::CounterRng rng(synth::derive_seed(0x5eed, s));
    std::vector<std::uint8_t> bits(100000);
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = static_cast<std::uint8_t>(rng.at(i) >> 63);
    const auto rep = nist::run_battery(bits);
    for (const auto& t : rep.results) {
      auto it = std::find(names.begin(), names.end(), t.name);
      if (it == names.end()) {
        names.push_back(t.name);
        pass_count.push_back(0);
        executed.push_back(0);
        it = names.end() - 1;
      }
      const auto k = static_cast<std::size_t>(it - names.begin());
      pass_count[k] += t.passed;
      executed[k] += 1;
    }
  }
  bool uniform_ok = !names.empty();
  std::string detail;
  for (std::size_t k = 0; k < names.size(); ++k) {
    const double frac = static_cast<double>(pass_count[k]) / executed[k];
    uniform_ok = uniform_ok && frac >= 0.97 && frac <= 1.0;
    detail += names[k] + "=" + fmt("%.3f", frac) + (k + 1 < names.size() ? " " : "");
  }
  c.require(uniform_ok, "null pass fractions in [0.97, 1]: " + detail);

  // End to end: bits extracted from seeded Gaussian pairs of 1e6 samples.
  for (std::uint64_t seed : {42, 7, 1234}) {
    const auto q = split_quad(synth::gaussian(2000000, seed));
    const std::pair<const Series*, const Series*> pairs[] = {{&q.s1, &q.s2}, {&q.s3, &q.s4}};
    for (int p = 0; p < 2; ++p) {
      const auto t = split(decompose(center(*pairs[p].first), center(*pairs[p].second)));
      const auto label = "seed " + std::to_string(seed) + (p == 0 ? " pair 1&2" : " pair 3&4");
      auto summarize = [](const nist::BatteryReport& rep) {
        std::string out;
        for (const auto& r : rep.results) {
          if (!r.passed) out += " " + r.name + "(p=" + fmt("%.2g", r.p_value) + ")";
        }
        return out.empty() ? std::string(" all executed tests pass") : " failing:" + out;
      };
      const auto faithful = nist::run_battery(extract_bits(t).bits);
      c.require(faithful.all_passed && !faithful.results.empty(), label + " adjacent-difference bits:" + summarize(faithful));
      c.info(label + " stride-2 bits:" + summarize(nist::run_battery(extract_bits_strided(t, 2).bits)));
    }
  }
  const double secs = seconds_since(t0);
  c.require(secs < 600.0, "runtime " + fmt("%.1f s", secs) + " < 600 s");
}

// ---------------------------------------------------------------- 7
int shell(const std::string& cmd) {
  const int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_series(const std::filesystem::path& p, const std::vector<double>& v) {
  io::write_file(p.string(), io::encode_f64le(v));
}

void determinism_and_contract(Check& c) {
  const auto dir = std::filesystem::temp_directory_path() / "rcfd_acceptance";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const std::string cli = RCFD_CLI_PATH;
  const auto f = [&](const char* name) { return "'" + (dir / name).string() + "'"; };

  // Byte-identical reports, in process and through the tool.
  AnalysisConfig cfg;
  const auto series = synth::gaussian(200000, 42);
  const auto a = report_to_string(analyze(series, cfg, "x"));
  const auto b = report_to_string(analyze(series, cfg, "x"));
  c.require(a == b, "in-process analyze twice: byte-identical (" + std::to_string(a.size()) + " bytes)");
  shell(cli + " synth gaussian --n 200000 --seed 42 --out " + f("g.f64"));
  shell(cli + " analyze " + f("g.f64") + " --json " + f("r1.json"));
  shell(cli + " analyze " + f("g.f64") + " --json " + f("r2.json"));
  const auto r1 = slurp(dir / "r1.json"), r2 = slurp(dir / "r2.json");
  c.require(!r1.empty() && r1 == r2, "CLI analyze twice: byte-identical JSON");

  // Exit codes: 0 pass, 1 fail/warn, 2 usage or IO.
  const std::pair<std::string, int> cases[] = {
      {cli + " synth ar1 --n 40000 --seed 42 --rho 0.3 --out " + f("ar.f64"), 0},
      {cli + " analyze " + f("ar.f64"), 1},
      {cli + " fit " + f("g.f64"), 0},
      {cli + " analyze " + f("missing.f64"), 2},
      {cli + " analyze", 2},
      {cli + " frobnicate", 2},
      {cli + " analyze " + f("g.f64") + " --format wav", 2},
      {cli + " monitor " + f("ar.f64") + " --chunk-size 8000", 1},
  };
  for (const auto& [cmd, want] : cases) {
    const int got = shell(cmd);
    c.require(got == want, "exit " + std::to_string(got) + " (want " + std::to_string(want) + "): " +
                               cmd.substr(cli.size() + 1));
  }
  {
    std::vector<std::uint8_t> zeros(100000, 0);
    io::write_file((dir / "zeros.bits").string(), io::encode_bits(zeros));
    const int got = shell(cli + " nist " + f("zeros.bits"));
    c.require(got == 1, "exit " + std::to_string(got) + " (want 1): nist on all-zeros bit file");
  }

  // Monitor alarms at the constructed index: six clean chunks, then the
  // defect; three consecutive failures put the alarm on chunk 8.
  constexpr std::size_t chunk = 40000;
  AnalysisConfig mc;
  mc.chunk_size = chunk;
  const std::pair<std::string, std::function<Series(std::uint64_t)>> switches[] = {
      {"ar1(0.1)", [](std::uint64_t s) { return synth::ar1(chunk, 0.1, s); }},
      {"duplicate_halves", [](std::uint64_t s) { return synth::duplicate_halves(chunk, 0.0, s); }},
  };
  for (const auto& [name, make] : switches) {
    std::vector<double> stream;
    for (std::uint64_t k = 0; k < 10; ++k) {
      const auto part = k < 6 ? synth::gaussian(chunk, 1000 + k) : make(2000 + k);
      stream.insert(stream.end(), part.begin(), part.end());
    }
    const auto out = monitor(stream, mc);
    std::string idx;
    for (const auto& al : out.alarms) idx += (idx.empty() ? "" : ",") + std::to_string(al.chunk_index);
    c.require(out.alarms.size() == 1 && out.alarms[0].chunk_index == 8,
              "monitor " + name + " switch at chunk 6: alarms at [" + idx + "], want [8]");
    write_series(dir / "switch.f64", stream);
    const int got = shell(cli + " monitor " + f("switch.f64") + " --chunk-size " + std::to_string(chunk));
    c.require(got == 1, "CLI monitor on the " + name + " switch exits " + std::to_string(got) + " (want 1)");
  }
  std::filesystem::remove_all(dir);
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  run(1, "SRA invariance suite", sra_invariance);
  run(2, "empirical CDF consistency", cdf_consistency);
  run(3, "erf-fit recovery", erf_recovery);
  run(4, "topology detector sensitivity", topology_sensitivity);
  run(5, "angle pipeline null behavior", angle_null);
  run(6, "NIST battery", nist_battery);
  run(7, "pipeline determinism and CI contract", determinism_and_contract);
  std::printf("%d of 7 criteria failed (%.1f s)\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
