// Copyright (c) 2026 spadfab developers.
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate: one PASS/FAIL line per criterion, exit 0 iff all pass.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "spadfab/spadfab.hpp"

namespace fs = std::filesystem;
using namespace spadfab;

namespace {

// Pinned tolerances.
constexpr double kRateTol = 0.02;        // criteria 5 and 7: 2% of the model
constexpr double kSigmaGate = 3.0;       // criteria 6 and 9: 3-sigma separations
constexpr double kChi2Z99 = 2.3263478740408408;  // 99th percentile normal

int g_failures = 0;

void report(int n, const std::string& name, bool pass,
            const std::string& detail = {}) {
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << n << ": " << name;
  if (!detail.empty()) std::cout << " [" << detail << "]";
  std::cout << std::endl;
  if (!pass) ++g_failures;
}

template <typename Fn>
void guarded(int n, const std::string& name, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(n, name, false, std::string("exception: ") + e.what());
  }
}

// 99th percentile of chi-square (Wilson-Hilferty).
double chi2_99(double df) {
  const double a = 2.0 / (9.0 * df);
  const double t = 1.0 - a + kChi2Z99 * std::sqrt(a);
  return df * t * t * t;
}

std::string fmt_pct(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x * 100.0 << "%";
  return os.str();
}

// -- criterion 1 --------------------------------------------------------------

void criterion_1() {
  const double t_chip = programming_time_s(80, 100e6);
  const double t_array = programming_time_s(17408, 10e6);
  const bool pass = (t_chip == 800e-9) && (t_array == 1.7408e-3);
  report(1, "programming time closed form", pass,
         fmt_double(t_chip) + " s / " + fmt_double(t_array) + " s");
}

// -- criterion 2 --------------------------------------------------------------

void criterion_2() {
  std::uint64_t rows_checked = 0;
  std::uint64_t rows_wrong = 0;

  const auto check = [&](const CombinatorSpec& spec, auto&& expect) {
    const Lut16 lut = compile_lut(spec);
    for (unsigned row = 0; row < 16; ++row) {
      ++rows_checked;
      if (lut.eval_row(row) != expect(row)) ++rows_wrong;
    }
  };

  for (unsigned mask = 0; mask < 16; ++mask) {
    const auto active_count = [mask](unsigned row) {
      return __builtin_popcount(row & mask);
    };
    check(or_of(mask), [&](unsigned r) { return active_count(r) >= 1; });
    check(xor_of(mask), [&](unsigned r) { return active_count(r) % 2 == 1; });
    check(and_of(mask), [&](unsigned r) {
      return active_count(r) == __builtin_popcount(mask);
    });
    for (int k = 1; k <= __builtin_popcount(mask); ++k)
      check(coincidence(k, mask),
            [&](unsigned r) { return int(active_count(r)) >= k; });
  }

  check(constant_of(false), [](unsigned) { return false; });
  check(constant_of(true), [](unsigned) { return true; });
  for (int i = 0; i < 4; ++i)
    check(passthrough(i), [i](unsigned r) { return ((r >> i) & 1u) != 0; });
  for (std::uint32_t bits : {0x0000u, 0xFFFFu, 0x6996u, 0xBEEFu, 0x8001u})
    check(raw_of(std::uint16_t(bits)),
          [bits](unsigned r) { return ((bits >> r) & 1u) != 0; });

  // Neuron grid: integer weights in [-2,2]^4, thresholds in [-4,5],
  // against direct integer evaluation of sum(w_i x_i) >= theta.
  for (int w0 = -2; w0 <= 2; ++w0)
    for (int w1 = -2; w1 <= 2; ++w1)
      for (int w2 = -2; w2 <= 2; ++w2)
        for (int w3 = -2; w3 <= 2; ++w3)
          for (int th = -4; th <= 5; ++th) {
            const std::array<Rational, 4> w{Rational(w0), Rational(w1),
                                            Rational(w2), Rational(w3)};
            check(neuron(w, Rational(th)), [&](unsigned r) {
              const int sum = w0 * int(r & 1) + w1 * int((r >> 1) & 1) +
                              w2 * int((r >> 2) & 1) + w3 * int((r >> 3) & 1);
              return sum >= th;
            });
          }

  report(2, "LUT compiler exhaustive vs 16-row enumeration", rows_wrong == 0,
         std::to_string(rows_checked) + " rows, " +
             std::to_string(rows_wrong) + " mismatches");
}

// -- criterion 3 --------------------------------------------------------------

void criterion_3() {
  StreamRng rng(303, 0);
  int bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    TestChipConfig config;
    for (auto& l : config.leaf_luts)
      l = Lut16{std::uint16_t(rng.next_u64() & 0xFFFF)};
    config.root_lut = Lut16{std::uint16_t(rng.next_u64() & 0xFFFF)};

    Scene scene;
    scene.background_flux_hz = 1e7 + double(rng.next_u64() % 30000000);
    scene.duration_ps = 1'000'000;  // 1 us horizon
    SpadParams params;
    params.pde = 0.5 + 0.5 * rng.next_unit();
    params.dead_time_ps = 500 + std::int64_t(rng.next_u64() % 2500);
    params.pulse_width_ps =
        1 + std::int64_t(rng.next_u64() % std::uint64_t(params.dead_time_ps));

    std::array<EdgeStream, 16> in;
    for (int s = 0; s < 16; ++s)
      in[s] = spad_stream(scene, params, 1000 + std::uint64_t(trial), s);

    const EdgeStream fast = simulate_network(in, config);
    const EdgeStream slow = oracle_discretized(in, config, 1);
    if (fast.edges != slow.edges) ++bad;
  }
  report(3, "event engine equals 1 ps oracle", bad == 0,
         "100 random cases, " + std::to_string(bad) + " mismatches");
}

// -- criterion 4 --------------------------------------------------------------

void criterion_4() {
  const TestChipConfig config =
      compile_network(tree_network(CombinatorKind::Xor, 16));
  Scene scene;
  scene.background_flux_hz = 5e6;
  scene.duration_ps = 100'000'000;  // 100 us
  SpadParams params;
  params.dead_time_ps = 2000;
  params.pulse_width_ps = 1000;

  int bad = 0;
  std::uint64_t pulses = 0;
  for (int run = 0; run < 50; ++run) {
    std::array<EdgeStream, 16> streams;
    for (int s = 0; s < 16; ++s)
      streams[s] = spad_stream(scene, params, 400 + std::uint64_t(run), s);
    detie_streams(streams);
    std::uint64_t total = 0;
    std::int64_t horizon = 1;
    for (const auto& s : streams) {
      if (s.edges.empty()) continue;
      total += count_rising_edges(s, 0, s.edges.back().time_ps + 1);
      horizon = std::max(horizon, s.edges.back().time_ps + 1);
    }
    const EdgeStream root = simulate_network(streams, config);
    if (count_rising_edges(root, 0, horizon) != total) ++bad;
    pulses += total;
  }
  report(4, "XOR root rising edges equal total detections", bad == 0,
         std::to_string(pulses) + " pulses over 50 runs, " +
             std::to_string(bad) + " mismatches");
}

// -- criterion 5 --------------------------------------------------------------

void criterion_5() {
  SpadParams params;
  params.dead_time_ps = 50000;  // 50 ns
  params.pulse_width_ps = 25000;
  const double flux = 1e5;
  const double r = accepted_rate_hz(params, flux);
  const double r_tau = r * double(params.dead_time_ps) * 1e-12;

  const auto rows =
      xor_linearity_sweep({flux}, {4, 16}, params, 0.01, 20, 505);
  bool pass = r_tau < 0.01;
  std::string detail = "r*tau=" + fmt_double(r_tau);
  for (const auto& row : rows) {
    const double rel =
        std::abs(row.mean_count - row.expected_count) / row.expected_count;
    pass = pass && rel <= kRateTol;
    detail += ", n=" + std::to_string(row.n_spads) + " dev=" + fmt_pct(rel);
  }
  report(5, "XOR counting linearity within 2%", pass, detail);
}

// -- criterion 6 --------------------------------------------------------------

void criterion_6() {
  SpadParams low_bias;  // setting A
  low_bias.pde = 0.2;
  low_bias.dead_time_ps = 20000;
  low_bias.pulse_width_ps = 10000;
  SpadParams high_bias;  // setting B: higher pde, longer dead time
  high_bias.pde = 0.4;
  high_bias.dead_time_ps = 200000;
  high_bias.pulse_width_ps = 100000;

  const int seeds = 20;
  const auto rows = or_bias_sweep(
      {1e5, 1e8}, {{"A", low_bias}, {"B", high_bias}}, 1e-3, seeds, 606);
  // rows: [0]=(1e5,A) [1]=(1e5,B) [2]=(1e8,A) [3]=(1e8,B)
  const auto sep = [&](const SweepRow& hi, const SweepRow& lo) {
    const double se = std::sqrt(hi.std_count * hi.std_count / seeds +
                                lo.std_count * lo.std_count / seeds);
    return (hi.mean_count - lo.mean_count) / se;
  };
  const double z_low = sep(rows[1], rows[0]);   // B above A at low flux
  const double z_high = sep(rows[2], rows[3]);  // A above B at high flux
  const bool pass = z_low >= kSigmaGate && z_high >= kSigmaGate;
  report(6, "OR-tree bias crossing at 3 sigma", pass,
         "low flux B-A: " + fmt_double(z_low) + " sigma, high flux A-B: " +
             fmt_double(z_high) + " sigma");
}

// -- criterion 7 --------------------------------------------------------------

void criterion_7() {
  bool pass = true;
  std::string detail;
  const std::int64_t tau_ps = 100000;  // 100 ns
  for (const double r : {1e6, 1e7, 1e8}) {
    Scene scene;
    scene.background_flux_hz = r;
    scene.duration_ps = 10'000'000'000;  // 10 ms
    SpadParams params;
    params.dead_time_ps = tau_ps;
    params.pulse_width_ps = 50000;

    const EdgeStream out = spad_stream(scene, params, 707, 0);
    const double measured =
        double(count_rising_edges(out, 0, scene.duration_ps)) /
        (double(scene.duration_ps) * 1e-12);
    const double model = r / (1.0 + r * double(tau_ps) * 1e-12);
    const double rel = std::abs(measured - model) / model;
    pass = pass && rel <= kRateTol;
    if (!detail.empty()) detail += ", ";
    detail += "r*tau=" + fmt_double(r * double(tau_ps) * 1e-12) +
              " dev=" + fmt_pct(rel);
  }
  report(7, "dead-time throughput r/(1+r*tau) within 2%", pass, detail);
}

// -- criterion 8 --------------------------------------------------------------

void criterion_8() {
  // (a) Noiseless fixed-ToF scene: every count in the one correct bin.
  TdcParams tdc;
  tdc.window_len_ps = tdc.full_range_ps();  // 1.6384 us, 16384 codes

  LaserSpec laser;
  laser.rep_rate_hz = 5e5;  // 2 us period
  laser.tof_ps = 5437;
  laser.jitter_sigma_ps = 0.0;
  laser.signal_photons_per_pulse_mean = 20.0;

  Scene scene;
  scene.laser = laser;
  const std::uint64_t frames = 1000;
  scene.duration_ps = laser_emission_ps(frames, laser.rep_rate_hz);

  const EdgeStream stream = spad_stream(scene, SpadParams{}, 808, 0);
  const TofHistogram hist = acquire_tof(stream, laser, tdc, frames);
  const bool fixed_ok = hist.total() == frames && hist.bins[54] == frames &&
                        hist.peak_code() == 54;

  // (b) Uniform delays through the ideal quantizer: 1e6 conversions,
  // chi-square over all 16384 codes at the 1% level; max code saturation.
  StreamRng rng(809, 0);
  std::vector<std::uint32_t> counts(tdc.code_count(), 0);
  const std::uint64_t n = 1'000'000;
  const std::uint64_t range = std::uint64_t(tdc.full_range_ps());
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::int64_t d = std::int64_t(rng.next_u64() % range);
    const auto code = tdc_convert(d, 0, tdc);
    ++counts[code->index(tdc)];
  }
  const double expected = double(n) / double(tdc.code_count());
  double chi2 = 0.0;
  for (const std::uint32_t c : counts) {
    const double diff = double(c) - expected;
    chi2 += diff * diff / expected;
  }
  const double limit = chi2_99(double(tdc.code_count() - 1));
  const bool max_code_ok =
      tdc_convert(range - 1, 0, tdc)->index(tdc) == 16383u &&
      tdc_convert(0, 0, tdc)->index(tdc) == 0u;
  const bool pass = fixed_ok && chi2 < limit && max_code_ok;
  report(8, "TDC single-bin exactness and uniformity chi-square", pass,
         "peak bin " + std::to_string(hist.bins[54]) + "/" +
             std::to_string(frames) + ", chi2=" + fmt_double(chi2) + " < " +
             fmt_double(limit));
}

// -- criterion 9 --------------------------------------------------------------

void criterion_9() {
  Scene scene;
  scene.background_flux_hz = 5e6;  // per SPAD
  LaserSpec laser;
  laser.rep_rate_hz = 1e6;
  laser.tof_ps = 200000;
  laser.jitter_sigma_ps = 100.0;
  laser.signal_photons_per_pulse_mean = 3.0;
  scene.laser = laser;
  const std::uint64_t frames = 10000;
  scene.duration_ps = laser_emission_ps(frames, laser.rep_rate_hz);

  SpadParams params;
  params.dead_time_ps = 10000;
  params.pulse_width_ps = 5000;

  TdcParams tdc;
  tdc.gro_period_ps = 400;  // 25 ps LSB
  tdc.window_len_ps = tdc.full_range_ps();  // 409.6 ns

  const auto res = tof_compare(
      scene, params,
      {{"or", compile_lut(or_of())},
       {"c2", compile_lut(coincidence(2))},
       {"c3", compile_lut(coincidence(3))}},
      tdc, frames, laser.tof_ps - 500, laser.tof_ps + 500, 909);

  const auto separated = [&](const TofResult& hi, const TofResult& lo) {
    if (hi.sbr == kSbrInfinite) return lo.sbr < kSbrInfinite;
    return hi.sbr - lo.sbr >=
           kSigmaGate * std::sqrt(hi.sbr_sigma * hi.sbr_sigma +
                                  lo.sbr_sigma * lo.sbr_sigma);
  };
  const bool pass = separated(res[1], res[0]) && separated(res[2], res[1]);
  const auto show = [](const TofResult& r) {
    return r.name + "=" +
           (r.sbr == kSbrInfinite ? std::string("inf") : fmt_double(r.sbr));
  };
  report(9, "coincidence SBR ordering at 3 sigma", pass,
         show(res[0]) + ", " + show(res[1]) + ", " + show(res[2]));
}

// -- criterion 10 -------------------------------------------------------------

void criterion_10() {
  bool ordering_ok = true;
  try {
    PowerParams p{0.0, 2e-6, 1e-6, 5e-6};  // pc below off
    p.validate();
    ordering_ok = false;
  } catch (const ConfigError&) {
  }
  try {
    PowerParams p{0.0, 1e-6, 5e-6, 4e-6};  // tof below pc
    p.validate();
    ordering_ok = false;
  } catch (const ConfigError&) {
  }

  const PowerParams params{1.5e-3, 1e-6, 2.5e-6, 11e-6};
  StreamRng rng(1010, 0);
  bool linear_ok = true;
  bool monotone_ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    ModeMap map;
    for (auto& m : map.modes) m = OpMode(rng.next_u64() % 3);
    const double direct = estimate_power_w(map, params);
    const double decomposed =
        params.static_w + double(map.count(OpMode::Off)) * params.p_off_w +
        double(map.count(OpMode::PhotonCounting)) * params.p_pc_w +
        double(map.count(OpMode::ToF)) * params.p_tof_w;
    if (std::abs(direct - decomposed) > 1e-9 * decomposed) linear_ok = false;

    const int x = int(rng.next_u64() % 32), y = int(rng.next_u64() % 32);
    ModeMap upgraded = map;
    OpMode& m = upgraded.at(x, y);
    m = (m == OpMode::Off) ? OpMode::PhotonCounting : OpMode::ToF;
    if (estimate_power_w(upgraded, params) < direct) monotone_ok = false;
  }
  report(10, "power ordering enforced; linear and monotone",
         ordering_ok && linear_ok && monotone_ok,
         std::string("ordering ") + (ordering_ok ? "ok" : "BAD") +
             ", 1000 maps linear " + (linear_ok ? "ok" : "BAD") +
             ", monotone " + (monotone_ok ? "ok" : "BAD"));
}

// -- criterion 11 -------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

bool dirs_identical(const fs::path& a, const fs::path& b,
                    std::string& detail) {
  std::map<std::string, std::string> fa, fb;
  for (const auto& e : fs::directory_iterator(a))
    fa[e.path().filename().string()] = slurp(e.path());
  for (const auto& e : fs::directory_iterator(b))
    fb[e.path().filename().string()] = slurp(e.path());
  if (fa.size() != fb.size() || fa.empty()) {
    detail = "file sets differ (" + std::to_string(fa.size()) + " vs " +
             std::to_string(fb.size()) + ")";
    return false;
  }
  for (const auto& [name, text] : fa) {
    if (fb.count(name) == 0 || fb[name] != text) {
      detail = "mismatch in " + name;
      return false;
    }
  }
  detail = std::to_string(fa.size()) + " files identical";
  return true;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SPADFAB_BIN_PATH) + " " + args +
                          " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return status < 0 ? status : WEXITSTATUS(status);
}

void criterion_11() {
  // Library level: identical CSV text on rerun, and across thread counts.
  SpadParams params;
  params.dead_time_ps = 50000;
  params.pulse_width_ps = 25000;
  const auto rows_a = xor_linearity_sweep({1e5}, {4}, params, 1e-3, 5, 11);
  const auto rows_b = xor_linearity_sweep({1e5}, {4}, params, 1e-3, 5, 11);
  std::ostringstream csv_a, csv_b;
  write_sweep_csv(csv_a, "xor-linearity", rows_a, desk_profile(), 11, false);
  write_sweep_csv(csv_b, "xor-linearity", rows_b, desk_profile(), 11, false);
  const bool lib_ok = !csv_a.str().empty() && csv_a.str() == csv_b.str();

  // CLI level: same seed, different thread counts, byte-identical trees.
  const fs::path out_a = "acceptance_out_a";
  const fs::path out_b = "acceptance_out_b";
  fs::remove_all(out_a);
  fs::remove_all(out_b);
  const std::string cfg =
      (fs::path(SPADFAB_CONFIGS_DIR) / "array_demo.cfg").string();
  const int rc_a = run_cli("--seed 5 --threads 1 --no-timestamp --out " +
                           out_a.string() + " array " + cfg);
  const int rc_b = run_cli("--seed 5 --threads 4 --no-timestamp --out " +
                           out_b.string() + " array " + cfg);
  std::string detail;
  bool cli_ok = rc_a == 0 && rc_b == 0 && dirs_identical(out_a, out_b, detail);
  if (rc_a != 0 || rc_b != 0)
    detail = "cli exit codes " + std::to_string(rc_a) + "/" +
             std::to_string(rc_b);

  // And the compiler path, rerun against itself.
  const fs::path out_c = "acceptance_out_c";
  const fs::path out_d = "acceptance_out_d";
  fs::remove_all(out_c);
  fs::remove_all(out_d);
  const std::string lutspec =
      (fs::path(SPADFAB_CONFIGS_DIR) / "mixed_demo.lut").string();
  std::string detail2;
  const bool compile_ok =
      run_cli("--no-timestamp --out " + out_c.string() + " compile " +
              lutspec) == 0 &&
      run_cli("--no-timestamp --out " + out_d.string() + " compile " +
              lutspec) == 0 &&
      dirs_identical(out_c, out_d, detail2);

  report(11, "byte-identical reruns, sequential vs parallel",
         lib_ok && cli_ok && compile_ok,
         "library " + std::string(lib_ok ? "ok" : "BAD") + "; array " +
             detail + "; compile " + detail2);
}

}  // namespace

int main() {
  guarded(1, "programming time closed form", criterion_1);
  guarded(2, "LUT compiler exhaustive vs 16-row enumeration", criterion_2);
  guarded(3, "event engine equals 1 ps oracle", criterion_3);
  guarded(4, "XOR root rising edges equal total detections", criterion_4);
  guarded(5, "XOR counting linearity within 2%", criterion_5);
  guarded(6, "OR-tree bias crossing at 3 sigma", criterion_6);
  guarded(7, "dead-time throughput r/(1+r*tau) within 2%", criterion_7);
  guarded(8, "TDC single-bin exactness and uniformity chi-square",
          criterion_8);
  guarded(9, "coincidence SBR ordering at 3 sigma", criterion_9);
  guarded(10, "power ordering enforced; linear and monotone", criterion_10);
  guarded(11, "byte-identical reruns, sequential vs parallel", criterion_11);

  if (g_failures) {
    std::cout << g_failures << " criteria failed" << std::endl;
    return 1;
  }
  std::cout << "all 11 criteria passed" << std::endl;
  return 0;
}
