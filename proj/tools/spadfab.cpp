// Copyright (c) 2026 spadfab developers.
// SPDX-License-Identifier: Apache-2.0
//
// spadfab: compile LUT network specs to bitstreams and run the simulator's
// counting / ToF / array scenarios, writing CSV artifacts.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spadfab/spadfab.hpp"

namespace fs = std::filesystem;
using namespace spadfab;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  bool paper_scale = false;
  double clock_hz = 10e6;
  bool no_timestamp = false;
  unsigned threads = 1;
};

Profile make_profile(const GlobalOpts& g) {
  return g.paper_scale ? paper_profile() : desk_profile();
}

std::ofstream open_out(const GlobalOpts& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  const fs::path path = fs::path(g.out_dir) / name;
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open output file " + path.string());
  return os;
}

ConfigDoc load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  return ConfigDoc::parse(is);
}

// File references inside a config resolve relative to the config itself,
// so configs work regardless of the invocation directory.
std::string resolve_near(const std::string& cfg_path,
                         const std::string& value) {
  const fs::path p(value);
  if (p.is_absolute()) return value;
  const fs::path near = fs::path(cfg_path).parent_path() / p;
  return fs::exists(near) ? near.string() : value;
}

SpadParams spad_params_from(const ConfigDoc& doc,
                            const std::string& cfg_path) {
  SpadParams p;
  if (doc.has("bias_curve")) {
    const std::string curve_path =
        resolve_near(cfg_path, doc.get_string("bias_curve"));
    std::ifstream is(curve_path);
    if (!is) throw ConfigError("cannot open bias curve file " + curve_path);
    const BiasCurve curve = BiasCurve::from_csv(is);
    p = curve.params_at(doc.get_double("v_q"), doc.get_double("v_ex"),
                        doc.get_double("dcr_hz", 0.0));
  } else {
    p.pde = doc.get_double("pde");
    p.dead_time_ps = doc.get_int("dead_time_ps");
    p.pulse_width_ps = doc.get_int("pulse_width_ps");
    p.dcr_hz = doc.get_double("dcr_hz", 0.0);
  }
  p.validate();
  return p;
}

TdcParams tdc_params_from(const ConfigDoc& doc) {
  TdcParams t;
  t.gro_period_ps = doc.get_int("gro_period_ps", t.gro_period_ps);
  t.window_len_ps = doc.get_int("window_len_ps");
  t.window_offset_ps = doc.get_int("window_offset_ps", 0);
  t.validate();
  return t;
}

LaserSpec laser_from(const ConfigDoc& doc) {
  LaserSpec l;
  l.rep_rate_hz = doc.get_double("rep_rate_hz");
  l.tof_ps = doc.get_int("tof_ps");
  l.jitter_sigma_ps = doc.get_double("jitter_sigma_ps", 0.0);
  l.signal_photons_per_pulse_mean = doc.get_double("signal_mean");
  l.validate();
  return l;
}

int cmd_compile(const GlobalOpts& g, const std::string& spec_path) {
  std::ifstream is(spec_path);
  if (!is) throw ConfigError("cannot open spec file " + spec_path);
  const NetworkSpec net = parse_network_spec(is);
  const TestChipConfig config = compile_network(net);

  std::ostringstream report;
  for (int j = 0; j < 4; ++j)
    report << "leaf" << j << " = " << to_hex(config.leaf_luts[j]) << "\n";
  report << "root = " << to_hex(config.root_lut) << "\n";
  const BitChain chain = encode_test_chip(config);
  report << "chain_bits = " << chain.size() << "\n";
  report << "programming_time_s = "
         << fmt_double(programming_time_s(chain.size(), g.clock_hz)) << "\n";

  const std::string stem = fs::path(spec_path).stem().string();
  auto bits_file = open_out(g, stem + ".bits");
  write_bitstream(bits_file, chain);
  auto report_file = open_out(g, stem + "_report.txt");
  report_file << report.str();
  std::cout << report.str();
  return 0;
}

int cmd_sweep_linearity(const GlobalOpts& g, const std::string& cfg_path) {
  const ConfigDoc doc = load_config(cfg_path);
  const Profile profile = make_profile(g);
  const std::string mode = doc.get_string("mode");
  const double integration_s =
      doc.get_double("integration_s", profile.integration_s);
  const int seeds = int(doc.get_int("seeds", profile.n_seeds));
  std::vector<double> flux = doc.get_list("flux_hz");

  std::vector<SweepRow> rows;
  std::string scenario;
  if (mode == "xor") {
    scenario = "xor-linearity";
    const SpadParams params = spad_params_from(doc, cfg_path);
    std::vector<int> n_spads;
    for (double n : doc.get_list("n_spads")) n_spads.push_back(int(n));
    doc.finish();
    rows = xor_linearity_sweep(flux, n_spads, params, integration_s, seeds,
                               g.seed);
  } else if (mode == "or-bias") {
    scenario = "or-bias";
    const std::string curve_path =
        resolve_near(cfg_path, doc.get_string("bias_curve"));
    std::ifstream is(curve_path);
    if (!is) throw ConfigError("cannot open bias curve file " + curve_path);
    const BiasCurve curve = BiasCurve::from_csv(is);
    const double v_q = doc.get_double("v_q");
    const double dcr = doc.get_double("dcr_hz", 0.0);
    std::vector<std::pair<std::string, SpadParams>> settings;
    for (double v_ex : doc.get_list("v_ex"))
      settings.emplace_back("vex=" + fmt_double(v_ex),
                            curve.params_at(v_q, v_ex, dcr));
    doc.finish();
    rows = or_bias_sweep(flux, settings, integration_s, seeds, g.seed);
  } else {
    throw ConfigError("mode must be xor or or-bias, got '" + mode + "'");
  }

  auto os = open_out(g, "linearity.csv");
  Profile used = profile;
  used.integration_s = integration_s;
  used.n_seeds = seeds;
  write_sweep_csv(os, scenario, rows, used, g.seed, !g.no_timestamp);
  std::cout << "wrote " << (fs::path(g.out_dir) / "linearity.csv").string()
            << " (" << rows.size() << " rows)\n";
  return 0;
}

int cmd_tof(const GlobalOpts& g, const std::string& cfg_path) {
  const ConfigDoc doc = load_config(cfg_path);
  const Profile profile = make_profile(g);
  const SpadParams params = spad_params_from(doc, cfg_path);
  const LaserSpec laser = laser_from(doc);
  const TdcParams tdc = tdc_params_from(doc);
  const std::uint64_t frames =
      std::uint64_t(doc.get_int("frames", std::int64_t(profile.tof_frames)));

  Scene scene;
  scene.background_flux_hz = doc.get_double("background_flux_hz", 0.0);
  scene.laser = laser;
  scene.duration_ps = laser_emission_ps(frames, laser.rep_rate_hz) +
                      tdc.window_offset_ps + tdc.window_len_ps;

  const std::int64_t lo =
      doc.get_int("signal_lo_ps", laser.tof_ps - 500);
  const std::int64_t hi =
      doc.get_int("signal_hi_ps", laser.tof_ps + 500);

  std::vector<std::pair<std::string, Lut16>> tables;
  {
    const std::string luts = doc.get_string("luts");
    std::string item;
    std::istringstream is(luts);
    while (std::getline(is, item, '|')) {
      const CombinatorSpec spec = parse_combinator_expr(item);
      std::string name = item;
      name.erase(0, name.find_first_not_of(" \t"));
      name.erase(name.find_last_not_of(" \t") + 1);
      tables.emplace_back(name, compile_lut(spec));
    }
    if (tables.empty()) throw ConfigError("luts list is empty");
  }
  doc.finish();

  const auto results =
      tof_compare(scene, params, tables, tdc, frames, lo, hi, g.seed);

  Profile used = profile;
  used.tof_frames = frames;
  used.n_seeds = 1;
  auto os = open_out(g, "tof_summary.csv");
  write_tof_summary_csv(os, results, used, g.seed, !g.no_timestamp);
  for (std::size_t i = 0; i < results.size(); ++i) {
    auto hs = open_out(g, "hist_" + std::to_string(i) + ".csv");
    write_histogram_csv(hs, results[i].hist, tdc);
  }
  for (const auto& r : results) {
    std::cout << r.name << ": sbr=";
    if (r.sbr == kSbrInfinite) std::cout << "inf";
    else std::cout << fmt_double(r.sbr);
    std::cout << " sigma=" << fmt_double(r.sbr_sigma) << "\n";
  }
  return 0;
}

PowerParams power_params_from(const ConfigDoc& doc) {
  PowerParams p;
  p.static_w = doc.get_double("static_w", 0.0);
  p.p_off_w = doc.get_double("p_off_w", 0.0);
  p.p_pc_w = doc.get_double("p_pc_w");
  p.p_tof_w = doc.get_double("p_tof_w");
  p.validate();
  return p;
}

ModeMap mode_map_from(const ConfigDoc& doc, const std::string& cfg_path) {
  const std::string path =
      resolve_near(cfg_path, doc.get_string("mode_map"));
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open mode map file " + path);
  return read_mode_map(is);
}

int cmd_array(const GlobalOpts& g, const std::string& cfg_path) {
  const ConfigDoc doc = load_config(cfg_path);
  const Profile profile = make_profile(g);
  const ModeMap map = mode_map_from(doc, cfg_path);
  const SpadParams params = spad_params_from(doc, cfg_path);
  const PowerParams power = power_params_from(doc);

  const Lut16 lut = compile_lut(parse_combinator_expr(
      doc.get_string("lut", "or(0,1,2,3)")));
  ArrayConfig config;
  for (std::size_t i = 0; i < kMacropixelCount; ++i) {
    const int x = int(i % kArrayDim);
    const int y = int(i / kArrayDim);
    const OpMode m = map.at(x, y);
    config.macropixels[i] =
        m == OpMode::Off
            ? MacropixelConfig{Lut16{0}, PixelMode::PhotonCounting}
            : MacropixelConfig{lut, m == OpMode::ToF
                                        ? PixelMode::ToF
                                        : PixelMode::PhotonCounting};
  }

  Scene scene;
  scene.background_flux_hz = doc.get_double("background_flux_hz", 0.0);
  scene.duration_ps = std::llround(doc.get_double("duration_s") * 1e12);

  FrameParams frame;
  TdcParams tdc;
  const bool has_tof = map.count(OpMode::ToF) > 0;
  if (has_tof) {
    scene.laser = laser_from(doc);
    tdc = tdc_params_from(doc);
    frame.tof_frames = std::uint64_t(
        doc.get_int("frames", std::int64_t(profile.tof_frames)));
    const std::int64_t needed =
        laser_emission_ps(frame.tof_frames, scene.laser->rep_rate_hz) +
        tdc.window_offset_ps + tdc.window_len_ps;
    if (scene.duration_ps < needed)
      throw ConfigError("duration_s too short for " +
                        std::to_string(frame.tof_frames) +
                        " ToF frames; need >= " +
                        fmt_double(double(needed) * 1e-12) + " s");
  }
  doc.finish();

  const ArrayScene ascene{scene, {}};
  const FrameOutput out = run_array_frame(ascene, params, config, map, tdc,
                                          g.seed, frame, g.threads);

  auto counts = open_out(g, "counts.csv");
  write_counts_csv(counts, out, map);
  for (int y = 0; y < kArrayDim; ++y)
    for (int x = 0; x < kArrayDim; ++x)
      if (map.at(x, y) == OpMode::ToF) {
        auto hs = open_out(g, "hist_" + std::to_string(x) + "_" +
                                  std::to_string(y) + ".csv");
        write_histogram_csv(hs, out.at(x, y).histogram(), tdc);
      }

  const PowerReport rep = power_report(map, power, g.clock_hz);
  auto pw = open_out(g, "power.txt");
  write_power_report(pw, rep);
  write_power_report(std::cout, rep);
  return 0;
}

int cmd_power(const GlobalOpts& g, const std::string& cfg_path) {
  const ConfigDoc doc = load_config(cfg_path);
  const ModeMap map = mode_map_from(doc, cfg_path);
  const PowerParams power = power_params_from(doc);
  doc.finish();
  const PowerReport rep = power_report(map, power, g.clock_hz);
  auto pw = open_out(g, "power.txt");
  write_power_report(pw, rep);
  write_power_report(std::cout, rep);
  return 0;
}

int cmd_program_time(const GlobalOpts& g, std::int64_t bits) {
  std::cout << "chain_bits=" << bits << "\n"
            << "clock_hz=" << fmt_double(g.clock_hz) << "\n"
            << "programming_time_s="
            << fmt_double(programming_time_s(std::size_t(bits), g.clock_hz))
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SPAD array LUT fabric simulator"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "base RNG seed")->capture_default_str();
  app.add_option("--out", g.out_dir, "output directory")
      ->capture_default_str();
  app.add_flag("--paper-scale", g.paper_scale,
               "full-scale protocol (1 s, 100 seeds) instead of desk scale");
  app.add_option("--clock", g.clock_hz, "programming clock in Hz")
      ->capture_default_str();
  app.add_flag("--no-timestamp", g.no_timestamp,
               "omit the generated-at header line in CSV outputs");
  app.add_option("--threads", g.threads, "worker threads for array frames")
      ->capture_default_str();

  std::string spec_path, cfg_path;
  std::int64_t bits = kArrayBits;

  auto* compile = app.add_subcommand("compile", "compile a LUT network spec");
  compile->add_option("spec", spec_path, "network spec file")->required();

  auto* sweep = app.add_subcommand("sweep-linearity",
                                   "counting sweep over flux points");
  sweep->add_option("config", cfg_path, "sweep config file")->required();

  auto* tof = app.add_subcommand("tof", "ToF histogram comparison");
  tof->add_option("config", cfg_path, "ToF config file")->required();

  auto* arr = app.add_subcommand("array", "full-array frame simulation");
  arr->add_option("config", cfg_path, "array config file")->required();

  auto* pow = app.add_subcommand("power", "power report for a mode map");
  pow->add_option("config", cfg_path, "power config file")->required();

  auto* pt = app.add_subcommand("program-time", "programming-time arithmetic");
  pt->add_option("--bits", bits, "chain length in bits")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (compile->parsed()) return cmd_compile(g, spec_path);
    if (sweep->parsed()) return cmd_sweep_linearity(g, cfg_path);
    if (tof->parsed()) return cmd_tof(g, cfg_path);
    if (arr->parsed()) return cmd_array(g, cfg_path);
    if (pow->parsed()) return cmd_power(g, cfg_path);
    if (pt->parsed()) return cmd_program_time(g, bits);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidSpec& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidClock& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
