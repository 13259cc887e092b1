// Batch experiment driver for the piezo stage lab.
//
//   piezosim identify --config configs/identify.json --out out
//   piezosim simulate --config configs/pulse_1v6.json --out out
//   piezosim track    --config configs/track_smcpmc.json --out out
//   piezosim compare  --config configs/compare_default.json --out out --parallel 3
//   piezosim phase    --config configs/track_smcpmc.json --out out
//
// Exit codes: 0 success, 1 runtime failure, 2 bad configuration/usage.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "piezosim/config.hpp"
#include "piezosim/csv.hpp"
#include "piezosim/experiment.hpp"
#include "piezosim/sysid.hpp"

namespace {

namespace fs = std::filesystem;
using namespace piezosim;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t parallel = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_seed,
                bool with_parallel) {
  cmd->add_option("--config", args.config_path, "JSON config file")->required();
  cmd->add_option("--out", args.out_dir, "output directory (default: out)");
  if (with_seed) {
    cmd->add_option("--seed", args.seed, "override the disturbance seed")
        ->check(CLI::NonNegativeNumber);
  }
  if (with_parallel) {
    cmd->add_option("--parallel", args.parallel, "worker threads (default: 1)")
        ->check(CLI::PositiveNumber);
  }
}

fs::path config_base_dir(const CommonArgs& args) {
  const fs::path cfg(args.config_path);
  return cfg.has_parent_path() ? cfg.parent_path() : fs::path(".");
}

int run_identify(const CommonArgs& args) {
  const auto cfg = parse_identify_config(read_text_file(args.config_path),
                                         config_base_dir(args));
  const auto dataset = sysid::PulseDataset::from_csv(cfg.dataset_csv);
  const auto system = sysid::build_ls_system(dataset, cfg.alpha3_n_per_v);
  const auto fit = sysid::solve_ls(system);
  const PlantParams params = sysid::to_plant_params(fit);

  fs::create_directories(args.out_dir);
  const fs::path out_file = fs::path(args.out_dir) / cfg.out_name;
  sysid::write_params_file(out_file, params, &fit);

  std::cout << "alpha1_pos: " << format_sig(fit.alpha1_pos) << "\n"
            << "alpha1_neg: " << format_sig(fit.alpha1_neg) << "\n"
            << "alpha2_pos: " << format_sig(fit.alpha2_pos) << "\n"
            << "alpha2_neg: " << format_sig(fit.alpha2_neg) << "\n"
            << "condition: " << format_sig(fit.condition) << "\n"
            << "residual_inf: " << format_sig(fit.residual_inf) << "\n"
            << "wrote: " << out_file.string() << "\n";
  return 0;
}

int run_simulate(const CommonArgs& args) {
  const auto cfg = parse_simulate_config(read_text_file(args.config_path),
                                         config_base_dir(args));
  const Trace trace = simulate(cfg.input, cfg.disturbance, cfg.sim, cfg.plant);
  fs::create_directories(args.out_dir);
  const fs::path out_file = fs::path(args.out_dir) / cfg.out_name;
  write_trace_csv(trace, out_file, cfg.decimation);
  std::cout << "samples: " << trace.size() << "\n"
            << "final_y_m: " << format_sig(trace.y.back()) << "\n"
            << "final_v_m_s: " << format_sig(trace.v.back()) << "\n"
            << "wrote: " << out_file.string() << "\n";
  return 0;
}

void print_metrics(const TrackingMetrics& m) {
  std::cout << "rms_error_m: " << format_sig(m.rms_error) << "\n"
            << "max_abs_error_m: " << format_sig(m.max_abs_error) << "\n"
            << "window_start_s: " << format_sig(m.window_start) << "\n"
            << "window_end_s: " << format_sig(m.window_end) << "\n"
            << "control_effort_rms_v: " << format_sig(m.control_effort_rms) << "\n"
            << "chatter_index_v: " << format_sig(m.chatter_index) << "\n";
}

ExperimentConfig load_experiment(const CommonArgs& args) {
  ExperimentConfig cfg = parse_experiment_config(
      read_text_file(args.config_path), config_base_dir(args));
  if (args.seed_set) override_seed(cfg, args.seed);
  return cfg;
}

int run_track(const CommonArgs& args) {
  const ExperimentConfig cfg = load_experiment(args);
  const auto [trace, metrics] = run_tracking(cfg);
  emit_outputs(trace, metrics, args.out_dir, cfg.controller.label);
  print_metrics(metrics);
  if (cfg.bound && cfg.controller.kind == ControllerKind::smcpmc) {
    const auto margins = reaching_margins(trace, *cfg.bound, cfg.controller.smcpmc);
    const double min_margin =
        margins.empty() ? 0.0 : *std::min_element(margins.begin(), margins.end());
    const std::size_t negative =
        static_cast<std::size_t>(std::count_if(margins.begin(), margins.end(),
                                               [](double m) { return m < 0.0; }));
    std::cout << "reaching_margin_min: " << format_sig(min_margin) << "\n"
              << "reaching_margin_negative_samples: " << negative << "\n";
  }
  std::cout << "wrote: "
            << (fs::path(args.out_dir) / (cfg.controller.label + "_trace.csv")).string()
            << "\n";
  return 0;
}

double chattering_band(const ControllerConfig& cc) {
  switch (cc.kind) {
    case ControllerKind::smcpmc:
      return 10.0 * cc.smcpmc.beta / cc.smcpmc.eta;
    case ControllerKind::boundary_smc:
      return 10.0 * cc.boundary.beta / cc.boundary.eta;
    case ControllerKind::pi:
      return 0.0;
  }
  return 0.0;
}

int run_phase(const CommonArgs& args) {
  const ExperimentConfig cfg = load_experiment(args);
  const auto [trace, metrics] = run_tracking(cfg);
  emit_outputs(trace, metrics, args.out_dir, cfg.controller.label);
  const fs::path phase_file =
      fs::path(args.out_dir) / (cfg.controller.label + "_phase.csv");
  write_phase_csv(trace, phase_file);

  const PhaseStats stats = phase_stats(trace, chattering_band(cfg.controller));
  print_metrics(metrics);
  std::cout << "descent_fraction: " << format_sig(stats.descent_fraction()) << "\n"
            << "samples_outside_band: " << stats.outside_band << "\n"
            << "max_abs_s_early: " << format_sig(stats.max_abs_s_early) << "\n"
            << "max_abs_s_late: " << format_sig(stats.max_abs_s_late) << "\n"
            << "wrote: " << phase_file.string() << "\n";
  return 0;
}

int run_compare(const CommonArgs& args) {
  std::vector<ExperimentConfig> configs = parse_compare_config(
      read_text_file(args.config_path), config_base_dir(args));
  if (args.seed_set) {
    for (auto& cfg : configs) override_seed(cfg, args.seed);
  }
  const ComparisonResult result = compare_controllers(configs, args.parallel);

  fs::create_directories(args.out_dir);
  write_comparison_csv(result, fs::path(args.out_dir) / "compare.csv");
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const TrackingMetrics metrics =
        compute_metrics(result.traces[i], configs[i].metrics);
    emit_outputs(result.traces[i], metrics, args.out_dir, result.labels[i]);
  }
  std::cout << comparison_table(result)
            << "wrote: " << (fs::path(args.out_dir) / "compare.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"piezo stage lab: simulation, identification, tracking benchmarks"};
  app.require_subcommand(1);

  CommonArgs identify_args, simulate_args, track_args, compare_args, phase_args;
  auto* identify = app.add_subcommand(
      "identify", "fit friction coefficients from a pulse dataset");
  add_common(identify, identify_args, false, false);
  auto* simulate = app.add_subcommand(
      "simulate", "open-loop plant run, writes a t,y,v,u trace");
  add_common(simulate, simulate_args, false, false);
  auto* track = app.add_subcommand(
      "track", "closed-loop tracking run, writes trace/metrics/plot");
  add_common(track, track_args, true, false);
  auto* compare = app.add_subcommand(
      "compare", "multi-controller benchmark with a ranked table");
  add_common(compare, compare_args, true, true);
  auto* phase = app.add_subcommand(
      "phase", "tracking run plus sliding-variable phase output");
  add_common(phase, phase_args, true, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  track_args.seed_set = track->count("--seed") > 0;
  compare_args.seed_set = compare->count("--seed") > 0;
  phase_args.seed_set = phase->count("--seed") > 0;

  try {
    if (*identify) return run_identify(identify_args);
    if (*simulate) return run_simulate(simulate_args);
    if (*track) return run_track(track_args);
    if (*compare) return run_compare(compare_args);
    if (*phase) return run_phase(phase_args);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 2;
}
