#pragma once

// JSON experiment configuration: a config document fully determines a run.
// Field names carry units (`amplitude_m`, `freq_rad_s`, ...). Unknown keys
// are rejected so typos cannot silently fall back to defaults.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "piezosim/experiment.hpp"

namespace piezosim {

// Single closed-loop experiment (subcommands `track` / `phase`).
// `base_dir` anchors relative paths (e.g. plant.params_file).
ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::filesystem::path& base_dir);

// Multi-controller protocol (subcommand `compare`): shared plant/reference/
// timing plus one controller block per run.
std::vector<ExperimentConfig> parse_compare_config(
    const std::string& json_text, const std::filesystem::path& base_dir);

struct IdentifyConfig {
  std::filesystem::path dataset_csv;
  double alpha3_n_per_v = 6.0;
  std::string out_name = "fitted_params.txt";
};

IdentifyConfig parse_identify_config(const std::string& json_text,
                                     const std::filesystem::path& base_dir);

struct SimulateConfig {
  PlantParams plant{};
  SimConfig sim{5e-5, 1.0, 10.0};
  InputProfile input = InputProfile::zero();
  DisturbanceSpec disturbance{};
  std::size_t decimation = 1;
  std::string out_name = "trace.csv";
};

SimulateConfig parse_simulate_config(const std::string& json_text,
                                     const std::filesystem::path& base_dir);

// Reads a whole config file; missing/unreadable files are config errors.
std::string read_text_file(const std::filesystem::path& path);

// Applies a seed override to whichever field consumes it (disturbance seed).
void override_seed(ExperimentConfig& cfg, std::uint64_t seed);

}  // namespace piezosim
