#pragma once

// Closed-loop tracking harness: one controller against the simulated stage
// at a fixed control period with plant substeps, plus the comparison driver
// and the sliding-variable diagnostics.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "piezosim/controllers.hpp"
#include "piezosim/plant.hpp"
#include "piezosim/trajectory.hpp"

namespace piezosim {

enum class ControllerKind { smcpmc, pi, boundary_smc };

std::string to_string(ControllerKind kind);

struct ControllerConfig {
  ControllerKind kind = ControllerKind::smcpmc;
  std::string label;  // defaults to the kind name
  SlidingSurfaceSpec surface{};
  SmcpmcGains smcpmc{};
  PiGains pi{};
  BoundarySmcGains boundary{};

  void validate() const;
  bool operator==(const ControllerConfig&) const = default;
};

struct MetricsConfig {
  double transient_exclusion_s = 1.0;
  bool operator==(const MetricsConfig&) const = default;
};

struct ExperimentConfig {
  PlantParams plant{};
  SimConfig sim{6.25e-6, 6.0, 10.0};
  // The filtered-derivative path turns the surface gain into stiffness near
  // 450 rad/s where the plant's velocity delay has eaten most of the phase
  // margin, so the loop needs a fast control rate: periods >= 5e-4 s
  // limit-cycle outright, and even 5e-5 s rings at ~86 Hz under the faster
  // reference. 2.5e-5 s keeps the sampling lag small at that resonance.
  double control_period_s = 2.5e-5;  // plant dt must divide this exactly
  // Error-derivative smoothing, equivalent to a discrete first-order smoother
  // with coefficient 0.1 per 0.1 ms sample. Heavy enough to average the
  // relay's per-sample velocity ripple out of the sliding variable (a faster
  // filter widens the quasi-sliding band and its asymmetry rectifies into a
  // tracking bias), light enough to keep the derivative feedback damping the
  // ~450 rad/s loop resonance (0.1 s starves it and the loop goes marginal).
  double lowpass_tc_s = 9.49e-4;
  ControllerConfig controller{};
  ReferenceSpec reference{};
  DisturbanceSpec disturbance{};
  MetricsConfig metrics{};
  double quantization_m = 0.0;      // encoder emulation; 0 disables
  // Stage pose at t = 0; a nonzero offset gives the loop a genuine reaching
  // transient (the references themselves start at zero error).
  double initial_position_m = 0.0;
  double initial_velocity_m_s = 0.0;
  std::optional<ReachingBound> bound;

  void validate() const;
  // Substeps of the plant integrator per control period.
  std::size_t substeps() const;
};

struct TrackingMetrics {
  double rms_error = 0.0;        // m
  double max_abs_error = 0.0;    // m
  double window_start = 0.0;     // s
  double window_end = 0.0;       // s
  double control_effort_rms = 0.0;  // V
  double chatter_index = 0.0;       // mean |du| per control sample, V
};

struct TrackingTrace {
  std::vector<double> t, y_d, y, e, u, s;  // sampled at the control period
  // Filtered error derivative actually fed to the laws; kept for the
  // reaching-margin diagnostics, not part of the canonical CSV schema.
  std::vector<double> e_dot_f;
  std::size_t size() const { return t.size(); }
};

std::pair<TrackingTrace, TrackingMetrics> run_tracking(const ExperimentConfig& cfg);

// Recompute metrics over a different exclusion window without rerunning.
TrackingMetrics compute_metrics(const TrackingTrace& trace,
                                const MetricsConfig& metrics);

// Sliding-variable diagnostics: descent statistics outside the chattering
// band and the early/late |s| extrema (split at `split_t`).
struct PhaseStats {
  std::size_t outside_band = 0;  // samples with |s| > band (k >= 1)
  std::size_t descending = 0;    // of those, s*s_dot <= 0
  double max_abs_s_early = 0.0;  // t <= split_t
  double max_abs_s_late = 0.0;   // t >= split_t
  double descent_fraction() const {
    return outside_band == 0
               ? 1.0
               : static_cast<double>(descending) / static_cast<double>(outside_band);
  }
};

PhaseStats phase_stats(const TrackingTrace& trace, double band,
                       double split_t = 1.0);

// Backward-difference s_dot series (first entry 0).
std::vector<double> s_dot_series(const TrackingTrace& trace);

// Pointwise reaching margins from the recorded (s, e, e_dot_f) samples.
std::vector<double> reaching_margins(const TrackingTrace& trace,
                                     const ReachingBound& bound,
                                     const SmcpmcGains& gains);

struct ComparisonRow {
  std::string label;
  TrackingMetrics metrics;
};

struct ComparisonResult {
  std::vector<ComparisonRow> ranking;  // ascending rms_error
  std::vector<std::string> labels;     // config order
  std::vector<TrackingTrace> traces;   // config order
};

// All configs must share plant, reference, sim, and control timing; runs may
// execute on up to `parallelism` worker threads.
ComparisonResult compare_controllers(const std::vector<ExperimentConfig>& configs,
                                     std::size_t parallelism = 1);

// Writes <label>_trace.csv, <label>_metrics.txt, <label>_plot.gp.
void emit_outputs(const TrackingTrace& trace, const TrackingMetrics& metrics,
                  const std::filesystem::path& out_dir, const std::string& label);

// Aligned multi-trace CSV for a comparison run (shared t and y_d columns).
void write_comparison_csv(const ComparisonResult& result,
                          const std::filesystem::path& path);

// Plain-text comparison table, ranked by rms_error.
std::string comparison_table(const ComparisonResult& result);

}  // namespace piezosim
