#pragma once

// Deterministic text output: every number is rendered with the same
// fixed-precision formatter so identical runs produce byte-identical files.

#include <filesystem>
#include <string>

#include "piezosim/plant.hpp"

namespace piezosim {

struct TrackingTrace;
struct TrackingMetrics;

// "%.12g" rendering, locale-independent.
std::string format_sig(double x);

// Open-loop trace, header `t,y,v,u`, one row per dt / decimation.
void write_trace_csv(const Trace& trace, const std::filesystem::path& path,
                     std::size_t decimation = 1);

// Closed-loop trace, header `t,y_d,y,e,u,s`.
void write_tracking_csv(const TrackingTrace& trace,
                        const std::filesystem::path& path);

// Sliding-variable phase samples, header `s,s_dot` (backward difference).
void write_phase_csv(const TrackingTrace& trace,
                     const std::filesystem::path& path);

// key: value rendering of the tracking metrics.
void write_metrics_file(const TrackingMetrics& metrics,
                        const std::filesystem::path& path);

// Self-contained gnuplot script plotting error and control from a trace CSV.
void write_plot_script(const std::filesystem::path& script_path,
                       const std::string& csv_filename,
                       const std::string& title);

}  // namespace piezosim
