#include "piezosim/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "piezosim/experiment.hpp"

namespace piezosim {

std::string format_sig(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("failed writing file: " + path.string());
}

}  // namespace

void write_trace_csv(const Trace& trace, const std::filesystem::path& path,
                     std::size_t decimation) {
  if (decimation == 0) throw std::invalid_argument("decimation must be >= 1");
  auto out = open_out(path);
  out << "t,y,v,u\n";
  for (std::size_t i = 0; i < trace.size(); i += decimation) {
    out << format_sig(trace.t[i]) << ',' << format_sig(trace.y[i]) << ','
        << format_sig(trace.v[i]) << ',' << format_sig(trace.u[i]) << '\n';
  }
  finish(out, path);
}

void write_tracking_csv(const TrackingTrace& trace,
                        const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "t,y_d,y,e,u,s\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << format_sig(trace.t[i]) << ',' << format_sig(trace.y_d[i]) << ','
        << format_sig(trace.y[i]) << ',' << format_sig(trace.e[i]) << ','
        << format_sig(trace.u[i]) << ',' << format_sig(trace.s[i]) << '\n';
  }
  finish(out, path);
}

void write_phase_csv(const TrackingTrace& trace,
                     const std::filesystem::path& path) {
  const std::vector<double> s_dot = s_dot_series(trace);
  auto out = open_out(path);
  out << "s,s_dot\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << format_sig(trace.s[i]) << ',' << format_sig(s_dot[i]) << '\n';
  }
  finish(out, path);
}

void write_metrics_file(const TrackingMetrics& m,
                        const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "rms_error_m: " << format_sig(m.rms_error) << "\n"
      << "max_abs_error_m: " << format_sig(m.max_abs_error) << "\n"
      << "window_start_s: " << format_sig(m.window_start) << "\n"
      << "window_end_s: " << format_sig(m.window_end) << "\n"
      << "control_effort_rms_v: " << format_sig(m.control_effort_rms) << "\n"
      << "chatter_index_v: " << format_sig(m.chatter_index) << "\n";
  finish(out, path);
}

void write_plot_script(const std::filesystem::path& script_path,
                       const std::string& csv_filename,
                       const std::string& title) {
  auto out = open_out(script_path);
  out << "# gnuplot script; run from this directory: gnuplot " <<
      script_path.filename().string() << "\n"
      << "set datafile separator ','\n"
      << "set terminal pngcairo size 1100,700\n"
      << "set output '" << title << ".png'\n"
      << "set multiplot layout 2,1 title '" << title << "'\n"
      << "set key autotitle columnhead\n"
      << "set xlabel 't (s)'\n"
      << "set ylabel 'error (m)'\n"
      << "plot '" << csv_filename << "' using 1:4 with lines lw 1.2\n"
      << "set ylabel 'control (V)'\n"
      << "plot '" << csv_filename << "' using 1:5 with lines lw 1.2\n"
      << "unset multiplot\n";
  finish(out, script_path);
}

}  // namespace piezosim
