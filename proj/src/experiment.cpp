#include "piezosim/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "piezosim/csv.hpp"
#include "piezosim/numeric.hpp"

namespace piezosim {

std::string to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::smcpmc: return "smcpmc";
    case ControllerKind::pi: return "pi";
    case ControllerKind::boundary_smc: return "boundary_smc";
  }
  return "unknown";
}

void ControllerConfig::validate() const {
  switch (kind) {
    case ControllerKind::smcpmc:
      smcpmc.validate();
      surface.validate_normalized();
      if (surface.order() != 2) {
        throw std::invalid_argument("the tracking loop uses an order-2 surface");
      }
      break;
    case ControllerKind::pi:
      pi.validate();
      break;
    case ControllerKind::boundary_smc:
      boundary.validate();
      surface.validate();
      if (surface.order() != 2) {
        throw std::invalid_argument("the tracking loop uses an order-2 surface");
      }
      break;
  }
}

void ExperimentConfig::validate() const {
  plant.validate();
  sim.validate(plant.tau);
  controller.validate();
  if (!(control_period_s > 0.0)) {
    throw std::invalid_argument("control period must be > 0");
  }
  if (!(lowpass_tc_s > 0.0)) {
    throw std::invalid_argument("filter time constant must be > 0");
  }
  if (quantization_m < 0.0) {
    throw std::invalid_argument("quantization resolution must be >= 0");
  }
  if (!std::isfinite(initial_position_m) || !std::isfinite(initial_velocity_m_s)) {
    throw std::invalid_argument("initial state must be finite");
  }
  const double ratio = control_period_s / sim.dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || ratio < 1.0) {
    throw std::invalid_argument("plant dt must divide the control period exactly");
  }
  if (bound) bound->validate();
}

std::size_t ExperimentConfig::substeps() const {
  return static_cast<std::size_t>(std::llround(control_period_s / sim.dt));
}

namespace {

// One control law behind a uniform sample interface. The harness owns the
// error-derivative pipeline and the saturation; laws only map the current
// sample to an unsaturated command.
class ControlLaw {
 public:
  virtual ~ControlLaw() = default;
  virtual double compute(double e, double e_dot_f, double y_d, double v_d,
                         double a_d, double v_d_delayed, double u_prev,
                         double u_dot_prev, double Ts) = 0;
};

class SmcpmcLaw final : public ControlLaw {
 public:
  SmcpmcLaw(const PlantParams& model, const SmcpmcGains& gains,
            const SlidingSurfaceSpec& spec, double u_sat)
      : model_{model}, gains_(gains), spec_(spec), u_sat_(u_sat) {}

  double compute(double e, double e_dot_f, double, double v_d, double a_d,
                 double v_d_delayed, double u_prev, double u_dot_prev,
                 double) override {
    const double fb = smcpmc_control(e, e_dot_f, 0.0, gains_, spec_);
    if (!(v_d < -model_.params.v_cr)) {
      // Positive-slip and stick branches do not read the input slope.
      return fb + feedforward_u_hat(v_d, v_d_delayed, a_d, u_prev, u_dot_prev,
                                    model_);
    }
    // The negative-slip Coulomb estimate branches on the slope of the very
    // command being formed, so resolve it by consistency: keep the branch
    // whose resulting (saturated) command moves the input the way the branch
    // assumes. The settled estimate is the larger one, so its candidate is
    // the lower command and at most one branch can be self-consistent; when
    // neither is (the candidates straddle the previous command), fall back to
    // the slope<=0 branch, mirroring the plant's own tie rule.
    const double u_hat_settled =
        feedforward_u_hat(v_d, v_d_delayed, a_d, u_prev, 1.0, model_);
    const double u_hat_decreasing =
        feedforward_u_hat(v_d, v_d_delayed, a_d, u_prev, -1.0, model_);
    const double u_settled = saturate(fb + u_hat_settled, u_sat_);
    if (u_settled > u_prev) return fb + u_hat_settled;
    return fb + u_hat_decreasing;
  }

 private:
  FeedforwardModel model_;
  SmcpmcGains gains_;
  SlidingSurfaceSpec spec_;
  double u_sat_;
};

class PiLaw final : public ControlLaw {
 public:
  PiLaw(const PiGains& gains, double u_max) : pi_(gains, u_max) {}

  double compute(double e, double, double, double, double, double, double,
                 double, double Ts) override {
    return pi_.update(e, Ts);
  }

 private:
  PiController pi_;
};

class BoundarySmcLaw final : public ControlLaw {
 public:
  BoundarySmcLaw(const BoundarySmcGains& gains, const SlidingSurfaceSpec& spec)
      : gains_(gains), spec_(spec) {}

  double compute(double e, double e_dot_f, double, double, double, double,
                 double, double, double) override {
    return boundary_smc_control(e, e_dot_f, gains_, spec_);
  }

 private:
  BoundarySmcGains gains_;
  SlidingSurfaceSpec spec_;
};

std::unique_ptr<ControlLaw> make_law(const ExperimentConfig& cfg) {
  switch (cfg.controller.kind) {
    case ControllerKind::smcpmc:
      return std::make_unique<SmcpmcLaw>(cfg.plant, cfg.controller.smcpmc,
                                         cfg.controller.surface, cfg.sim.u_sat);
    case ControllerKind::pi:
      return std::make_unique<PiLaw>(cfg.controller.pi, cfg.sim.u_sat);
    case ControllerKind::boundary_smc:
      return std::make_unique<BoundarySmcLaw>(cfg.controller.boundary,
                                              cfg.controller.surface);
  }
  throw std::invalid_argument("unknown controller kind");
}

}  // namespace

std::pair<TrackingTrace, TrackingMetrics> run_tracking(const ExperimentConfig& cfg) {
  cfg.validate();

  const ReferenceTrajectory ref = make_reference(cfg.reference);
  const double Ts = cfg.control_period_s;
  const double dt = cfg.sim.dt;
  const std::size_t substeps = cfg.substeps();
  const auto n_samples =
      static_cast<std::size_t>(std::llround(cfg.sim.duration / Ts));

  std::unique_ptr<ControlLaw> law = make_law(cfg);
  Disturbance disturbance(cfg.disturbance);
  PlantState state = PlantState::moving(cfg.initial_position_m,
                                        cfg.initial_velocity_m_s, cfg.plant, dt);
  LowPassFilter e_dot_filter(cfg.lowpass_tc_s);

  TrackingTrace trace;
  for (auto* column : {&trace.t, &trace.y_d, &trace.y, &trace.e, &trace.u,
                       &trace.s, &trace.e_dot_f}) {
    column->reserve(n_samples);
  }

  double e_prev = 0.0;
  double u_prev = 0.0;   // previous saturated command
  double u_prev2 = 0.0;  // the one before it

  for (std::size_t k = 0; k < n_samples; ++k) {
    const double t = static_cast<double>(k) * Ts;
    double y = state.y();
    if (cfg.quantization_m > 0.0) {
      y = std::round(y / cfg.quantization_m) * cfg.quantization_m;
    }
    const double y_d = ref.y_d(t);
    const double e = y_d - y;
    const double e_dot_raw = (k == 0) ? 0.0 : (e - e_prev) / Ts;
    const double e_dot_f = e_dot_filter.step(e_dot_raw, Ts);
    const double s = sliding_value(std::array{e, e_dot_f}, cfg.controller.surface);

    const double v_d_delayed = t >= cfg.plant.tau ? ref.v_d(t - cfg.plant.tau) : 0.0;
    const double u_dot_prev = (k < 2) ? 0.0 : (u_prev - u_prev2) / Ts;
    const double u_raw = law->compute(e, e_dot_f, y_d, ref.v_d(t), ref.a_d(t),
                                      v_d_delayed, u_prev, u_dot_prev, Ts);
    if (!std::isfinite(u_raw)) {
      throw std::runtime_error("non-finite control command at t = " +
                               std::to_string(t));
    }
    const double u = saturate(u_raw, cfg.sim.u_sat);
    const double u_dot = (k == 0) ? 0.0 : (u - u_prev) / Ts;

    trace.t.push_back(t);
    trace.y_d.push_back(y_d);
    trace.y.push_back(y);
    trace.e.push_back(e);
    trace.u.push_back(u);
    trace.s.push_back(s);
    trace.e_dot_f.push_back(e_dot_f);

    for (std::size_t j = 0; j < substeps; ++j) {
      advance(state, u, u_dot, disturbance(t + static_cast<double>(j) * dt),
              cfg.plant);
    }

    e_prev = e;
    u_prev2 = u_prev;
    u_prev = u;
  }

  TrackingMetrics metrics = compute_metrics(trace, cfg.metrics);
  return {std::move(trace), metrics};
}

TrackingMetrics compute_metrics(const TrackingTrace& trace,
                                const MetricsConfig& metrics) {
  TrackingMetrics m;
  if (trace.size() == 0) return m;
  const double t_end = trace.t.back();
  const double t_start = std::min(metrics.transient_exclusion_s, t_end);
  m.window_start = t_start;
  m.window_end = t_end;

  double sum_e2 = 0.0, sum_u2 = 0.0, sum_du = 0.0;
  std::size_t n = 0, n_du = 0;
  bool have_prev_u = false;
  double prev_u = 0.0;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    if (trace.t[k] < t_start - 1e-12) continue;
    const double e = trace.e[k];
    sum_e2 += e * e;
    m.max_abs_error = std::max(m.max_abs_error, std::abs(e));
    sum_u2 += trace.u[k] * trace.u[k];
    if (have_prev_u) {
      sum_du += std::abs(trace.u[k] - prev_u);
      ++n_du;
    }
    prev_u = trace.u[k];
    have_prev_u = true;
    ++n;
  }
  if (n > 0) {
    m.rms_error = std::sqrt(sum_e2 / static_cast<double>(n));
    m.control_effort_rms = std::sqrt(sum_u2 / static_cast<double>(n));
  }
  if (n_du > 0) m.chatter_index = sum_du / static_cast<double>(n_du);
  return m;
}

std::vector<double> s_dot_series(const TrackingTrace& trace) {
  std::vector<double> s_dot(trace.size(), 0.0);
  for (std::size_t k = 1; k < trace.size(); ++k) {
    s_dot[k] = (trace.s[k] - trace.s[k - 1]) / (trace.t[k] - trace.t[k - 1]);
  }
  return s_dot;
}

PhaseStats phase_stats(const TrackingTrace& trace, double band, double split_t) {
  if (band < 0.0) throw std::invalid_argument("band must be >= 0");
  PhaseStats stats;
  const std::vector<double> s_dot = s_dot_series(trace);
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const double abs_s = std::abs(trace.s[k]);
    if (trace.t[k] <= split_t) {
      stats.max_abs_s_early = std::max(stats.max_abs_s_early, abs_s);
    }
    if (trace.t[k] >= split_t) {
      stats.max_abs_s_late = std::max(stats.max_abs_s_late, abs_s);
    }
    if (k >= 1 && abs_s > band) {
      ++stats.outside_band;
      if (trace.s[k] * s_dot[k] <= 0.0) ++stats.descending;
    }
  }
  return stats;
}

std::vector<double> reaching_margins(const TrackingTrace& trace,
                                     const ReachingBound& bound,
                                     const SmcpmcGains& gains) {
  bound.validate();
  std::vector<double> margins;
  margins.reserve(trace.size());
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const double e_norm = std::hypot(trace.e[k], trace.e_dot_f[k]);
    margins.push_back(reaching_margin(trace.s[k], e_norm, bound, gains));
  }
  return margins;
}

ComparisonResult compare_controllers(const std::vector<ExperimentConfig>& configs,
                                     std::size_t parallelism) {
  if (configs.empty()) throw std::invalid_argument("comparison needs >= 1 config");
  for (const auto& cfg : configs) cfg.validate();
  const auto& first = configs.front();
  for (const auto& cfg : configs) {
    if (!(cfg.plant == first.plant) || !(cfg.reference == first.reference) ||
        !(cfg.sim == first.sim) ||
        cfg.control_period_s != first.control_period_s ||
        cfg.initial_position_m != first.initial_position_m ||
        cfg.initial_velocity_m_s != first.initial_velocity_m_s) {
      throw std::invalid_argument(
          "comparison configs must share plant, reference, and timing");
    }
  }

  ComparisonResult result;
  result.labels.resize(configs.size());
  result.traces.resize(configs.size());
  std::vector<TrackingMetrics> metrics(configs.size());

  const std::size_t workers =
      std::max<std::size_t>(1, std::min(parallelism, configs.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto run_range = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= configs.size()) return;
      try {
        auto [trace, m] = run_tracking(configs[i]);
        result.traces[i] = std::move(trace);
        metrics[i] = m;
        result.labels[i] = configs[i].controller.label.empty()
                               ? to_string(configs[i].controller.kind)
                               : configs[i].controller.label;
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  if (workers == 1) {
    run_range();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run_range);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  for (std::size_t i = 0; i < configs.size(); ++i) {
    result.ranking.push_back({result.labels[i], metrics[i]});
  }
  std::stable_sort(result.ranking.begin(), result.ranking.end(),
                   [](const ComparisonRow& a, const ComparisonRow& b) {
                     return a.metrics.rms_error < b.metrics.rms_error;
                   });
  return result;
}

void emit_outputs(const TrackingTrace& trace, const TrackingMetrics& metrics,
                  const std::filesystem::path& out_dir, const std::string& label) {
  std::filesystem::create_directories(out_dir);
  write_tracking_csv(trace, out_dir / (label + "_trace.csv"));
  write_metrics_file(metrics, out_dir / (label + "_metrics.txt"));
  write_plot_script(out_dir / (label + "_plot.gp"), label + "_trace.csv", label);
}

void write_comparison_csv(const ComparisonResult& result,
                          const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << "t,y_d";
  for (const auto& label : result.labels) {
    out << ",y_" << label << ",e_" << label << ",u_" << label << ",s_" << label;
  }
  out << '\n';
  if (result.traces.empty()) return;
  const auto& base = result.traces.front();
  for (const auto& other : result.traces) {
    if (other.size() != base.size()) {
      throw std::invalid_argument("comparison traces are not aligned");
    }
  }
  for (std::size_t k = 0; k < base.size(); ++k) {
    out << format_sig(base.t[k]) << ',' << format_sig(base.y_d[k]);
    for (const auto& trace : result.traces) {
      out << ',' << format_sig(trace.y[k]) << ',' << format_sig(trace.e[k])
          << ',' << format_sig(trace.u[k]) << ',' << format_sig(trace.s[k]);
    }
    out << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("failed writing file: " + path.string());
}

std::string comparison_table(const ComparisonResult& result) {
  // Display precision only; the CSV keeps full significance.
  const auto short_sig = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return std::string(buf);
  };
  std::ostringstream out;
  out << std::left << std::setw(16) << "controller" << std::right
      << std::setw(14) << "rms_error_m" << std::setw(16) << "max_abs_err_m"
      << std::setw(14) << "effort_rms_v" << std::setw(14) << "chatter_v"
      << '\n';
  for (const auto& row : result.ranking) {
    out << std::left << std::setw(16) << row.label << std::right
        << std::setw(14) << short_sig(row.metrics.rms_error)
        << std::setw(16) << short_sig(row.metrics.max_abs_error)
        << std::setw(14) << short_sig(row.metrics.control_effort_rms)
        << std::setw(14) << short_sig(row.metrics.chatter_index) << '\n';
  }
  return out.str();
}

}  // namespace piezosim
