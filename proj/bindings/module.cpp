// Python bindings for the piezo stage lab. The module mirrors the C++ API
// one-to-one: friction laws, plant simulation, controllers, identification,
// and the closed-loop tracking harness (driven by the same JSON configs as
// the CLI).

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "piezosim/config.hpp"
#include "piezosim/controllers.hpp"
#include "piezosim/csv.hpp"
#include "piezosim/experiment.hpp"
#include "piezosim/friction.hpp"
#include "piezosim/numeric.hpp"
#include "piezosim/plant.hpp"
#include "piezosim/sysid.hpp"
#include "piezosim/trajectory.hpp"

namespace py = pybind11;
using namespace piezosim;

namespace {

void export_friction(py::module_& m) {
  auto sub = m.def_submodule("friction", "classical friction force laws");
  py::class_<friction::FrictionParams>(sub, "FrictionParams")
      .def(py::init<>())
      .def_readwrite("f_s", &friction::FrictionParams::f_s)
      .def_readwrite("f_c", &friction::FrictionParams::f_c)
      .def_readwrite("f_v", &friction::FrictionParams::f_v)
      .def_readwrite("f_d", &friction::FrictionParams::f_d)
      .def("validate", &friction::FrictionParams::validate);
  sub.def("static_friction", &friction::static_friction, py::arg("f_a"),
          py::arg("v"), py::arg("f_s"), py::arg("v_zero_tol") = friction::kZeroVelTol);
  sub.def("coulomb_friction", &friction::coulomb_friction, py::arg("v"), py::arg("f_c"));
  sub.def("viscous_friction", &friction::viscous_friction, py::arg("v"), py::arg("f_v"));
  sub.def("drag_friction", &friction::drag_friction, py::arg("v"), py::arg("f_d"));
}

void export_plant(py::module_& m) {
  py::class_<PlantParams>(m, "PlantParams")
      .def(py::init<>())
      .def_readwrite("alpha1_pos", &PlantParams::alpha1_pos)
      .def_readwrite("alpha1_neg", &PlantParams::alpha1_neg)
      .def_readwrite("alpha2_pos", &PlantParams::alpha2_pos)
      .def_readwrite("alpha2_neg_base", &PlantParams::alpha2_neg_base)
      .def_readwrite("alpha2n_rate", &PlantParams::alpha2n_rate)
      .def_readwrite("alpha3", &PlantParams::alpha3)
      .def_readwrite("alpha_s_cap", &PlantParams::alpha_s_cap)
      .def_readwrite("tau", &PlantParams::tau)
      .def_readwrite("v_cr", &PlantParams::v_cr)
      .def("alpha2_neg_settled", &PlantParams::alpha2_neg_settled)
      .def("validate", &PlantParams::validate);

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def(py::init([](double dt, double duration, double u_sat) {
             return SimConfig{dt, duration, u_sat};
           }),
           py::arg("dt") = 5e-5, py::arg("duration") = 1.0, py::arg("u_sat") = 10.0)
      .def_readwrite("dt", &SimConfig::dt)
      .def_readwrite("duration", &SimConfig::duration)
      .def_readwrite("u_sat", &SimConfig::u_sat);

  py::class_<InputProfile>(m, "InputProfile")
      .def_static("zero", &InputProfile::zero)
      .def_static("constant", &InputProfile::constant, py::arg("volts"))
      .def_static("pulse", &InputProfile::pulse, py::arg("volts"), py::arg("width_s"))
      .def_static("triangle", &InputProfile::triangle, py::arg("peak_pos"),
                  py::arg("peak_neg"), py::arg("period_s"))
      .def("__call__", &InputProfile::operator());

  py::class_<Trace>(m, "Trace")
      .def_readonly("t", &Trace::t)
      .def_readonly("y", &Trace::y)
      .def_readonly("v", &Trace::v)
      .def_readonly("u", &Trace::u)
      .def("__len__", &Trace::size);

  m.def("sgn", &sgn, py::arg("x"));
  m.def("saturate", &saturate, py::arg("x"), py::arg("limit"));
  m.def("effective_alpha1", &effective_alpha1, py::arg("v_delayed"), py::arg("params"));
  m.def("effective_alpha2n", &effective_alpha2n, py::arg("v"), py::arg("u_dot"),
        py::arg("params"));
  m.def("acceleration", &acceleration, py::arg("v"), py::arg("v_delayed"),
        py::arg("u"), py::arg("u_dot"), py::arg("d"), py::arg("params"));
  m.def("steady_state_velocity", &steady_state_velocity, py::arg("u"), py::arg("params"));
  m.def(
      "simulate",
      [](const InputProfile& profile, const SimConfig& cfg, const PlantParams& p) {
        return simulate(profile, cfg, p);
      },
      py::arg("u_profile"), py::arg("config"), py::arg("params"));
}

void export_controllers(py::module_& m) {
  py::class_<SlidingSurfaceSpec>(m, "SlidingSurfaceSpec")
      .def(py::init<>())
      .def(py::init([](std::vector<double> lambda) {
             SlidingSurfaceSpec spec;
             spec.lambda = std::move(lambda);
             spec.validate();
             return spec;
           }),
           py::arg("lambda_coeffs"))
      .def_readwrite("lambda_coeffs", &SlidingSurfaceSpec::lambda)
      .def("order", &SlidingSurfaceSpec::order);

  m.def(
      "sliding_value",
      [](const std::vector<double>& e_derivs, const SlidingSurfaceSpec& spec) {
        return sliding_value(e_derivs, spec);
      },
      py::arg("e_derivatives"), py::arg("spec"));

  py::class_<SmcpmcGains>(m, "SmcpmcGains")
      .def(py::init<>())
      .def_readwrite("eta", &SmcpmcGains::eta)
      .def_readwrite("beta", &SmcpmcGains::beta)
      .def_readwrite("phi_scale", &SmcpmcGains::phi_scale);

  py::class_<ReachingBound>(m, "ReachingBound")
      .def(py::init<>())
      .def_readwrite("D", &ReachingBound::D)
      .def_readwrite("L", &ReachingBound::L)
      .def_readwrite("rho_c", &ReachingBound::rho_c);

  m.def("reaching_margin", &reaching_margin, py::arg("s"), py::arg("e_norm"),
        py::arg("bound"), py::arg("gains"));

  py::class_<LowPassFilter>(m, "LowPassFilter")
      .def(py::init<double>(), py::arg("time_constant") = 0.1)
      .def("step", &LowPassFilter::step, py::arg("x"), py::arg("dt"))
      .def("value", &LowPassFilter::value)
      .def("reset", &LowPassFilter::reset, py::arg("y0") = 0.0);

  py::class_<FeedforwardModel>(m, "FeedforwardModel")
      .def(py::init<>())
      .def(py::init([](const PlantParams& p) { return FeedforwardModel{p}; }),
           py::arg("params"))
      .def_readwrite("params", &FeedforwardModel::params);

  m.def("feedforward_u_hat", &feedforward_u_hat, py::arg("v_d"),
        py::arg("v_d_delayed"), py::arg("a_d"), py::arg("u_prev"),
        py::arg("u_dot_prev"), py::arg("model"));
  m.def("smcpmc_control", &smcpmc_control, py::arg("e"), py::arg("e_dot_filtered"),
        py::arg("u_hat"), py::arg("gains"), py::arg("spec"));

  py::class_<PiGains>(m, "PiGains")
      .def(py::init<>())
      .def_readwrite("kp", &PiGains::kp)
      .def_readwrite("ki", &PiGains::ki);

  py::class_<PiController>(m, "PiController")
      .def(py::init<const PiGains&, double>(), py::arg("gains") = PiGains{},
           py::arg("u_max") = 10.0)
      .def("update", &PiController::update, py::arg("e"), py::arg("dt"))
      .def("reset", &PiController::reset)
      .def("integral", &PiController::integral)
      .def("set_integral", &PiController::set_integral, py::arg("value"));

  py::class_<BoundarySmcGains>(m, "BoundarySmcGains")
      .def(py::init<>())
      .def_readwrite("eta", &BoundarySmcGains::eta)
      .def_readwrite("beta", &BoundarySmcGains::beta)
      .def_readwrite("boundary_width", &BoundarySmcGains::boundary_width);

  m.def("boundary_smc_control", &boundary_smc_control, py::arg("e"),
        py::arg("e_dot"), py::arg("gains"), py::arg("spec"));
}

void export_sysid(py::module_& m) {
  auto sub = m.def_submodule("sysid", "friction parameter identification");
  py::class_<sysid::PulseDataset>(sub, "PulseDataset")
      .def_static("from_rows", &sysid::PulseDataset::from_rows, py::arg("uv_pairs"))
      .def_static("from_csv", &sysid::PulseDataset::from_csv, py::arg("path"))
      .def("__len__",
           [](const sysid::PulseDataset& d) { return d.rows.size(); });

  py::class_<sysid::FitResult>(sub, "FitResult")
      .def_readonly("alpha1_pos", &sysid::FitResult::alpha1_pos)
      .def_readonly("alpha1_neg", &sysid::FitResult::alpha1_neg)
      .def_readonly("alpha2_pos", &sysid::FitResult::alpha2_pos)
      .def_readonly("alpha2_neg", &sysid::FitResult::alpha2_neg)
      .def_readonly("condition", &sysid::FitResult::condition)
      .def_readonly("residual_inf", &sysid::FitResult::residual_inf);

  sub.def(
      "fit",
      [](const sysid::PulseDataset& data, double alpha3) {
        return sysid::solve_ls(sysid::build_ls_system(data, alpha3));
      },
      py::arg("dataset"), py::arg("alpha3") = 6.0,
      "assemble the regressor system and solve it in one call");
  sub.def("steady_state_from_trace", &sysid::steady_state_from_trace,
          py::arg("trace"), py::arg("window"));
  sub.def("to_plant_params", &sysid::to_plant_params, py::arg("fit"),
          py::arg("base") = PlantParams{});
  sub.def("write_params_file",
          [](const std::filesystem::path& path, const PlantParams& p) {
            sysid::write_params_file(path, p);
          },
          py::arg("path"), py::arg("params"));
  sub.def("read_params_file", &sysid::read_params_file, py::arg("path"));
}

void export_harness(py::module_& m) {
  py::class_<ReferenceSpec>(m, "ReferenceSpec").def(py::init<>());

  py::class_<ReferenceTrajectory>(m, "ReferenceTrajectory")
      .def(py::init<const ReferenceSpec&>(), py::arg("spec") = ReferenceSpec{})
      .def("y_d", &ReferenceTrajectory::y_d, py::arg("t"))
      .def("v_d", &ReferenceTrajectory::v_d, py::arg("t"))
      .def("a_d", &ReferenceTrajectory::a_d, py::arg("t"));

  py::class_<TrackingMetrics>(m, "TrackingMetrics")
      .def_readonly("rms_error", &TrackingMetrics::rms_error)
      .def_readonly("max_abs_error", &TrackingMetrics::max_abs_error)
      .def_readonly("window_start", &TrackingMetrics::window_start)
      .def_readonly("window_end", &TrackingMetrics::window_end)
      .def_readonly("control_effort_rms", &TrackingMetrics::control_effort_rms)
      .def_readonly("chatter_index", &TrackingMetrics::chatter_index);

  py::class_<TrackingTrace>(m, "TrackingTrace")
      .def_readonly("t", &TrackingTrace::t)
      .def_readonly("y_d", &TrackingTrace::y_d)
      .def_readonly("y", &TrackingTrace::y)
      .def_readonly("e", &TrackingTrace::e)
      .def_readonly("u", &TrackingTrace::u)
      .def_readonly("s", &TrackingTrace::s)
      .def_readonly("e_dot_f", &TrackingTrace::e_dot_f)
      .def("__len__", &TrackingTrace::size);

  m.def(
      "run_tracking_json",
      [](const std::string& config_json, const std::filesystem::path& base_dir) {
        const ExperimentConfig cfg = parse_experiment_config(config_json, base_dir);
        return run_tracking(cfg);
      },
      py::arg("config_json"), py::arg("base_dir") = std::filesystem::path("."),
      "run one closed-loop experiment from a JSON config string");

  m.def(
      "compare_controllers_json",
      [](const std::string& config_json, const std::filesystem::path& base_dir,
         std::size_t parallelism) {
        const auto configs = parse_compare_config(config_json, base_dir);
        const ComparisonResult result = compare_controllers(configs, parallelism);
        py::list rows;
        for (const auto& row : result.ranking) {
          rows.append(py::make_tuple(row.label, row.metrics));
        }
        return rows;
      },
      py::arg("config_json"), py::arg("base_dir") = std::filesystem::path("."),
      py::arg("parallelism") = 1,
      "run the multi-controller protocol; returns (label, metrics) ranked by rms");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "piezo stage lab: plant simulation, identification, SMC benchmarks";
  export_friction(m);
  export_plant(m);
  export_controllers(m);
  export_sysid(m);
  export_harness(m);
}
