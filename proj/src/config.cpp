#include "piezosim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "piezosim/sysid.hpp"

namespace piezosim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) {
  throw std::invalid_argument("config: " + what);
}

json parse_json(const std::string& text) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) fail("not valid JSON");
  if (!doc.is_object()) fail("top level must be an object");
  return doc;
}

// Every object is checked against the set of keys its parser consumes.
void expect_keys(const json& obj, const std::string& where,
                 const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) fail("unknown key `" + key + "` in " + where);
  }
}

double number_at(const json& obj, const std::string& where, const char* key,
                 double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) fail(where + "." + key + " must be a number");
  return obj[key].get<double>();
}

std::string string_at(const json& obj, const std::string& where, const char* key,
                      const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) fail(where + "." + key + " must be a string");
  return obj[key].get<std::string>();
}

PlantParams parse_plant(const json& obj, const std::filesystem::path& base_dir) {
  expect_keys(obj, "plant", {"params_file", "params"});
  if (obj.contains("params_file") && obj.contains("params")) {
    fail("plant: give either params_file or params, not both");
  }
  if (obj.contains("params_file")) {
    std::filesystem::path file = obj["params_file"].get<std::string>();
    if (file.is_relative()) file = base_dir / file;
    return sysid::read_params_file(file);
  }
  PlantParams p;
  if (obj.contains("params")) {
    const json& pj = obj["params"];
    expect_keys(pj, "plant.params",
                {"alpha1_pos", "alpha1_neg", "alpha2_pos", "alpha2_neg",
                 "alpha2n_rate", "alpha3", "alpha_s_cap", "tau_s", "v_cr_m_s"});
    p.alpha1_pos = number_at(pj, "plant.params", "alpha1_pos", p.alpha1_pos);
    p.alpha1_neg = number_at(pj, "plant.params", "alpha1_neg", p.alpha1_neg);
    p.alpha2_pos = number_at(pj, "plant.params", "alpha2_pos", p.alpha2_pos);
    if (pj.contains("alpha2_neg")) {
      p.alpha2_neg_base = number_at(pj, "plant.params", "alpha2_neg", 0.0) - 1.0;
    }
    p.alpha2n_rate = number_at(pj, "plant.params", "alpha2n_rate", p.alpha2n_rate);
    p.alpha3 = number_at(pj, "plant.params", "alpha3", p.alpha3);
    p.alpha_s_cap = number_at(pj, "plant.params", "alpha_s_cap", p.alpha_s_cap);
    p.tau = number_at(pj, "plant.params", "tau_s", p.tau);
    p.v_cr = number_at(pj, "plant.params", "v_cr_m_s", p.v_cr);
  }
  p.validate();
  return p;
}

SimConfig parse_sim(const json& obj, const SimConfig& defaults) {
  expect_keys(obj, "sim", {"dt_s", "duration_s", "u_sat_v"});
  SimConfig sim = defaults;
  sim.dt = number_at(obj, "sim", "dt_s", sim.dt);
  sim.duration = number_at(obj, "sim", "duration_s", sim.duration);
  sim.u_sat = number_at(obj, "sim", "u_sat_v", sim.u_sat);
  return sim;
}

ReferenceSpec parse_reference(const json& obj) {
  expect_keys(obj, "reference",
              {"kind", "amplitude_m", "freq_rad_s", "phase_rad", "offset_m"});
  ReferenceSpec spec;
  const std::string kind = string_at(obj, "reference", "kind", "sinusoid");
  if (kind == "sinusoid") {
    spec.kind = ReferenceSpec::Kind::sinusoid;
  } else if (kind == "triangle") {
    spec.kind = ReferenceSpec::Kind::triangle;
  } else if (kind == "pulse") {
    spec.kind = ReferenceSpec::Kind::pulse;
  } else if (kind == "constant") {
    spec.kind = ReferenceSpec::Kind::constant;
  } else {
    fail("reference.kind must be sinusoid|triangle|pulse|constant");
  }
  spec.amplitude_m = number_at(obj, "reference", "amplitude_m", spec.amplitude_m);
  spec.freq_rad_s = number_at(obj, "reference", "freq_rad_s", spec.freq_rad_s);
  spec.phase_rad = number_at(obj, "reference", "phase_rad", spec.phase_rad);
  // The default offset tracks the amplitude so the default sinusoid starts
  // at zero; an explicit offset always wins.
  if (obj.contains("offset_m")) {
    spec.offset_m = number_at(obj, "reference", "offset_m", spec.offset_m);
  } else if (spec.kind == ReferenceSpec::Kind::sinusoid) {
    spec.offset_m = spec.amplitude_m;
  } else {
    spec.offset_m = 0.0;
  }
  return spec;
}

DisturbanceSpec parse_disturbance(const json& obj) {
  expect_keys(obj, "disturbance",
              {"kind", "amplitude", "freq_rad_s", "phase_rad", "seed"});
  DisturbanceSpec spec;
  const std::string kind = string_at(obj, "disturbance", "kind", "none");
  if (kind == "none") {
    spec.kind = DisturbanceSpec::Kind::none;
  } else if (kind == "constant") {
    spec.kind = DisturbanceSpec::Kind::constant;
  } else if (kind == "sinusoid") {
    spec.kind = DisturbanceSpec::Kind::sinusoid;
  } else if (kind == "uniform") {
    spec.kind = DisturbanceSpec::Kind::uniform;
  } else {
    fail("disturbance.kind must be none|constant|sinusoid|uniform");
  }
  spec.amplitude = number_at(obj, "disturbance", "amplitude", 0.0);
  spec.freq_rad_s = number_at(obj, "disturbance", "freq_rad_s", 0.0);
  spec.phase_rad = number_at(obj, "disturbance", "phase_rad", 0.0);
  if (obj.contains("seed")) {
    if (!obj["seed"].is_number_unsigned()) fail("disturbance.seed must be a non-negative integer");
    spec.seed = obj["seed"].get<std::uint64_t>();
  }
  return spec;
}

SlidingSurfaceSpec parse_surface(const json& obj, const std::string& where) {
  SlidingSurfaceSpec spec;
  if (obj.contains("lambda")) {
    if (!obj["lambda"].is_array() || obj["lambda"].empty()) {
      fail(where + ".lambda must be a non-empty array");
    }
    spec.lambda.clear();
    for (const auto& v : obj["lambda"]) {
      if (!v.is_number()) fail(where + ".lambda entries must be numbers");
      spec.lambda.push_back(v.get<double>());
    }
  }
  return spec;
}

ControllerConfig parse_controller(const json& obj) {
  ControllerConfig cc;
  const std::string type = string_at(obj, "controller", "type", "");
  if (type == "smcpmc") {
    cc.kind = ControllerKind::smcpmc;
    expect_keys(obj, "controller",
                {"type", "label", "eta", "beta", "phi_scale", "lambda"});
    cc.smcpmc.eta = number_at(obj, "controller", "eta", cc.smcpmc.eta);
    cc.smcpmc.beta = number_at(obj, "controller", "beta", cc.smcpmc.beta);
    cc.smcpmc.phi_scale =
        number_at(obj, "controller", "phi_scale", cc.smcpmc.phi_scale);
    cc.surface = parse_surface(obj, "controller");
  } else if (type == "pi") {
    cc.kind = ControllerKind::pi;
    expect_keys(obj, "controller", {"type", "label", "kp", "ki"});
    cc.pi.kp = number_at(obj, "controller", "kp", cc.pi.kp);
    cc.pi.ki = number_at(obj, "controller", "ki", cc.pi.ki);
  } else if (type == "boundary_smc") {
    cc.kind = ControllerKind::boundary_smc;
    expect_keys(obj, "controller",
                {"type", "label", "eta", "beta", "boundary_width", "lambda"});
    cc.boundary.eta = number_at(obj, "controller", "eta", cc.boundary.eta);
    cc.boundary.beta = number_at(obj, "controller", "beta", cc.boundary.beta);
    cc.boundary.boundary_width =
        number_at(obj, "controller", "boundary_width", cc.boundary.boundary_width);
    cc.surface = parse_surface(obj, "controller");
  } else {
    fail("controller.type must be smcpmc|pi|boundary_smc");
  }
  cc.label = string_at(obj, "controller", "label", to_string(cc.kind));
  cc.validate();
  return cc;
}

ReachingBound parse_bound(const json& obj) {
  expect_keys(obj, "bound", {"D", "L", "rho_c"});
  ReachingBound bound;
  bound.D = number_at(obj, "bound", "D", 0.0);
  bound.L = number_at(obj, "bound", "L", 0.0);
  bound.rho_c = number_at(obj, "bound", "rho_c", 0.0);
  bound.validate();
  return bound;
}

ExperimentConfig parse_experiment(const json& doc,
                                  const std::filesystem::path& base_dir) {
  expect_keys(doc, "experiment",
              {"plant", "sim", "control_period_s", "lowpass_tc_s", "controller",
               "reference", "disturbance", "metrics", "quantization_m",
               "initial_position_m", "initial_velocity_m_s", "bound"});
  ExperimentConfig cfg;
  if (doc.contains("plant")) cfg.plant = parse_plant(doc["plant"], base_dir);
  if (doc.contains("sim")) cfg.sim = parse_sim(doc["sim"], cfg.sim);
  cfg.control_period_s =
      number_at(doc, "experiment", "control_period_s", cfg.control_period_s);
  cfg.lowpass_tc_s = number_at(doc, "experiment", "lowpass_tc_s", cfg.lowpass_tc_s);
  if (doc.contains("controller")) cfg.controller = parse_controller(doc["controller"]);
  if (doc.contains("reference")) cfg.reference = parse_reference(doc["reference"]);
  if (doc.contains("disturbance")) cfg.disturbance = parse_disturbance(doc["disturbance"]);
  if (doc.contains("metrics")) {
    expect_keys(doc["metrics"], "metrics", {"transient_exclusion_s"});
    cfg.metrics.transient_exclusion_s = number_at(
        doc["metrics"], "metrics", "transient_exclusion_s",
        cfg.metrics.transient_exclusion_s);
  }
  cfg.quantization_m = number_at(doc, "experiment", "quantization_m", 0.0);
  cfg.initial_position_m =
      number_at(doc, "experiment", "initial_position_m", 0.0);
  cfg.initial_velocity_m_s =
      number_at(doc, "experiment", "initial_velocity_m_s", 0.0);
  if (doc.contains("bound")) cfg.bound = parse_bound(doc["bound"]);
  cfg.validate();
  return cfg;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::filesystem::path& base_dir) {
  return parse_experiment(parse_json(json_text), base_dir);
}

std::vector<ExperimentConfig> parse_compare_config(
    const std::string& json_text, const std::filesystem::path& base_dir) {
  const json doc = parse_json(json_text);
  expect_keys(doc, "compare", {"shared", "controllers"});
  if (!doc.contains("controllers") || !doc["controllers"].is_array() ||
      doc["controllers"].empty()) {
    fail("compare needs a non-empty `controllers` array");
  }
  json shared = doc.contains("shared") ? doc["shared"] : json::object();
  if (!shared.is_object()) fail("compare.shared must be an object");
  if (shared.contains("controller")) fail("compare.shared cannot pick a controller");

  std::vector<ExperimentConfig> configs;
  std::set<std::string> labels;
  for (const auto& controller : doc["controllers"]) {
    json merged = shared;
    merged["controller"] = controller;
    configs.push_back(parse_experiment(merged, base_dir));
    if (!labels.insert(configs.back().controller.label).second) {
      fail("duplicate controller label `" + configs.back().controller.label + "`");
    }
  }
  return configs;
}

IdentifyConfig parse_identify_config(const std::string& json_text,
                                     const std::filesystem::path& base_dir) {
  const json doc = parse_json(json_text);
  expect_keys(doc, "identify", {"dataset_csv", "alpha3_n_per_v", "out_name"});
  IdentifyConfig cfg;
  const std::string dataset = string_at(doc, "identify", "dataset_csv", "");
  if (dataset.empty()) fail("identify.dataset_csv is required");
  cfg.dataset_csv = dataset;
  if (cfg.dataset_csv.is_relative()) cfg.dataset_csv = base_dir / cfg.dataset_csv;
  cfg.alpha3_n_per_v = number_at(doc, "identify", "alpha3_n_per_v", cfg.alpha3_n_per_v);
  cfg.out_name = string_at(doc, "identify", "out_name", cfg.out_name);
  return cfg;
}

SimulateConfig parse_simulate_config(const std::string& json_text,
                                     const std::filesystem::path& base_dir) {
  const json doc = parse_json(json_text);
  expect_keys(doc, "simulate",
              {"plant", "sim", "input", "disturbance", "decimation", "out_name"});
  SimulateConfig cfg;
  if (doc.contains("plant")) cfg.plant = parse_plant(doc["plant"], base_dir);
  if (doc.contains("sim")) cfg.sim = parse_sim(doc["sim"], cfg.sim);
  if (!doc.contains("input")) fail("simulate.input is required");
  const json& input = doc["input"];
  expect_keys(input, "input",
              {"kind", "amplitude_v", "width_s", "peak_pos_v", "peak_neg_v",
               "period_s"});
  const std::string kind = string_at(input, "input", "kind", "");
  if (kind == "zero") {
    cfg.input = InputProfile::zero();
  } else if (kind == "constant") {
    cfg.input = InputProfile::constant(number_at(input, "input", "amplitude_v", 0.0));
  } else if (kind == "pulse") {
    cfg.input = InputProfile::pulse(number_at(input, "input", "amplitude_v", 0.0),
                                    number_at(input, "input", "width_s", 0.0));
  } else if (kind == "triangle") {
    cfg.input = InputProfile::triangle(
        number_at(input, "input", "peak_pos_v", 0.0),
        number_at(input, "input", "peak_neg_v", 0.0),
        number_at(input, "input", "period_s", 0.0));
  } else {
    fail("input.kind must be zero|constant|pulse|triangle");
  }
  if (doc.contains("disturbance")) cfg.disturbance = parse_disturbance(doc["disturbance"]);
  if (doc.contains("decimation")) {
    if (!doc["decimation"].is_number_unsigned() || doc["decimation"].get<std::uint64_t>() == 0) {
      fail("decimation must be a positive integer");
    }
    cfg.decimation = doc["decimation"].get<std::size_t>();
  }
  cfg.out_name = string_at(doc, "simulate", "out_name", cfg.out_name);
  return cfg;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void override_seed(ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.disturbance.seed = seed;
}

}  // namespace piezosim
