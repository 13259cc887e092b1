#include "piezosim/sysid.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "piezosim/csv.hpp"
#include "piezosim/numeric.hpp"

namespace piezosim::sysid {

void PulseDataset::validate() const {
  for (const auto& row : rows) {
    if (row.v_steady == 0.0) {
      throw std::invalid_argument("pulse dataset rows need a nonzero steady velocity");
    }
    if (row.direction != static_cast<int>(sgn(row.v_steady))) {
      throw std::invalid_argument("pulse dataset row direction must match sgn(v_steady)");
    }
  }
}

PulseDataset PulseDataset::from_rows(const std::vector<std::pair<double, double>>& uv) {
  PulseDataset data;
  data.rows.reserve(uv.size());
  for (const auto& [u, v] : uv) {
    data.rows.push_back({u, v, static_cast<int>(sgn(v))});
  }
  data.validate();
  return data;
}

PulseDataset PulseDataset::from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open dataset file: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("empty dataset file: " + path.string());
  }
  if (line != "u_volts,v_steady") {
    throw std::invalid_argument("dataset header must be `u_volts,v_steady`: " +
                                path.string());
  }
  std::vector<std::pair<double, double>> uv;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    double u = 0.0, v = 0.0;
    char comma = 0;
    if (!(ss >> u >> comma >> v) || comma != ',') {
      throw std::invalid_argument("bad dataset row at " + path.string() + ":" +
                                  std::to_string(line_no));
    }
    uv.emplace_back(u, v);
  }
  return from_rows(uv);
}

LsSystem build_ls_system(const PulseDataset& data, double alpha3) {
  data.validate();
  if (!(alpha3 > 0.0)) throw std::invalid_argument("alpha3 must be > 0");

  std::size_t n_pos = 0, n_neg = 0;
  for (const auto& row : data.rows) (row.direction > 0 ? n_pos : n_neg)++;
  if (n_pos < 2 || n_neg < 2) {
    throw std::invalid_argument(
        "identification needs >= 2 rows per direction (got " +
        std::to_string(n_pos) + " positive, " + std::to_string(n_neg) +
        " negative)");
  }

  LsSystem sys;
  sys.X.reserve(data.rows.size());
  sys.Y.reserve(data.rows.size());
  for (const auto& row : data.rows) {
    if (row.direction > 0) {
      sys.X.push_back({row.v_steady, 0.0, 1.0, 0.0});
      sys.Y.push_back(alpha3 * row.u_volts);
    } else {
      sys.X.push_back({0.0, std::abs(row.v_steady), 0.0, 1.0});
      sys.Y.push_back(alpha3 * std::abs(row.u_volts));
    }
  }
  return sys;
}

FitResult solve_ls(const LsSystem& sys) {
  const auto rows = static_cast<Eigen::Index>(sys.X.size());
  if (rows < 4 || sys.Y.size() != sys.X.size()) {
    throw std::invalid_argument("least-squares system needs >= 4 consistent rows");
  }
  Eigen::MatrixXd X(rows, 4);
  Eigen::VectorXd Y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) X(i, j) = sys.X[i][j];
    Y(i) = sys.Y[i];
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  const double condition = smin > 0.0 ? smax / smin
                                      : std::numeric_limits<double>::infinity();
  if (!(condition < 1e8)) {
    std::ostringstream msg;
    msg << "ill-conditioned identification system (condition ~ " << condition << ")";
    throw std::invalid_argument(msg.str());
  }

  const Eigen::VectorXd A = svd.solve(Y);
  FitResult fit;
  fit.alpha1_pos = A(0);
  fit.alpha1_neg = A(1);
  fit.alpha2_pos = A(2);
  fit.alpha2_neg = A(3);
  fit.condition = condition;
  fit.residual_inf = (X * A - Y).cwiseAbs().maxCoeff();
  return fit;
}

double steady_state_from_trace(const Trace& trace, double window) {
  if (trace.size() < 2) throw std::invalid_argument("trace too short for plateau extraction");
  if (!(window > 0.0)) throw std::invalid_argument("plateau window must be > 0");
  const double dt = trace.t[1] - trace.t[0];
  const auto want = static_cast<std::size_t>(std::llround(window / dt));
  if (want < 2) throw std::invalid_argument("plateau window spans < 2 samples");

  // Plateau segment: the last maximal constant-input run with nonzero drive,
  // skipping any post-pulse zero tail (all-zero traces keep the full span).
  std::size_t end = trace.size();
  while (end > 1 && trace.u[end - 1] == 0.0) --end;
  if (trace.u[end - 1] == 0.0) end = trace.size();
  std::size_t begin = end - 1;
  const double u_level = trace.u[end - 1];
  while (begin > 0 && trace.u[begin - 1] == u_level) --begin;
  if (end - begin < want) {
    throw std::invalid_argument("constant-input segment shorter than the plateau window");
  }

  const std::size_t first = end - want;
  double mean = 0.0;
  for (std::size_t i = first; i < end; ++i) mean += trace.v[i];
  mean /= static_cast<double>(want);
  double var = 0.0;
  for (std::size_t i = first; i < end; ++i) {
    const double dv = trace.v[i] - mean;
    var += dv * dv;
  }
  const double stddev = std::sqrt(var / static_cast<double>(want));

  if (stddev > 0.05 * std::abs(mean)) {
    std::ostringstream msg;
    msg << "unsettled plateau: std/|mean| = "
        << (std::abs(mean) > 0.0 ? stddev / std::abs(mean)
                                 : std::numeric_limits<double>::infinity())
        << " exceeds 0.05";
    throw std::runtime_error(msg.str());
  }
  return mean;
}

PlantParams to_plant_params(const FitResult& fit, const PlantParams& base) {
  PlantParams p = base;
  p.alpha1_pos = fit.alpha1_pos;
  p.alpha1_neg = fit.alpha1_neg;
  p.alpha2_pos = fit.alpha2_pos;
  p.alpha2_neg_base = fit.alpha2_neg - 1.0;
  p.validate();
  return p;
}

ValidationMetrics validate_model(const PlantParams& params,
                                 const InputProfile& u_profile,
                                 const Trace& reference, const SimConfig& cfg) {
  const Trace run = simulate(u_profile, cfg, params);
  if (run.size() != reference.size()) {
    throw std::invalid_argument("reference trace time base does not match the run");
  }
  for (std::size_t i = 0; i < run.size(); ++i) {
    if (std::abs(run.t[i] - reference.t[i]) > 1e-12) {
      throw std::invalid_argument("reference trace time base does not match the run");
    }
  }
  ValidationMetrics m;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < run.size(); ++i) {
    const double err = run.v[i] - reference.v[i];
    sum_sq += err * err;
    m.max_velocity_error = std::max(m.max_velocity_error, std::abs(err));
  }
  m.rms_velocity_error = std::sqrt(sum_sq / static_cast<double>(run.size()));
  return m;
}

void write_params_file(const std::filesystem::path& path, const PlantParams& p,
                       const FitResult* fit) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write params file: " + path.string());
  out << "# piezo stage model parameters\n";
  if (fit != nullptr) {
    out << "# least-squares fit: condition " << format_sig(fit->condition)
        << ", residual_inf " << format_sig(fit->residual_inf) << "\n";
  }
  out << "alpha1_pos: " << format_sig(p.alpha1_pos) << "\n"
      << "alpha1_neg: " << format_sig(p.alpha1_neg) << "\n"
      << "alpha2_pos: " << format_sig(p.alpha2_pos) << "\n"
      << "alpha2_neg: " << format_sig(p.alpha2_neg_settled()) << "\n"
      << "alpha2n_rate: " << format_sig(p.alpha2n_rate) << "\n"
      << "alpha3: " << format_sig(p.alpha3) << "\n"
      << "alpha_s_cap: " << format_sig(p.alpha_s_cap) << "\n"
      << "tau_s: " << format_sig(p.tau) << "\n"
      << "v_cr_m_s: " << format_sig(p.v_cr) << "\n";
  if (!out) throw std::runtime_error("failed writing params file: " + path.string());
}

PlantParams read_params_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open params file: " + path.string());
  std::map<std::string, double> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("bad params line at " + path.string() + ":" +
                                  std::to_string(line_no));
    }
    const std::string key = line.substr(0, colon);
    try {
      kv[key] = std::stod(line.substr(colon + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad params value at " + path.string() + ":" +
                                  std::to_string(line_no));
    }
  }
  PlantParams p;
  auto take = [&kv](const char* key, double& field) {
    if (auto it = kv.find(key); it != kv.end()) field = it->second;
  };
  take("alpha1_pos", p.alpha1_pos);
  take("alpha1_neg", p.alpha1_neg);
  take("alpha2_pos", p.alpha2_pos);
  if (auto it = kv.find("alpha2_neg"); it != kv.end()) {
    p.alpha2_neg_base = it->second - 1.0;
  }
  take("alpha2n_rate", p.alpha2n_rate);
  take("alpha3", p.alpha3);
  take("alpha_s_cap", p.alpha_s_cap);
  take("tau_s", p.tau);
  take("v_cr_m_s", p.v_cr);
  p.validate();
  return p;
}

}  // namespace piezosim::sysid
