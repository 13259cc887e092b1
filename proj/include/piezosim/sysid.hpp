#pragma once

// Friction-parameter identification from pulse-response plateaus: regressor
// assembly, least-squares solve, plateau extraction, and model validation.

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "piezosim/plant.hpp"

namespace piezosim::sysid {

struct PulseRow {
  double u_volts = 0.0;
  double v_steady = 0.0;
  int direction = 0;  // sgn(v_steady)
};

struct PulseDataset {
  std::vector<PulseRow> rows;

  // Throws if any row has v_steady == 0 or direction != sgn(v_steady).
  void validate() const;
  static PulseDataset from_rows(const std::vector<std::pair<double, double>>& uv);
  // CSV with header `u_volts,v_steady`.
  static PulseDataset from_csv(const std::filesystem::path& path);
};

struct LsSystem {
  // Columns ordered [alpha1_pos, alpha1_neg, alpha2_pos, alpha2_neg]; each
  // row has one alpha1 and one alpha2 entry for its direction. Y = alpha3*u
  // magnitudes with the direction folded in per the balance equations.
  std::vector<std::array<double, 4>> X;
  std::vector<double> Y;
};

// Steady-velocity force balance per row: positive rows
// v*alpha1_pos + alpha2_pos = alpha3*u; negative rows
// |v|*alpha1_neg + alpha2_neg = alpha3*|u| (all four unknowns positive).
// Requires >= 2 rows in each direction.
LsSystem build_ls_system(const PulseDataset& data, double alpha3);

struct FitResult {
  double alpha1_pos = 0.0;
  double alpha1_neg = 0.0;
  double alpha2_pos = 0.0;
  double alpha2_neg = 0.0;  // settled value (held-input branch)
  double condition = 0.0;    // condition number of X
  double residual_inf = 0.0; // max |X*A - Y|
};

// Minimizer of ||X*A - Y||_2 via SVD; rejects condition numbers above 1e8.
FitResult solve_ls(const LsSystem& sys);

// Mean velocity over the last `window` seconds of the final constant-input
// plateau; throws if the plateau has not settled (std > 5% of |mean|).
double steady_state_from_trace(const Trace& trace, double window);

// Fitted coefficients folded into a params struct; the remaining constants
// (rates, caps, delay) keep `base`'s values.
PlantParams to_plant_params(const FitResult& fit, const PlantParams& base = {});

struct ValidationMetrics {
  double rms_velocity_error = 0.0;
  double max_velocity_error = 0.0;
};

// Simulates `params` under `u_profile` and reports velocity-domain deviation
// from `reference` (which must share dt and duration).
ValidationMetrics validate_model(const PlantParams& params,
                                 const InputProfile& u_profile,
                                 const Trace& reference, const SimConfig& cfg);

// key: value parameter document, shared with the experiment configs.
void write_params_file(const std::filesystem::path& path, const PlantParams& p,
                       const FitResult* fit = nullptr);
PlantParams read_params_file(const std::filesystem::path& path);

}  // namespace piezosim::sysid
