#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "piezosim/plant.hpp"
#include "piezosim/sysid.hpp"

using namespace piezosim;
using namespace piezosim::sysid;

namespace {

const char* kDatasetPath = "data/pulse_dataset.csv";

// The pulse amplitudes of the identification campaign (V).
const std::vector<double> kAmplitudes = {1.3, 1.5,  1.6,  1.7,  2.0,
                                         -1.8, -2.0, -2.1, -2.3, -2.5};

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

Trace constant_trace(double v, double u, std::size_t n, double dt) {
  Trace tr;
  for (std::size_t i = 0; i < n; ++i) {
    tr.t.push_back(static_cast<double>(i) * dt);
    tr.y.push_back(v * static_cast<double>(i) * dt);
    tr.v.push_back(v);
    tr.u.push_back(u);
  }
  return tr;
}

}  // namespace

TEST_CASE("plateau extraction: synthetic constant trace") {
  const Trace tr = constant_trace(0.05, 1.0, 100, 1e-3);
  CHECK(steady_state_from_trace(tr, 0.05) == doctest::Approx(0.05));
}

TEST_CASE("plateau extraction: simulated pulse settles to the closed form") {
  const Trace tr = simulate(InputProfile::pulse(1.6, 0.4),
                            SimConfig{5e-5, 0.4, 10.0}, PlantParams{});
  CHECK(steady_state_from_trace(tr, 0.1) ==
        doctest::Approx(0.062468634452206136).epsilon(0.01));
}

TEST_CASE("plateau extraction: skips a post-pulse zero tail") {
  // Pulse ends at 0.4 s, trace runs to 0.6 s; the plateau is read from the
  // driven segment, not the decaying tail.
  const Trace tr = simulate(InputProfile::pulse(-2.3, 0.4),
                            SimConfig{5e-5, 0.6, 10.0}, PlantParams{});
  CHECK(steady_state_from_trace(tr, 0.1) ==
        doctest::Approx(-0.059571075282493946).epsilon(0.01));
}

TEST_CASE("plateau extraction: still-accelerating trace is flagged unsettled") {
  // A linear velocity ramp under constant input never settles.
  Trace tr;
  for (std::size_t i = 0; i < 100; ++i) {
    tr.t.push_back(static_cast<double>(i) * 1e-3);
    tr.y.push_back(0.0);
    tr.v.push_back(6e-4 * static_cast<double>(i));
    tr.u.push_back(1.6);
  }
  CHECK_THROWS_WITH_AS(steady_state_from_trace(tr, 0.05),
                       doctest::Contains("unsettled"), std::runtime_error);

  // The early rise of a real pulse response is likewise rejected.
  const Trace sim_tr = simulate(InputProfile::constant(1.6),
                                SimConfig{5e-5, 0.02, 10.0}, PlantParams{});
  CHECK_THROWS_WITH_AS(steady_state_from_trace(sim_tr, 0.015),
                       doctest::Contains("unsettled"), std::runtime_error);
}

TEST_CASE("plateau extraction: argument validation") {
  const Trace tr = constant_trace(0.05, 1.0, 100, 1e-3);
  CHECK_THROWS_AS(steady_state_from_trace(tr, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(steady_state_from_trace(tr, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(steady_state_from_trace(Trace{}, 0.1), std::invalid_argument);
}

TEST_CASE("regressor assembly follows the force-balance layout") {
  const PulseDataset data = PulseDataset::from_rows({{-2.3, -0.05562},
                                                     {-1.8, -0.03393},
                                                     {1.6, 0.06222},
                                                     {1.3, 0.04465}});
  const LsSystem sys = build_ls_system(data, 6.0);
  REQUIRE(sys.X.size() == 4);
  // Negative row: |v| in the alpha1_neg column, unit alpha2_neg, |u|-scaled Y.
  CHECK(sys.X[0] == std::array<double, 4>{0.0, 0.05562, 0.0, 1.0});
  CHECK(sys.Y[0] == doctest::Approx(13.8));
  // Positive row: v in the alpha1_pos column, unit alpha2_pos.
  CHECK(sys.X[2] == std::array<double, 4>{0.06222, 0.0, 1.0, 0.0});
  CHECK(sys.Y[2] == doctest::Approx(9.6));
}

TEST_CASE("regressor assembly needs both directions") {
  const PulseDataset only_pos =
      PulseDataset::from_rows({{1.6, 0.06222}, {1.3, 0.04465}});
  CHECK_THROWS_AS(build_ls_system(only_pos, 6.0), std::invalid_argument);
  const PulseDataset one_neg = PulseDataset::from_rows(
      {{1.6, 0.06222}, {1.3, 0.04465}, {-1.8, -0.03393}});
  CHECK_THROWS_AS(build_ls_system(one_neg, 6.0), std::invalid_argument);
  CHECK_THROWS_AS(build_ls_system(only_pos, 0.0), std::invalid_argument);
}

TEST_CASE("dataset validation") {
  PulseDataset bad;
  bad.rows.push_back({1.6, 0.0, 0});
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.rows[0] = {1.6, 0.06222, -1};  // direction contradicts the velocity
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("least squares reproduces the reference coefficients") {
  const PulseDataset data = PulseDataset::from_csv(kDatasetPath);
  REQUIRE(data.rows.size() == 10);
  const FitResult fit = solve_ls(build_ls_system(data, 6.0));
  CHECK(fit.alpha1_pos == doctest::Approx(104.0154).epsilon(1e-3));
  CHECK(fit.alpha1_neg == doctest::Approx(117.1441).epsilon(1e-3));
  CHECK(fit.alpha2_pos == doctest::Approx(3.1023).epsilon(1e-3));
  CHECK(fit.alpha2_neg == doctest::Approx(6.8216).epsilon(1e-3));
  CHECK(fit.condition < 1e3);
  // Frozen regression band for the measured-data misfit at the solution.
  CHECK(fit.residual_inf > 0.40);
  CHECK(fit.residual_inf < 0.50);
}

TEST_CASE("least squares recovers exactly consistent synthetic data") {
  // Rows generated from the closed-form balance with known coefficients.
  const double a1p = 100.0, a2p = 3.0, a1n = 120.0, a2n = 7.0;
  std::vector<std::pair<double, double>> rows;
  for (double u : {1.3, 1.5}) rows.emplace_back(u, (6.0 * u - a2p) / a1p);
  for (double u : {-2.0, -2.5})
    rows.emplace_back(u, (6.0 * u + a2n) / a1n);
  const FitResult fit =
      solve_ls(build_ls_system(PulseDataset::from_rows(rows), 6.0));
  CHECK(fit.alpha1_pos == doctest::Approx(a1p).epsilon(1e-9));
  CHECK(fit.alpha1_neg == doctest::Approx(a1n).epsilon(1e-9));
  CHECK(fit.alpha2_pos == doctest::Approx(a2p).epsilon(1e-9));
  CHECK(fit.alpha2_neg == doctest::Approx(a2n).epsilon(1e-9));
  CHECK(fit.residual_inf < 1e-9);
}

TEST_CASE("least squares is invariant to duplicating consistent rows") {
  const PulseDataset data = PulseDataset::from_csv(kDatasetPath);
  PulseDataset doubled = data;
  doubled.rows.insert(doubled.rows.end(), data.rows.begin(), data.rows.end());
  const FitResult base = solve_ls(build_ls_system(data, 6.0));
  const FitResult twice = solve_ls(build_ls_system(doubled, 6.0));
  CHECK(twice.alpha1_pos == doctest::Approx(base.alpha1_pos).epsilon(1e-9));
  CHECK(twice.alpha1_neg == doctest::Approx(base.alpha1_neg).epsilon(1e-9));
  CHECK(twice.alpha2_pos == doctest::Approx(base.alpha2_pos).epsilon(1e-9));
  CHECK(twice.alpha2_neg == doctest::Approx(base.alpha2_neg).epsilon(1e-9));
}

TEST_CASE("least squares rejects rank-deficient systems") {
  // One distinct operating point per direction: the 2x2 blocks are singular.
  const PulseDataset degenerate = PulseDataset::from_rows(
      {{1.5, 0.05}, {1.5, 0.05}, {-2.0, -0.05}, {-2.0, -0.05}});
  CHECK_THROWS_AS(solve_ls(build_ls_system(degenerate, 6.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_ls(LsSystem{}), std::invalid_argument);
}

TEST_CASE("scale equivariance of the least-squares solution") {
  // Scaling Y scales all four coefficients linearly (1000+ random factors).
  const PulseDataset data = PulseDataset::from_csv(kDatasetPath);
  const LsSystem sys = build_ls_system(data, 6.0);
  const FitResult base = solve_ls(sys);
  std::mt19937_64 rng(20240824);
  std::uniform_real_distribution<double> factor(0.1, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double c = factor(rng);
    LsSystem scaled = sys;
    for (double& y : scaled.Y) y *= c;
    const FitResult fit = solve_ls(scaled);
    CHECK(fit.alpha1_pos == doctest::Approx(c * base.alpha1_pos).epsilon(1e-9));
    CHECK(fit.alpha1_neg == doctest::Approx(c * base.alpha1_neg).epsilon(1e-9));
    CHECK(fit.alpha2_pos == doctest::Approx(c * base.alpha2_pos).epsilon(1e-9));
    CHECK(fit.alpha2_neg == doctest::Approx(c * base.alpha2_neg).epsilon(1e-9));
  }
}

TEST_CASE("round trip: simulate pulses, refit, recover the generator") {
  const PlantParams truth{};
  std::vector<std::pair<double, double>> rows;
  for (double u : kAmplitudes) {
    const Trace tr = simulate(InputProfile::constant(u),
                              SimConfig{5e-5, 0.5, 10.0}, truth);
    rows.emplace_back(u, steady_state_from_trace(tr, 0.1));
  }
  const FitResult fit =
      solve_ls(build_ls_system(PulseDataset::from_rows(rows), truth.alpha3));
  CHECK(fit.alpha1_pos == doctest::Approx(truth.alpha1_pos).epsilon(0.01));
  CHECK(fit.alpha1_neg == doctest::Approx(truth.alpha1_neg).epsilon(0.01));
  CHECK(fit.alpha2_pos == doctest::Approx(truth.alpha2_pos).epsilon(0.01));
  CHECK(fit.alpha2_neg ==
        doctest::Approx(truth.alpha2_neg_settled()).epsilon(0.01));
}

TEST_CASE("fit results fold into plant parameters") {
  FitResult fit;
  fit.alpha1_pos = 100.0;
  fit.alpha1_neg = 120.0;
  fit.alpha2_pos = 3.0;
  fit.alpha2_neg = 7.0;
  PlantParams base{};
  base.tau = 4e-3;
  const PlantParams p = to_plant_params(fit, base);
  CHECK(p.alpha1_pos == doctest::Approx(100.0));
  CHECK(p.alpha1_neg == doctest::Approx(120.0));
  CHECK(p.alpha2_pos == doctest::Approx(3.0));
  CHECK(p.alpha2_neg_settled() == doctest::Approx(7.0));
  CHECK(p.tau == doctest::Approx(4e-3));        // untouched base constant
  CHECK(p.v_cr == doctest::Approx(base.v_cr));  // untouched base constant
}

TEST_CASE("params file round trip") {
  const auto path = temp_file("piezosim_params_roundtrip.txt");
  const PlantParams p{};
  write_params_file(path, p);
  const PlantParams back = read_params_file(path);
  CHECK(back == p);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(read_params_file(temp_file("piezosim_params_missing.txt")),
                  std::invalid_argument);

  const auto bad = temp_file("piezosim_params_bad.txt");
  std::ofstream(bad) << "alpha1_pos no-colon-value\n";
  CHECK_THROWS_AS(read_params_file(bad), std::invalid_argument);
  std::filesystem::remove(bad);
}

TEST_CASE("model validation against a reference trace") {
  const PlantParams truth{};
  const InputProfile tri = InputProfile::triangle(1.5, -2.0, 6.0);
  const SimConfig cfg{5e-5, 1.0, 10.0};
  const Trace reference = simulate(tri, cfg, truth);

  // Self-consistency: the generating model has zero deviation.
  const ValidationMetrics self = validate_model(truth, tri, reference, cfg);
  CHECK(self.rms_velocity_error == 0.0);
  CHECK(self.max_velocity_error == 0.0);

  // A perturbed coefficient shows up as a positive, bounded deviation.
  PlantParams bent = truth;
  bent.alpha1_pos *= 1.05;
  const ValidationMetrics off = validate_model(bent, tri, reference, cfg);
  CHECK(off.rms_velocity_error > 0.0);
  CHECK(off.max_velocity_error >= off.rms_velocity_error);

  // Mismatched time base is rejected.
  const Trace short_ref = simulate(tri, SimConfig{5e-5, 0.5, 10.0}, truth);
  CHECK_THROWS_AS(validate_model(truth, tri, short_ref, cfg),
                  std::invalid_argument);
}

TEST_CASE("dataset CSV ingestion errors") {
  CHECK_THROWS_AS(PulseDataset::from_csv(temp_file("piezosim_no_such.csv")),
                  std::invalid_argument);

  const auto bad_header = temp_file("piezosim_bad_header.csv");
  std::ofstream(bad_header) << "volts,velocity\n1.6,0.06\n";
  CHECK_THROWS_AS(PulseDataset::from_csv(bad_header), std::invalid_argument);
  std::filesystem::remove(bad_header);

  const auto bad_row = temp_file("piezosim_bad_row.csv");
  std::ofstream(bad_row) << "u_volts,v_steady\n1.6,not-a-number\n";
  CHECK_THROWS_AS(PulseDataset::from_csv(bad_row), std::invalid_argument);
  std::filesystem::remove(bad_row);

  const auto empty = temp_file("piezosim_empty.csv");
  std::ofstream(empty) << "";
  CHECK_THROWS_AS(PulseDataset::from_csv(empty), std::invalid_argument);
  std::filesystem::remove(empty);
}
