#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "relnav/dynamics.hpp"
#include "relnav/measurement.hpp"
#include "relnav/ukf.hpp"

namespace relnav {

/// Complete description of a simulation / filtering scenario.
///
/// On disk this is a flat `key = value` file; vector values are comma
/// separated, `#` starts a comment. Every key carries its unit in the name.
struct ScenarioConfig {
  double mu = kEarthMu;  // mu_m3_s2

  double chaser_semi_major_axis = 7'150'000.0;  // chaser.semi_major_axis_m
  double chaser_eccentricity = 0.0;              // chaser.eccentricity
  double chaser_true_anomaly = 0.0;              // chaser.true_anomaly_rad

  /// truth.position_m, truth.velocity_m_s, truth.mrp, truth.omega_rad_s
  FullState12 initial_truth = default_initial_truth();
  /// estimate.sigma_position_m, estimate.sigma_velocity_m_s, estimate.sigma_mrp,
  /// estimate.sigma_omega_rad_s
  FullState12 initial_sigma = default_initial_sigma();
  /// estimate.perturb: draw the initial mean from N(truth, P0); otherwise start at truth.
  bool perturb_initial_estimate = true;

  Eigen::Vector3d inertia_diagonal{17023.3, 124825.7, 129112.2};  // target.inertia_kg_m2
  BodyGeometry geometry{Eigen::Vector3d(5.0, 1.4, 1.3),           // target.half_extents_m
                        Eigen::Vector3d(0.1, -0.05, 0.08)};       // target.com_offset_m

  NoiseModel noise;  // noise.sigma_m, noise.dropout_prob
  /// filter.measurement_sigma_m: noise std assumed by the filter ("same" when
  /// empty, i.e. equal to noise.sigma_m).
  std::optional<double> filter_sigma;

  std::optional<int> marker_limit;  // filter.marker_limit ("all" when empty)
  double filter_hz = 1.0;           // filter.hz
  UkfParams ukf;                    // filter.alpha, filter.beta, filter.kappa,
                                    // filter.regenerate_sigma_points
  FullState12 process_noise_diagonal = FullState12::Zero();  // filter.process_noise_diag

  double duration = 300.0;   // sim.duration_s
  int runs = 100;            // sim.runs
  std::uint64_t seed = 1;    // sim.seed
  int threads = 0;           // sim.threads, 0 = hardware concurrency
  double truth_rel_tol = 1e-12;  // sim.truth_rel_tol
  double truth_abs_tol = 1e-12;  // sim.truth_abs_tol

  [[nodiscard]] Eigen::MatrixXd initial_covariance() const;
  [[nodiscard]] double filter_period() const { return 1.0 / filter_hz; }
  /// Filter epochs including t = 0.
  [[nodiscard]] int epoch_count() const;
  [[nodiscard]] ChaserOrbitState initial_chaser() const;
  [[nodiscard]] DynamicsModel dynamics_model() const;
  [[nodiscard]] FilterModel filter_model() const;

  static FullState12 default_initial_truth();
  static FullState12 default_initial_sigma();
};

/// Throws ConfigError naming the offending field.
void validate(const ScenarioConfig& cfg);

/// Parses `text`; `source` is used in error messages. Missing keys keep their
/// defaults, unknown or duplicate keys are rejected.
ScenarioConfig parse_config(std::string_view text, const std::string& source = "<string>");
ScenarioConfig load_config(const std::filesystem::path& path);

/// Writes every key; parse_config(serialize_config(c)) reproduces c exactly.
std::string serialize_config(const ScenarioConfig& cfg);

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);

}  // namespace relnav
