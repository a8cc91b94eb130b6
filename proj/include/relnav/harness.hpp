#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "relnav/config.hpp"

namespace relnav {

inline constexpr int kStateDim = 12;
inline constexpr std::array<const char*, kStateDim> kComponentNames = {
    "x", "y", "z", "vx", "vy", "vz", "p1", "p2", "p3", "wx", "wy", "wz"};

/// Truth samples at the filter epochs.
struct TruthTrajectory {
  std::vector<double> times;
  std::vector<FullState12> states;
  std::vector<ChaserOrbitState> chaser;
  /// Noiseless positions of all eight markers in the chaser frame.
  std::vector<std::array<Eigen::Vector3d, kMarkerCount>> markers;
  std::vector<VisibilityMask> visibility;

  [[nodiscard]] std::size_t size() const { return times.size(); }
};

/// Estimation errors of one filter run.
///
/// `error` uses the relative-rotation MRP MRP(Gamma_est Gamma_true^T) for the
/// attitude block, and `sigma3` the matching 3-sigma bound obtained by mapping
/// the MRP covariance through the kinematic matrix at the estimate. The
/// `component_*` arrays are plain componentwise differences against the
/// filter's own 3 sqrt(diag P).
struct RunRecord {
  std::uint64_t seed = 0;
  std::vector<double> times;
  std::vector<FullState12> mean;
  std::vector<FullState12> cov_diagonal;
  std::vector<FullState12> truth;
  std::vector<FullState12> error;
  std::vector<FullState12> sigma3;
  std::vector<FullState12> component_error;
  std::vector<FullState12> component_sigma3;
  std::vector<int> markers_used;  // -1 at epoch 0
  bool diverged = false;
  int diverged_epoch = -1;

  [[nodiscard]] std::size_t size() const { return times.size(); }
};

/// RKF45 truth propagation of the chaser and relative state, with the MRP
/// shadow switch applied at every sample.
TruthTrajectory simulate_truth(const ScenarioConfig& cfg);

/// One filter run against `truth`; `seed` drives both the initial estimate
/// perturbation and the measurement noise.
RunRecord run_single(const ScenarioConfig& cfg, const TruthTrajectory& truth, std::uint64_t seed);

/// Error and 3-sigma rows for one epoch (exposed for testing).
void record_errors(const FullState12& mean, const Eigen::MatrixXd& cov, const FullState12& truth,
                   FullState12& error, FullState12& sigma3, FullState12& component_error,
                   FullState12& component_sigma3);

/// Runs seeds cfg.seed + 0 ... cfg.seed + runs - 1, concurrently when
/// cfg.threads allows. Output order is always by run index.
std::vector<RunRecord> run_monte_carlo_records(const ScenarioConfig& cfg, const TruthTrajectory& truth);

}  // namespace relnav
