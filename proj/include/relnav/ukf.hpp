#pragma once

#include <functional>

#include <Eigen/Dense>

#include "relnav/dynamics.hpp"
#include "relnav/measurement.hpp"

namespace relnav {

/// Scaled unscented transform parameters. lambda = alpha^2 (L + kappa) - L.
struct UkfParams {
  double alpha = 1.0;
  double beta = 2.0;
  double kappa = 0.0;
  int dimension = 12;
  /// Redraw sigma points from the predicted estimate before the update.
  bool regenerate_sigma_points = true;

  [[nodiscard]] double lambda() const {
    return alpha * alpha * (dimension + kappa) - dimension;
  }
  [[nodiscard]] int sigma_count() const { return 2 * dimension + 1; }
};

struct SigmaWeights {
  Eigen::VectorXd mean;
  Eigen::VectorXd cov;
};

/// Throws DomainError when L + lambda == 0.
SigmaWeights compute_weights(const UkfParams& params);

struct GaussianEstimate {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Columns are the 2L + 1 sigma points; column 0 is the mean.
struct SigmaPointSet {
  Eigen::MatrixXd points;
};

/// Lower-triangular Cholesky factor of `p`. On failure a diagonal jitter of
/// 1e-12 trace(p) / n (growing tenfold per attempt) is added, up to three
/// retries. An exactly zero matrix has a zero factor.
/// Throws FactorizationError when the retries are exhausted.
Eigen::MatrixXd covariance_square_root(const Eigen::MatrixXd& p);

SigmaPointSet generate_sigma_points(const GaussianEstimate& est, const UkfParams& params);

/// Weighted mean and covariance of a sigma-point set.
GaussianEstimate sigma_point_moments(const SigmaPointSet& set, const SigmaWeights& w);

using TransitionFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using MeasurementFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct Prediction {
  GaussianEstimate estimate;
  SigmaPointSet propagated;
};

struct UpdateTerms {
  Eigen::VectorXd z_hat;
  Eigen::MatrixXd s;  // innovation covariance
  Eigen::MatrixXd t;  // state/measurement cross covariance
  Eigen::MatrixXd k;  // gain
};

struct UpdateResult {
  GaussianEstimate estimate;
  UpdateTerms terms;
};

/// Propagates every sigma point through `f` and recombines. `process_noise`
/// may be empty (treated as zero).
Prediction unscented_predict(const GaussianEstimate& est, const UkfParams& params,
                             const TransitionFunction& f,
                             const Eigen::MatrixXd& process_noise = {});

/// Linear measurement update with measurement function `h` and noise `r`.
/// An empty `z` returns the prediction unchanged.
/// Throws SingularMatrixError if the innovation covariance cannot be factored.
UpdateResult unscented_update(const Prediction& pred, const Eigen::VectorXd& z,
                              const Eigen::MatrixXd& r, const MeasurementFunction& h,
                              const UkfParams& params);

/// Everything the relative-pose filter needs besides the estimate itself.
struct FilterModel {
  DynamicsModel dynamics;
  MarkerSet markers{BodyGeometry{}};
  NoiseModel noise;
  UkfParams params;
  Eigen::MatrixXd process_noise;  // 12x12 or empty for zero
};

/// Propagates the sigma points over [t, t + dt] with the decoupled RK4
/// model. Sigma points keep their MRP leaf during propagation.
Prediction ukf_predict(const GaussianEstimate& est, const UkfParams& params, double t, double dt,
                       const ChaserOrbitState& chaser, const DynamicsModel& dynamics,
                       const Eigen::MatrixXd& process_noise = {});

/// Marker update over the markers in `z.mask`; the posterior attitude is
/// mapped to the shadow set when |p| > 1.
UpdateResult ukf_update(const Prediction& pred, const MeasurementVector& z,
                        const MarkerSet& markers, const NoiseModel& noise, const UkfParams& params);

/// Maps the mean MRP to its shadow set when |p| > 1, carrying the covariance
/// through the first-order Jacobian of the switch. Returns true on a switch.
bool normalize_attitude(GaussianEstimate& est);

struct StepResult {
  GaussianEstimate estimate;
  VisibilityMask predicted_mask;  // visibility expected from the predicted mean
  VisibilityMask used_mask;       // markers actually fused
};

/// Predict to t + dt, predict the visible set from the predicted mean and
/// fuse the measured markers that are also predicted visible.
StepResult ukf_step(const GaussianEstimate& est, const MeasurementVector& z, double t, double dt,
                    const ChaserOrbitState& chaser, const FilterModel& model);

}  // namespace relnav
