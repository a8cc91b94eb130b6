#include "relnav/ukf.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "relnav/errors.hpp"

namespace relnav {

SigmaWeights compute_weights(const UkfParams& params) {
  if (!(params.alpha > 0.0) || params.dimension <= 0) {
    throw DomainError("UKF requires alpha > 0 and a positive dimension");
  }
  const double n = params.dimension;
  const double lambda = params.lambda();
  const double scale = n + lambda;
  if (scale == 0.0) {
    throw DomainError("UKF parameters give L + lambda = 0");
  }
  SigmaWeights w;
  w.mean = Eigen::VectorXd::Constant(params.sigma_count(), 1.0 / (2.0 * scale));
  w.cov = w.mean;
  w.mean(0) = lambda / scale;
  w.cov(0) = lambda / scale + (1.0 - params.alpha * params.alpha + params.beta);
  return w;
}

Eigen::MatrixXd covariance_square_root(const Eigen::MatrixXd& p) {
  const auto n = p.rows();
  if (p.isZero(0.0)) {
    return Eigen::MatrixXd::Zero(n, n);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(p);
  if (llt.info() == Eigen::Success) {
    return llt.matrixL();
  }
  double jitter = 1e-12 * std::abs(p.trace()) / static_cast<double>(n);
  for (int attempt = 0; attempt < 3; ++attempt) {
    Eigen::MatrixXd q = p;
    q.diagonal().array() += jitter;
    llt.compute(q);
    if (llt.info() == Eigen::Success) {
      return llt.matrixL();
    }
    jitter *= 10.0;
  }
  throw FactorizationError("covariance is not positive definite after jitter");
}

SigmaPointSet generate_sigma_points(const GaussianEstimate& est, const UkfParams& params) {
  const int n = params.dimension;
  if (est.mean.size() != n || est.cov.rows() != n || est.cov.cols() != n) {
    throw DimensionMismatchError("estimate dimension does not match UKF parameters");
  }
  const double scale = n + params.lambda();
  if (!(scale > 0.0)) {
    throw DomainError("UKF requires L + lambda > 0 to form sigma points");
  }
  const Eigen::MatrixXd root = std::sqrt(scale) * covariance_square_root(est.cov);
  SigmaPointSet set;
  set.points.resize(n, params.sigma_count());
  set.points.col(0) = est.mean;
  for (int i = 0; i < n; ++i) {
    set.points.col(1 + i) = est.mean + root.col(i);
    set.points.col(1 + n + i) = est.mean - root.col(i);
  }
  return set;
}

GaussianEstimate sigma_point_moments(const SigmaPointSet& set, const SigmaWeights& w) {
  // Accumulating offsets from the centre point keeps a collapsed set exact.
  const Eigen::VectorXd centre = set.points.col(0);
  GaussianEstimate out;
  out.mean = centre + (set.points.colwise() - centre) * w.mean;
  const Eigen::MatrixXd dev = set.points.colwise() - out.mean;
  out.cov = dev * w.cov.asDiagonal() * dev.transpose();
  return out;
}

Prediction unscented_predict(const GaussianEstimate& est, const UkfParams& params,
                             const TransitionFunction& f, const Eigen::MatrixXd& process_noise) {
  const SigmaWeights w = compute_weights(params);
  const SigmaPointSet prior = generate_sigma_points(est, params);

  Prediction pred;
  pred.propagated.points.resize(prior.points.rows(), prior.points.cols());
  for (Eigen::Index i = 0; i < prior.points.cols(); ++i) {
    pred.propagated.points.col(i) = f(prior.points.col(i));
  }
  pred.estimate = sigma_point_moments(pred.propagated, w);
  if (process_noise.size() > 0) {
    pred.estimate.cov += process_noise;
  }
  return pred;
}

UpdateResult unscented_update(const Prediction& pred, const Eigen::VectorXd& z,
                              const Eigen::MatrixXd& r, const MeasurementFunction& h,
                              const UkfParams& params) {
  UpdateResult out;
  out.estimate = pred.estimate;
  if (z.size() == 0) {
    return out;
  }
  if (r.rows() != z.size() || r.cols() != z.size()) {
    throw DimensionMismatchError("measurement noise does not match measurement length");
  }

  const SigmaWeights w = compute_weights(params);
  const SigmaPointSet set = params.regenerate_sigma_points
                                ? generate_sigma_points(pred.estimate, params)
                                : pred.propagated;
  const Eigen::VectorXd& x_hat = pred.estimate.mean;

  Eigen::MatrixXd gamma(z.size(), set.points.cols());
  for (Eigen::Index i = 0; i < set.points.cols(); ++i) {
    const Eigen::VectorXd zi = h(set.points.col(i));
    if (zi.size() != z.size()) {
      throw DimensionMismatchError("measurement function output does not match measurement");
    }
    gamma.col(i) = zi;
  }

  UpdateTerms& terms = out.terms;
  terms.z_hat = gamma.col(0) + (gamma.colwise() - Eigen::VectorXd(gamma.col(0))) * w.mean;
  const Eigen::MatrixXd dz = gamma.colwise() - terms.z_hat;
  const Eigen::MatrixXd dx = set.points.colwise() - x_hat;
  terms.s = dz * w.cov.asDiagonal() * dz.transpose() + r;
  terms.s = 0.5 * (terms.s + terms.s.transpose()).eval();
  terms.t = dx * w.cov.asDiagonal() * dz.transpose();

  const Eigen::LLT<Eigen::MatrixXd> llt(terms.s);
  if (llt.info() != Eigen::Success) {
    throw SingularMatrixError("innovation covariance is not positive definite");
  }
  terms.k = llt.solve(terms.t.transpose()).transpose();

  out.estimate.mean = x_hat + terms.k * (z - terms.z_hat);
  out.estimate.cov = pred.estimate.cov - terms.k * terms.s * terms.k.transpose();
  out.estimate.cov = 0.5 * (out.estimate.cov + out.estimate.cov.transpose()).eval();
  return out;
}

Prediction ukf_predict(const GaussianEstimate& est, const UkfParams& params, double t, double dt,
                       const ChaserOrbitState& chaser, const DynamicsModel& dynamics,
                       const Eigen::MatrixXd& process_noise) {
  const auto f = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const FullState12 s = x;
    return propagate_full_state(s, chaser, dynamics, t, dt, ShadowPolicy::kKeep).state;
  };
  return unscented_predict(est, params, f, process_noise);
}

bool normalize_attitude(GaussianEstimate& est) {
  const Eigen::Vector3d p = est.mean.segment<3>(6);
  if (p.squaredNorm() <= 1.0) {
    return false;
  }
  Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(est.mean.size(), est.mean.size());
  jac.block<3, 3>(6, 6) = shadow_jacobian(p);
  est.mean.segment<3>(6) = Mrp(p).shadow().p;
  est.cov = jac * est.cov * jac.transpose();
  est.cov = 0.5 * (est.cov + est.cov.transpose()).eval();
  return true;
}

UpdateResult ukf_update(const Prediction& pred, const MeasurementVector& z,
                        const MarkerSet& markers, const NoiseModel& noise, const UkfParams& params) {
  if (z.z.size() != 3 * z.marker_count()) {
    throw DimensionMismatchError("measurement length must be 3 x visible markers");
  }
  if (z.empty()) {
    UpdateResult out;
    out.estimate = pred.estimate;
    normalize_attitude(out.estimate);
    return out;
  }
  if (!(noise.sigma > 0.0)) {
    throw DomainError("measurement update requires sigma > 0");
  }
  const auto h = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const FullState12 s = x;
    return predict_measurement(s, z.mask, markers).z;
  };
  UpdateResult out =
      unscented_update(pred, z.z, noise.covariance(static_cast<int>(z.z.size())), h, params);
  normalize_attitude(out.estimate);
  return out;
}

StepResult ukf_step(const GaussianEstimate& est, const MeasurementVector& z, double t, double dt,
                    const ChaserOrbitState& chaser, const FilterModel& model) {
  const Prediction pred = ukf_predict(est, model.params, t, dt, chaser, model.dynamics,
                                      model.process_noise);
  StepResult out;
  out.predicted_mask = marker_visibility(FullState12(pred.estimate.mean), model.markers);
  out.used_mask = out.predicted_mask & z.mask;
  const MeasurementVector used = select_markers(z, out.used_mask);
  out.estimate = ukf_update(pred, used, model.markers, model.noise, model.params).estimate;
  return out;
}

}  // namespace relnav
