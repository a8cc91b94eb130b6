#include "relnav/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "relnav/errors.hpp"
#include "relnav/integrators.hpp"

namespace relnav {

TruthTrajectory simulate_truth(const ScenarioConfig& cfg) {
  const DynamicsModel model = cfg.dynamics_model();
  const MarkerSet markers(cfg.geometry);
  const int n = cfg.epoch_count();

  TruthTrajectory truth;
  truth.times.resize(n);
  for (int k = 0; k < n; ++k) {
    truth.times[k] = k / cfg.filter_hz;
  }

  FullState12 initial = cfg.initial_truth;
  normalize_mrp_block(initial);

  const DerivativeFunction f = [&model](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return stacked_derivs(model, t, StackedState(x));
  };
  const SampleHook shadow = [](double, Eigen::VectorXd& x) {
    const Eigen::Vector3d p = x.segment<3>(10);
    if (p.squaredNorm() > 1.0) {
      x.segment<3>(10) = Mrp(p).shadow().p;
    }
  };
  Rkf45Options opts;
  opts.rel_tol = cfg.truth_rel_tol;
  opts.abs_tol = cfg.truth_abs_tol;
  const Rkf45Result result =
      rkf45_integrate(f, stack(cfg.initial_chaser(), initial), 0.0, truth.times, opts, shadow);

  truth.states.reserve(n);
  truth.chaser.reserve(n);
  for (const Eigen::VectorXd& s : result.samples) {
    truth.chaser.push_back(ChaserOrbitState::from_vector(s.head<4>()));
    const FullState12 x = s.tail<12>();
    truth.states.push_back(x);
    truth.markers.push_back(marker_positions_chaser_frame(Mrp(x.segment<3>(6)), chaser_offset(x), markers));
    VisibilityMask visible;
    try {
      visible = marker_visibility(x, markers);
    } catch (const DegeneratePoseError&) {
      // Chaser inside the body: nothing is observable.
    }
    truth.visibility.push_back(visible);
  }
  return truth;
}

void record_errors(const FullState12& mean, const Eigen::MatrixXd& cov, const FullState12& truth,
                   FullState12& error, FullState12& sigma3, FullState12& component_error,
                   FullState12& component_sigma3) {
  const Eigen::Vector3d p_est = mean.segment<3>(6);
  const Eigen::Vector3d p_true = truth.segment<3>(6);

  component_error = mean - truth;
  if (p_true.squaredNorm() > 0.0) {
    const Eigen::Vector3d alt = Mrp(p_true).shadow().p;
    if ((p_est - alt).norm() < (p_est - p_true).norm()) {
      component_error.segment<3>(6) = p_est - alt;
    }
  }
  component_sigma3 = 3.0 * cov.diagonal().cwiseMax(0.0).cwiseSqrt();

  error = mean - truth;
  error.segment<3>(6) = relative_mrp(Mrp(p_est), Mrp(p_true)).p;

  // The relative-rotation MRP moves as B(p)^-1 dp for a perturbation dp of the estimate.
  const Eigen::Matrix3d b_inv = mrp_kinematic_matrix(p_est).inverse();
  const Eigen::Matrix3d p_att = b_inv * cov.block<3, 3>(6, 6) * b_inv.transpose();
  sigma3 = component_sigma3;
  sigma3.segment<3>(6) = 3.0 * p_att.diagonal().cwiseMax(0.0).cwiseSqrt();
}

namespace {

void push_epoch(RunRecord& rec, double t, const GaussianEstimate& est, const FullState12& truth,
                int markers_used) {
  FullState12 error, sigma3, component_error, component_sigma3;
  const FullState12 mean = est.mean;
  record_errors(mean, est.cov, truth, error, sigma3, component_error, component_sigma3);
  rec.times.push_back(t);
  rec.mean.push_back(mean);
  rec.cov_diagonal.push_back(est.cov.diagonal());
  rec.truth.push_back(truth);
  rec.error.push_back(error);
  rec.sigma3.push_back(sigma3);
  rec.component_error.push_back(component_error);
  rec.component_sigma3.push_back(component_sigma3);
  rec.markers_used.push_back(markers_used);
}

void push_diverged(RunRecord& rec, double t, const FullState12& truth) {
  const FullState12 nan = FullState12::Constant(std::numeric_limits<double>::quiet_NaN());
  rec.times.push_back(t);
  rec.mean.push_back(nan);
  rec.cov_diagonal.push_back(nan);
  rec.truth.push_back(truth);
  rec.error.push_back(nan);
  rec.sigma3.push_back(nan);
  rec.component_error.push_back(nan);
  rec.component_sigma3.push_back(nan);
  rec.markers_used.push_back(0);
}

bool finite(const GaussianEstimate& est) { return est.mean.allFinite() && est.cov.allFinite(); }

}  // namespace

RunRecord run_single(const ScenarioConfig& cfg, const TruthTrajectory& truth, std::uint64_t seed) {
  if (truth.size() < 1) {
    throw DomainError("truth trajectory is empty");
  }
  const FilterModel model = cfg.filter_model();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  GaussianEstimate est;
  FullState12 mean0 = truth.states[0];
  if (cfg.perturb_initial_estimate) {
    for (int i = 0; i < kStateDim; ++i) {
      mean0(i) += cfg.initial_sigma(i) * normal(rng);
    }
  }
  est.mean = mean0;
  est.cov = cfg.initial_covariance();
  normalize_attitude(est);

  RunRecord rec;
  rec.seed = seed;
  push_epoch(rec, truth.times[0], est, truth.states[0], -1);

  for (std::size_t k = 1; k < truth.size(); ++k) {
    if (rec.diverged) {
      push_diverged(rec, truth.times[k], truth.states[k]);
      continue;
    }
    MeasurementVector z = synthesize_measurement(truth.states[k], model.markers, cfg.noise, rng);
    if (cfg.marker_limit) {
      z = restrict_to_k_markers(z, *cfg.marker_limit);
    }
    const double t = truth.times[k - 1];
    const double dt = truth.times[k] - t;
    try {
      const StepResult step = ukf_step(est, z, t, dt, truth.chaser[k - 1], model);
      if (!finite(step.estimate)) {
        throw SingularMatrixError("non-finite estimate");
      }
      est = step.estimate;
      push_epoch(rec, truth.times[k], est, truth.states[k], static_cast<int>(step.used_mask.count()));
    } catch (const Error&) {
      rec.diverged = true;
      rec.diverged_epoch = static_cast<int>(k);
      push_diverged(rec, truth.times[k], truth.states[k]);
    }
  }
  return rec;
}

std::vector<RunRecord> run_monte_carlo_records(const ScenarioConfig& cfg, const TruthTrajectory& truth) {
  const int runs = cfg.runs;
  std::vector<RunRecord> records(runs);
  int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, runs);

  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int i = next.fetch_add(1); i < runs; i = next.fetch_add(1)) {
      records[i] = run_single(cfg, truth, cfg.seed + static_cast<std::uint64_t>(i));
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) {
      pool.emplace_back(worker);
    }
  }
  return records;
}

}  // namespace relnav
