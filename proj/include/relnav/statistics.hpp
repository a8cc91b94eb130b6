#pragma once

#include <span>
#include <vector>

#include "relnav/harness.hpp"

namespace relnav {

/// Per-epoch, per-component Monte Carlo statistics plus scalar metrics.
struct MonteCarloSummary {
  std::vector<double> times;
  std::vector<FullState12> sampled_sigma3;  // 3 x sample std over runs
  std::vector<FullState12> mean_cov_sigma3;  // mean over runs of 3 sqrt(diag P)
  std::vector<FullState12> rmse;
  std::vector<FullState12> containment;  // share of runs with |e| <= 3 sigma_cov

  int runs = 0;
  int diverged = 0;

  // Epoch averages per component.
  FullState12 containment_mean = FullState12::Zero();
  FullState12 sigma_ratio_mean = FullState12::Zero();  // sampled / covariance 3-sigma
  FullState12 rmse_mean = FullState12::Zero();

  // Per-run RMSE of |position error| and |attitude error| over the posterior
  // epochs (t > 0), one entry per non-diverged run.
  std::vector<double> position_rmse;
  std::vector<double> attitude_rmse;
  double position_rmse_median = 0.0;
  double attitude_rmse_median = 0.0;
};

/// Aggregates runs in index order; diverged runs are excluded from the
/// statistics but counted. Uses only `times`, `error`, `sigma3`, `diverged`.
MonteCarloSummary summarize(std::span<const RunRecord> records);

double mean(std::span<const double> v);
double sample_variance(std::span<const double> v);
double median(std::vector<double> v);

/// One-sided Welch t-test p-value for H1: mean(a) > mean(b).
double welch_greater_p_value(std::span<const double> a, std::span<const double> b);

}  // namespace relnav
