#include "relnav/integrators.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace relnav {

namespace {

// Fehlberg 4(5) tableau.
constexpr std::array<double, 6> kC = {0.0, 1.0 / 4.0, 3.0 / 8.0, 12.0 / 13.0, 1.0, 1.0 / 2.0};
constexpr double kA21 = 1.0 / 4.0;
constexpr double kA31 = 3.0 / 32.0, kA32 = 9.0 / 32.0;
constexpr double kA41 = 1932.0 / 2197.0, kA42 = -7200.0 / 2197.0, kA43 = 7296.0 / 2197.0;
constexpr double kA51 = 439.0 / 216.0, kA52 = -8.0, kA53 = 3680.0 / 513.0, kA54 = -845.0 / 4104.0;
constexpr double kA61 = -8.0 / 27.0, kA62 = 2.0, kA63 = -3544.0 / 2565.0, kA64 = 1859.0 / 4104.0,
                 kA65 = -11.0 / 40.0;
constexpr std::array<double, 6> kB5 = {16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0,
                                       -9.0 / 50.0, 2.0 / 55.0};
constexpr std::array<double, 6> kB4 = {25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0,
                                       -1.0 / 5.0, 0.0};

struct Trial {
  Eigen::VectorXd next;
  double error_norm;
};

Trial fehlberg_step(const DerivativeFunction& f, double t, const Eigen::VectorXd& x, double h,
                    const Rkf45Options& opts) {
  const Eigen::VectorXd k1 = f(t, x);
  const Eigen::VectorXd k2 = f(t + kC[1] * h, x + h * (kA21 * k1));
  const Eigen::VectorXd k3 = f(t + kC[2] * h, x + h * (kA31 * k1 + kA32 * k2));
  const Eigen::VectorXd k4 = f(t + kC[3] * h, x + h * (kA41 * k1 + kA42 * k2 + kA43 * k3));
  const Eigen::VectorXd k5 =
      f(t + kC[4] * h, x + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
  const Eigen::VectorXd k6 =
      f(t + kC[5] * h, x + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));

  Eigen::VectorXd next =
      x + h * (kB5[0] * k1 + kB5[2] * k3 + kB5[3] * k4 + kB5[4] * k5 + kB5[5] * k6);
  const Eigen::VectorXd err =
      h * ((kB5[0] - kB4[0]) * k1 + (kB5[2] - kB4[2]) * k3 + (kB5[3] - kB4[3]) * k4 +
           (kB5[4] - kB4[4]) * k5 + (kB5[5] - kB4[5]) * k6);

  double norm = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double scale = opts.abs_tol + opts.rel_tol * std::max(std::abs(x(i)), std::abs(next(i)));
    norm = std::max(norm, std::abs(err(i)) / scale);
  }
  if (!std::isfinite(norm)) {
    norm = std::numeric_limits<double>::infinity();
  }
  return {std::move(next), norm};
}

double initial_step(const DerivativeFunction& f, double t0, const Eigen::VectorXd& x0,
                    const Rkf45Options& opts) {
  if (opts.initial_step > 0.0) {
    return opts.initial_step;
  }
  const Eigen::VectorXd d = f(t0, x0);
  const Eigen::ArrayXd scale = opts.abs_tol + opts.rel_tol * x0.array().abs();
  const double d0 = (x0.array() / scale).matrix().norm();
  const double d1 = (d.array() / scale).matrix().norm();
  if (d0 < 1e-5 || d1 < 1e-5) {
    return 1e-6;
  }
  return 0.01 * d0 / d1;
}

}  // namespace

Rkf45Result rkf45_integrate(const DerivativeFunction& f, const Eigen::VectorXd& x0, double t0,
                            std::span<const double> sample_times, const Rkf45Options& opts,
                            const SampleHook& hook) {
  if (!(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0)) {
    throw DomainError("rkf45 tolerances must be positive");
  }
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    if (sample_times[i] < t0 || (i > 0 && sample_times[i] < sample_times[i - 1])) {
      throw DomainError("rkf45 sample times must be non-decreasing and not before t0");
    }
  }

  Rkf45Result result;
  result.samples.reserve(sample_times.size());
  Eigen::VectorXd x = x0;
  double t = t0;
  double h = std::min(initial_step(f, t0, x0, opts), opts.max_step);

  for (const double target : sample_times) {
    while (t < target) {
      const double remaining = target - t;
      const bool truncated = h >= remaining;
      const double h_try = truncated ? remaining : h;
      if (h_try < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0)) {
        throw StepSizeUnderflowError("rkf45 step size underflow at t = " + std::to_string(t));
      }
      if (result.accepted_steps + result.rejected_steps >= opts.max_steps) {
        throw StepSizeUnderflowError("rkf45 exceeded the maximum number of steps");
      }

      Trial trial = fehlberg_step(f, t, x, h_try, opts);
      const double factor =
          trial.error_norm == 0.0 ? 5.0
                                  : std::clamp(0.9 * std::pow(trial.error_norm, -0.2), 0.2, 5.0);
      if (trial.error_norm <= 1.0) {
        ++result.accepted_steps;
        x = std::move(trial.next);
        t = truncated ? target : t + h_try;
        const double proposal = h_try * factor;
        h = truncated ? std::max(h, proposal) : proposal;
        if (truncated && factor < 1.0) {
          h = proposal;
        }
      } else {
        ++result.rejected_steps;
        h = h_try * factor;
      }
      h = std::min(h, opts.max_step);
    }
    if (hook) {
      hook(t, x);
    }
    result.samples.push_back(x);
  }
  return result;
}

Eigen::VectorXd rkf45_integrate(const DerivativeFunction& f, const Eigen::VectorXd& x0, double t0,
                                double t1, double rel_tol, double abs_tol) {
  if (!(t1 > t0)) {
    throw DomainError("rkf45 requires t1 > t0");
  }
  Rkf45Options opts;
  opts.rel_tol = rel_tol;
  opts.abs_tol = abs_tol;
  const std::array<double, 1> samples = {t1};
  return rkf45_integrate(f, x0, t0, samples, opts).samples.front();
}

}  // namespace relnav
