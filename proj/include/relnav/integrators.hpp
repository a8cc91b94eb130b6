#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "relnav/errors.hpp"

namespace relnav {

/// Classical fourth-order Runge-Kutta step. `f(t, x)` returns dx/dt.
template <typename State, typename F>
State rk4_step(F&& f, const State& x, double t, double dt) {
  if (!(dt > 0.0)) {
    throw DomainError("rk4_step requires dt > 0");
  }
  const double h2 = 0.5 * dt;
  const State k1 = f(t, x);
  const State k2 = f(t + h2, State(x + h2 * k1));
  const State k3 = f(t + h2, State(x + h2 * k2));
  const State k4 = f(t + dt, State(x + dt * k3));
  return State(x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

using DerivativeFunction = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;
/// Called at every sample time; may modify the state in place (e.g. MRP shadow switch).
using SampleHook = std::function<void(double, Eigen::VectorXd&)>;

struct Rkf45Options {
  double rel_tol = 1e-12;
  double abs_tol = 1e-12;
  double initial_step = 0.0;  // 0 selects a step from the derivative magnitude
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 50'000'000;
};

struct Rkf45Result {
  std::vector<Eigen::VectorXd> samples;  // one per requested sample time
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

/// Runge-Kutta-Fehlberg 4(5) with local extrapolation. Steps are shortened to
/// land exactly on each sample time, so samples carry no interpolation error.
/// `sample_times` must be non-decreasing and >= t0.
///
/// Throws StepSizeUnderflowError when the step collapses below roundoff.
Rkf45Result rkf45_integrate(const DerivativeFunction& f, const Eigen::VectorXd& x0, double t0,
                            std::span<const double> sample_times, const Rkf45Options& opts = {},
                            const SampleHook& hook = {});

/// Convenience form returning only the state at t1.
Eigen::VectorXd rkf45_integrate(const DerivativeFunction& f, const Eigen::VectorXd& x0, double t0,
                                double t1, double rel_tol, double abs_tol);

}  // namespace relnav
