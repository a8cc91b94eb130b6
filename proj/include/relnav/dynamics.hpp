#pragma once

#include <functional>

#include <Eigen/Dense>

#include "relnav/attitude.hpp"

namespace relnav {

inline constexpr double kEarthMu = 3.986004418e14;      // m^3/s^2
inline constexpr double kEarthRadius = 6378137.0;       // m

using Vector4d = Eigen::Vector4d;
using Vector6d = Eigen::Matrix<double, 6, 1>;
/// (x, y, z, xdot, ydot, zdot, p1, p2, p3, wr_x, wr_y, wr_z)
using FullState12 = Eigen::Matrix<double, 12, 1>;

/// Chaser centre of mass in planar polar coordinates about the Earth.
struct ChaserOrbitState {
  double r = 0.0;          // m
  double r_dot = 0.0;      // m/s
  double theta = 0.0;      // rad, true anomaly
  double theta_dot = 0.0;  // rad/s

  [[nodiscard]] Vector4d as_vector() const { return {r, r_dot, theta, theta_dot}; }
  static ChaserOrbitState from_vector(const Vector4d& v) { return {v(0), v(1), v(2), v(3)}; }

  /// State on a Keplerian orbit with semi-major axis `a`, eccentricity `e`,
  /// at true anomaly `nu`.
  static ChaserOrbitState from_elements(double a, double e, double nu, double mu = kEarthMu);

  [[nodiscard]] double angular_momentum() const { return r * r * theta_dot; }
  [[nodiscard]] double specific_energy(double mu) const {
    return 0.5 * r_dot * r_dot + 0.5 * r * r * theta_dot * theta_dot - mu / r;
  }
};

/// Target position/velocity relative to the chaser, in the chaser LVLH frame
/// (x radial, y along-track, z orbit normal).
struct RelativeTranslationalState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
};

/// Target attitude relative to the chaser body and the relative angular
/// velocity expressed in the target body frame.
struct RelativeRotationalState {
  Mrp attitude;
  Eigen::Vector3d omega = Eigen::Vector3d::Zero();
};

inline RelativeTranslationalState translational_part(const FullState12& x) {
  return {x.segment<3>(0), x.segment<3>(3)};
}
inline RelativeRotationalState rotational_part(const FullState12& x) {
  return {Mrp(x.segment<3>(6)), x.segment<3>(9)};
}
FullState12 make_full_state(const RelativeTranslationalState& tr, const RelativeRotationalState& rot);

/// Positive definite target inertia tensor (kg m^2).
class InertiaMatrix {
 public:
  /// Validates symmetry, positive definiteness and the triangle inequalities.
  explicit InertiaMatrix(const Eigen::Matrix3d& j);
  static InertiaMatrix diagonal(const Eigen::Vector3d& principal) {
    return InertiaMatrix(principal.asDiagonal().toDenseMatrix());
  }

  [[nodiscard]] const Eigen::Matrix3d& matrix() const { return j_; }
  [[nodiscard]] const Eigen::Matrix3d& inverse() const { return j_inv_; }

 private:
  Eigen::Matrix3d j_;
  Eigen::Matrix3d j_inv_;
};

/// Chaser body angular velocity and its derivative, chaser body frame.
struct ChaserRates {
  Eigen::Vector3d omega = Eigen::Vector3d::Zero();      // rad/s
  Eigen::Vector3d omega_dot = Eigen::Vector3d::Zero();  // rad/s^2
};

/// Chaser attitude motion as a function of time and the chaser orbit.
class ChaserAttitudeProfile {
 public:
  using Function = std::function<ChaserRates(double t)>;

  /// Body frame aligned with LVLH: omega = (0, 0, thetadot), omega_dot = (0, 0, thetaddot).
  static ChaserAttitudeProfile nadir_pointing();
  /// Inertially fixed chaser, omega = 0.
  static ChaserAttitudeProfile inertial();
  static ChaserAttitudeProfile from_function(Function f);

  [[nodiscard]] ChaserRates evaluate(double t, const ChaserOrbitState& chaser,
                                     const Vector4d& chaser_derivs) const;
  [[nodiscard]] bool is_nadir_pointing() const { return kind_ == Kind::kNadir; }

 private:
  enum class Kind { kNadir, kInertial, kFunction };
  Kind kind_ = Kind::kNadir;
  Function fn_;
};

struct TorqueTerms {
  Eigen::Vector3d apparent = Eigen::Vector3d::Zero();
  Eigen::Vector3d gyroscopic = Eigen::Vector3d::Zero();
  Eigen::Vector3d chaser_inertial = Eigen::Vector3d::Zero();
};

/// (rdot, r thetadot^2 - mu/r^2, thetadot, -2 rdot thetadot / r).
/// Throws DomainError for r <= 0.
Vector4d chaser_orbit_derivs(const ChaserOrbitState& s, double mu);

/// (xdot, ydot, zdot, xddot, yddot, zddot) of the target in the rotating LVLH frame.
/// Throws DomainError when the target sits at the Earth centre.
Vector6d relative_translational_derivs(const RelativeTranslationalState& rel,
                                       const ChaserOrbitState& chaser,
                                       const Vector4d& chaser_derivs, double mu);

/// pdot = 1/4 [(1 - p'p) I + 2 p p' + 2 [p x]] w.
Eigen::Vector3d mrp_kinematics(const Mrp& p, const Eigen::Vector3d& omega_r);

/// Coupling torques between the relative and absolute target motion, with
/// w_c rotated into the target frame by Gamma(p).
TorqueTerms torque_terms(const RelativeRotationalState& rot, const InertiaMatrix& j,
                         const Eigen::Vector3d& omega_c, const Eigen::Vector3d& omega_c_dot);

/// wdot_r = J^-1 (M_app - M_g - M_ci - w_r x J w_r).
Eigen::Vector3d relative_attitude_derivs(const RelativeRotationalState& rot, const InertiaMatrix& j,
                                         const Eigen::Vector3d& omega_c,
                                         const Eigen::Vector3d& omega_c_dot);

struct DynamicsModel {
  double mu = kEarthMu;
  InertiaMatrix inertia = InertiaMatrix::diagonal(Eigen::Vector3d::Ones());
  ChaserAttitudeProfile profile = ChaserAttitudeProfile::nadir_pointing();
};

/// Chaser (4) followed by the relative translational (6) state.
using TranslationalBlock = Eigen::Matrix<double, 10, 1>;
/// Chaser (4) followed by MRP (3) and relative angular velocity (3).
using RotationalBlock = Eigen::Matrix<double, 10, 1>;
/// Chaser (4) followed by the full relative state (12).
using StackedState = Eigen::Matrix<double, 16, 1>;

TranslationalBlock translational_block_derivs(const DynamicsModel& model, double t,
                                              const TranslationalBlock& x);
RotationalBlock rotational_block_derivs(const DynamicsModel& model, double t,
                                        const RotationalBlock& x);
StackedState stacked_derivs(const DynamicsModel& model, double t, const StackedState& x);

StackedState stack(const ChaserOrbitState& chaser, const FullState12& rel);

enum class ShadowPolicy { kSwitch, kKeep };

struct PropagatedState {
  FullState12 state;
  ChaserOrbitState chaser;
};

/// One RK4 step of length dt, translational and rotational halves integrated
/// separately (each co-propagating the chaser). With ShadowPolicy::kSwitch the
/// MRP is mapped to its shadow set when |p| > 1 after the step.
PropagatedState propagate_full_state(const FullState12& state, const ChaserOrbitState& chaser,
                                     const DynamicsModel& model, double t, double dt,
                                     ShadowPolicy shadow = ShadowPolicy::kSwitch);

/// Applies the MRP shadow switch to the attitude block of `x` when |p| > 1.
/// Returns true when a switch happened.
bool normalize_mrp_block(FullState12& x);

}  // namespace relnav
