#include "relnav/dynamics.hpp"

#include <cmath>
#include <utility>

#include <Eigen/Eigenvalues>

#include "relnav/errors.hpp"
#include "relnav/integrators.hpp"

namespace relnav {

ChaserOrbitState ChaserOrbitState::from_elements(double a, double e, double nu, double mu) {
  if (!(a > 0.0) || !(e >= 0.0 && e < 1.0)) {
    throw DomainError("chaser orbit requires a > 0 and 0 <= e < 1");
  }
  const double semi_latus = a * (1.0 - e * e);
  const double r = semi_latus / (1.0 + e * std::cos(nu));
  ChaserOrbitState s;
  s.r = r;
  s.r_dot = std::sqrt(mu / semi_latus) * e * std::sin(nu);
  s.theta = nu;
  s.theta_dot = std::sqrt(mu * semi_latus) / (r * r);
  return s;
}

FullState12 make_full_state(const RelativeTranslationalState& tr, const RelativeRotationalState& rot) {
  FullState12 x;
  x << tr.position, tr.velocity, rot.attitude.p, rot.omega;
  return x;
}

InertiaMatrix::InertiaMatrix(const Eigen::Matrix3d& j) : j_(j) {
  const double scale = j.cwiseAbs().maxCoeff();
  if (!(scale > 0.0) || (j - j.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw DomainError("inertia matrix must be symmetric and non-zero");
  }
  const Eigen::Matrix3d sym = 0.5 * (j + j.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(sym);
  const Eigen::Vector3d m = eig.eigenvalues();
  if (m.minCoeff() <= 0.0) {
    throw DomainError("inertia matrix must be positive definite");
  }
  const double slack = 1e-12 * m.sum();
  if (m(0) + m(1) < m(2) - slack || m(1) + m(2) < m(0) - slack || m(0) + m(2) < m(1) - slack) {
    throw DomainError("principal moments violate the triangle inequality");
  }
  j_ = sym;
  j_inv_ = sym.inverse();
}

ChaserAttitudeProfile ChaserAttitudeProfile::nadir_pointing() { return {}; }

ChaserAttitudeProfile ChaserAttitudeProfile::inertial() {
  ChaserAttitudeProfile p;
  p.kind_ = Kind::kInertial;
  return p;
}

ChaserAttitudeProfile ChaserAttitudeProfile::from_function(Function f) {
  ChaserAttitudeProfile p;
  p.kind_ = Kind::kFunction;
  p.fn_ = std::move(f);
  return p;
}

ChaserRates ChaserAttitudeProfile::evaluate(double t, const ChaserOrbitState& chaser,
                                            const Vector4d& chaser_derivs) const {
  switch (kind_) {
    case Kind::kNadir:
      return {Eigen::Vector3d(0.0, 0.0, chaser.theta_dot),
              Eigen::Vector3d(0.0, 0.0, chaser_derivs(3))};
    case Kind::kInertial:
      return {};
    case Kind::kFunction:
      return fn_(t);
  }
  return {};
}

Vector4d chaser_orbit_derivs(const ChaserOrbitState& s, double mu) {
  if (!(s.r > 0.0)) {
    throw DomainError("chaser radius must be positive");
  }
  return {s.r_dot, s.r * s.theta_dot * s.theta_dot - mu / (s.r * s.r), s.theta_dot,
          -2.0 * s.r_dot * s.theta_dot / s.r};
}

Vector6d relative_translational_derivs(const RelativeTranslationalState& rel,
                                       const ChaserOrbitState& chaser,
                                       const Vector4d& chaser_derivs, double mu) {
  const double x = rel.position.x();
  const double y = rel.position.y();
  const double z = rel.position.z();
  const double rx = chaser.r + x;
  const double dist2 = rx * rx + y * y + z * z;
  if (!(dist2 > 0.0)) {
    throw DomainError("target coincides with the Earth centre");
  }
  // Written as (mu / d^2) (. / d) so that x = 0 cancels the chaser term exactly.
  const double d = std::sqrt(dist2);
  const double g = mu / dist2;
  const double w = chaser.theta_dot;
  const double w_dot = chaser_derivs(3);
  const Eigen::Vector3d& v = rel.velocity;

  Vector6d out;
  out.head<3>() = v;
  out(3) = 2.0 * w * v.y() + w_dot * y + w * w * x - g * (rx / d) + mu / (chaser.r * chaser.r);
  out(4) = -2.0 * w * v.x() - w_dot * x + w * w * y - g * (y / d);
  out(5) = -g * (z / d);
  return out;
}

Eigen::Vector3d mrp_kinematics(const Mrp& p, const Eigen::Vector3d& omega_r) {
  return 0.25 * mrp_kinematic_matrix(p.p) * omega_r;
}

TorqueTerms torque_terms(const RelativeRotationalState& rot, const InertiaMatrix& j,
                         const Eigen::Vector3d& omega_c, const Eigen::Vector3d& omega_c_dot) {
  const Eigen::Matrix3d& jm = j.matrix();
  const RotationMatrix gamma = rotation_from_mrp(rot.attitude);
  const Eigen::Vector3d g = gamma * omega_c;
  const Eigen::Vector3d& w = rot.omega;
  const Eigen::Vector3d jg = jm * g;
  TorqueTerms m;
  m.apparent = jm * w.cross(g);
  m.gyroscopic = g.cross(jg) + w.cross(jg) + g.cross(jm * w);
  m.chaser_inertial = jm * (gamma * omega_c_dot);
  return m;
}

Eigen::Vector3d relative_attitude_derivs(const RelativeRotationalState& rot, const InertiaMatrix& j,
                                         const Eigen::Vector3d& omega_c,
                                         const Eigen::Vector3d& omega_c_dot) {
  const TorqueTerms m = torque_terms(rot, j, omega_c, omega_c_dot);
  const Eigen::Vector3d& w = rot.omega;
  return j.inverse() *
         (m.apparent - m.gyroscopic - m.chaser_inertial - w.cross(j.matrix() * w));
}

TranslationalBlock translational_block_derivs(const DynamicsModel& model, double /*t*/,
                                              const TranslationalBlock& x) {
  const ChaserOrbitState chaser = ChaserOrbitState::from_vector(x.head<4>());
  const Vector4d cd = chaser_orbit_derivs(chaser, model.mu);
  const RelativeTranslationalState rel{x.segment<3>(4), x.segment<3>(7)};
  TranslationalBlock out;
  out << cd, relative_translational_derivs(rel, chaser, cd, model.mu);
  return out;
}

RotationalBlock rotational_block_derivs(const DynamicsModel& model, double t,
                                        const RotationalBlock& x) {
  const ChaserOrbitState chaser = ChaserOrbitState::from_vector(x.head<4>());
  const Vector4d cd = chaser_orbit_derivs(chaser, model.mu);
  const ChaserRates rates = model.profile.evaluate(t, chaser, cd);
  const RelativeRotationalState rot{Mrp(x.segment<3>(4)), x.segment<3>(7)};
  RotationalBlock out;
  out << cd, mrp_kinematics(rot.attitude, rot.omega),
      relative_attitude_derivs(rot, model.inertia, rates.omega, rates.omega_dot);
  return out;
}

StackedState stacked_derivs(const DynamicsModel& model, double t, const StackedState& x) {
  const ChaserOrbitState chaser = ChaserOrbitState::from_vector(x.head<4>());
  const Vector4d cd = chaser_orbit_derivs(chaser, model.mu);
  const ChaserRates rates = model.profile.evaluate(t, chaser, cd);
  const RelativeTranslationalState tr{x.segment<3>(4), x.segment<3>(7)};
  const RelativeRotationalState rot{Mrp(x.segment<3>(10)), x.segment<3>(13)};
  StackedState out;
  out << cd, relative_translational_derivs(tr, chaser, cd, model.mu),
      mrp_kinematics(rot.attitude, rot.omega),
      relative_attitude_derivs(rot, model.inertia, rates.omega, rates.omega_dot);
  return out;
}

StackedState stack(const ChaserOrbitState& chaser, const FullState12& rel) {
  StackedState s;
  s << chaser.as_vector(), rel;
  return s;
}

bool normalize_mrp_block(FullState12& x) {
  const Eigen::Vector3d p = x.segment<3>(6);
  if (p.squaredNorm() > 1.0) {
    x.segment<3>(6) = Mrp(p).shadow().p;
    return true;
  }
  return false;
}

PropagatedState propagate_full_state(const FullState12& state, const ChaserOrbitState& chaser,
                                     const DynamicsModel& model, double t, double dt,
                                     ShadowPolicy shadow) {
  TranslationalBlock tr;
  tr << chaser.as_vector(), state.head<6>();
  RotationalBlock rot;
  rot << chaser.as_vector(), state.tail<6>();

  const TranslationalBlock tr_next = rk4_step(
      [&model](double tt, const TranslationalBlock& x) { return translational_block_derivs(model, tt, x); },
      tr, t, dt);
  const RotationalBlock rot_next = rk4_step(
      [&model](double tt, const RotationalBlock& x) { return rotational_block_derivs(model, tt, x); },
      rot, t, dt);

  PropagatedState out;
  out.chaser = ChaserOrbitState::from_vector(tr_next.head<4>());
  out.state << tr_next.tail<6>(), rot_next.tail<6>();
  if (shadow == ShadowPolicy::kSwitch) {
    normalize_mrp_block(out.state);
  }
  return out;
}

}  // namespace relnav
