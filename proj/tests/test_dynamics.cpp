#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "relnav/dynamics.hpp"
#include "relnav/errors.hpp"
#include "relnav/integrators.hpp"
#include "test_support.hpp"

using namespace relnav;
using namespace relnav::testing;

namespace {

const InertiaMatrix kEnvisat = InertiaMatrix::diagonal({17023.3, 124825.7, 129112.2});

DynamicsModel model_with(const ChaserAttitudeProfile& profile) {
  DynamicsModel m;
  m.inertia = kEnvisat;
  m.profile = profile;
  return m;
}

FullState12 sample_state() {
  FullState12 x;
  x << 10, -60, 5, 0.01, -0.0209, 0, 0.1, -0.2, 0.3, 0.01, -0.02, 0.04;
  return x;
}

// Two-body acceleration in inertial coordinates.
Eigen::Vector3d gravity(const Eigen::Vector3d& r) { return -kEarthMu * r / std::pow(r.norm(), 3); }

// Orthonormal LVLH basis (x radial, y along-track, z orbit normal) as columns.
Eigen::Matrix3d lvlh_basis(const Eigen::Vector3d& r, const Eigen::Vector3d& v) {
  const Eigen::Vector3d x = r.normalized();
  const Eigen::Vector3d z = r.cross(v).normalized();
  Eigen::Matrix3d m;
  m.col(0) = x;
  m.col(1) = z.cross(x);
  m.col(2) = z;
  return m;
}

}  // namespace

TEST_CASE("chaser_orbit_derivs") {
  SUBCASE("circular orbit is balanced") {
    const ChaserOrbitState s = ChaserOrbitState::from_elements(7'150'000.0, 0.0, 0.0);
    const Vector4d d = chaser_orbit_derivs(s, kEarthMu);
    CHECK(d(0) == 0.0);
    CHECK(std::abs(d(1)) < 1e-12);
    CHECK(d(2) == doctest::Approx(std::sqrt(kEarthMu / std::pow(7'150'000.0, 3))));
    CHECK(d(3) == 0.0);
  }
  SUBCASE("non-positive radius is rejected") {
    CHECK_THROWS_AS(chaser_orbit_derivs({0.0, 0.0, 0.0, 0.001}, kEarthMu), DomainError);
    CHECK_THROWS_AS(chaser_orbit_derivs({-1.0, 0.0, 0.0, 0.001}, kEarthMu), DomainError);
  }
  SUBCASE("angular momentum and energy are first integrals") {
    const ChaserOrbitState s0 = ChaserOrbitState::from_elements(7'500'000.0, 0.05, 0.3);
    const DerivativeFunction f = [](double, const Eigen::VectorXd& x) -> Eigen::VectorXd {
      return chaser_orbit_derivs(ChaserOrbitState::from_vector(x), kEarthMu);
    };
    const Eigen::VectorXd x1 = rkf45_integrate(f, s0.as_vector(), 0.0, 6000.0, 1e-12, 1e-12);
    const ChaserOrbitState s1 = ChaserOrbitState::from_vector(x1);
    CHECK(std::abs(s1.angular_momentum() - s0.angular_momentum()) / s0.angular_momentum() < 1e-9);
    CHECK(std::abs(s1.specific_energy(kEarthMu) - s0.specific_energy(kEarthMu)) /
              std::abs(s0.specific_energy(kEarthMu)) <
          1e-9);
  }
}

TEST_CASE("relative_translational_derivs") {
  const ChaserOrbitState chaser = ChaserOrbitState::from_elements(7'150'000.0, 0.0, 0.0);
  const Vector4d cd = chaser_orbit_derivs(chaser, kEarthMu);

  SUBCASE("co-located target stays at rest") {
    const Vector6d d = relative_translational_derivs({}, chaser, cd, kEarthMu);
    CHECK(d.cwiseAbs().maxCoeff() < 1e-15);
  }

  SUBCASE("small displacements follow the Clohessy-Wiltshire equations") {
    const double n = chaser.theta_dot;
    const RelativeTranslationalState rel{Eigen::Vector3d(1.0, 2.0, -1.5), Eigen::Vector3d(0.01, -0.02, 0.005)};
    const Vector6d d = relative_translational_derivs(rel, chaser, cd, kEarthMu);
    const Eigen::Vector3d &r = rel.position, &v = rel.velocity;
    const Eigen::Vector3d cw(3 * n * n * r.x() + 2 * n * v.y(), -2 * n * v.x(), -n * n * r.z());
    CHECK((d.head<3>() - v).norm() == 0.0);
    CHECK((d.tail<3>() - cw).norm() < 1e-11);
  }

  SUBCASE("target at the Earth centre is rejected") {
    const RelativeTranslationalState rel{Eigen::Vector3d(-chaser.r, 0, 0), Eigen::Vector3d::Zero()};
    CHECK_THROWS_AS(relative_translational_derivs(rel, chaser, cd, kEarthMu), DomainError);
  }

  SUBCASE("matches the difference of two inertial two-body trajectories") {
    for (const double e : {0.0, 0.1}) {
      const ChaserOrbitState c0 = ChaserOrbitState::from_elements(7'150'000.0, e, 0.4);
      const Eigen::Vector3d rho0(120.0, -10'000.0, 300.0);
      const Eigen::Vector3d rhodot0(0.1, 0.5, -0.2);

      // Inertial initial conditions.
      const Eigen::Vector3d rhat(std::cos(c0.theta), std::sin(c0.theta), 0.0);
      const Eigen::Vector3d that(-std::sin(c0.theta), std::cos(c0.theta), 0.0);
      const Eigen::Vector3d rc = c0.r * rhat;
      const Eigen::Vector3d vc = c0.r_dot * rhat + c0.r * c0.theta_dot * that;
      const Eigen::Matrix3d basis = lvlh_basis(rc, vc);
      const Eigen::Vector3d w_lvlh(0, 0, c0.theta_dot);
      const Eigen::Vector3d rt = rc + basis * rho0;
      const Eigen::Vector3d vt = vc + basis * (rhodot0 + w_lvlh.cross(rho0));

      Eigen::VectorXd inertial(12);
      inertial << rc, vc, rt, vt;
      const DerivativeFunction fi = [](double, const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd d(12);
        d << x.segment<3>(3), gravity(x.segment<3>(0)), x.segment<3>(9), gravity(x.segment<3>(6));
        return d;
      };
      const double t1 = 1000.0;
      const Eigen::VectorXd xi = rkf45_integrate(fi, inertial, 0.0, t1, 1e-13, 1e-9);

      const Eigen::Matrix3d b1 = lvlh_basis(xi.segment<3>(0), xi.segment<3>(3));
      const Eigen::Vector3d rho_oracle = b1.transpose() * (xi.segment<3>(6) - xi.segment<3>(0));

      const DynamicsModel m = model_with(ChaserAttitudeProfile::nadir_pointing());
      TranslationalBlock x0;
      x0 << c0.as_vector(), rho0, rhodot0;
      const DerivativeFunction fr = [&m](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return translational_block_derivs(m, t, TranslationalBlock(x));
      };
      const Eigen::VectorXd xr = rkf45_integrate(fr, x0, 0.0, t1, 1e-13, 1e-12);
      CAPTURE(e);
      CHECK((xr.segment<3>(4) - rho_oracle).norm() < 1e-6);
    }
  }
}

TEST_CASE("mrp_kinematics") {
  CHECK((mrp_kinematics(Mrp(), Eigen::Vector3d(0.4, -0.8, 1.2)) - Eigen::Vector3d(0.1, -0.2, 0.3)).norm() < 1e-16);
  CHECK(mrp_kinematics(Mrp(0.2, 0.1, -0.3), Eigen::Vector3d::Zero()).isZero(0.0));

  SUBCASE("constant single-axis rate has the closed form tan(w t / 4)") {
    const double w = 0.05;
    const Eigen::Vector3d omega(0, 0, w);
    Eigen::Vector3d p = Eigen::Vector3d::Zero();
    const auto f = [&](double, const Eigen::Vector3d& x) -> Eigen::Vector3d {
      return mrp_kinematics(Mrp(x), omega);
    };
    const double dt = 0.1;
    for (int k = 0; k < 400; ++k) p = rk4_step(f, p, k * dt, dt);
    CHECK((p - Eigen::Vector3d(0, 0, std::tan(w * 40.0 / 4.0))).norm() < 1e-12);
  }
}

TEST_CASE("torque_terms and relative_attitude_derivs") {
  SUBCASE("inertial chaser reduces to torque-free Euler equations") {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 100; ++i) {
      const RelativeRotationalState rot{random_mrp(rng), random_vector(rng, 0.05)};
      const Eigen::Vector3d wdot = relative_attitude_derivs(rot, kEnvisat, Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero());
      const Eigen::Matrix3d& j = kEnvisat.matrix();
      const Eigen::Vector3d euler = j.inverse() * (-rot.omega.cross(j * rot.omega));
      CHECK((wdot - euler).norm() < 1e-15);
    }
  }
  SUBCASE("spherical target with matched rates stays at rest") {
    const InertiaMatrix sphere = InertiaMatrix::diagonal(Eigen::Vector3d::Constant(100.0));
    const Eigen::Vector3d wdot =
        relative_attitude_derivs({Mrp(0.1, 0.2, -0.1), Eigen::Vector3d::Zero()}, sphere, Eigen::Vector3d(0, 0, 1e-3), Eigen::Vector3d::Zero());
    CHECK(wdot.norm() < 1e-18);
  }
  SUBCASE("aligned bodies with zero relative motion under nadir rates") {
    const Eigen::Vector3d g(0, 0, 1.1e-3);
    const TorqueTerms t = torque_terms({Mrp(), Eigen::Vector3d::Zero()}, kEnvisat, g, Eigen::Vector3d::Zero());
    CHECK(t.apparent.isZero(0.0));
    CHECK(t.gyroscopic.norm() < 1e-12);
    CHECK(t.chaser_inertial.isZero(0.0));
  }
}

TEST_CASE("InertiaMatrix validation") {
  CHECK_NOTHROW(InertiaMatrix::diagonal({1, 2, 2.5}));
  CHECK_THROWS_AS(InertiaMatrix::diagonal({1, 1, 3}), DomainError);
  CHECK_THROWS_AS(InertiaMatrix::diagonal({-1, 2, 2}), DomainError);
  Eigen::Matrix3d asym = Eigen::Vector3d(2, 2, 2).asDiagonal();
  asym(0, 1) = 0.1;
  CHECK_THROWS_AS(InertiaMatrix{asym}, DomainError);
}

TEST_CASE("relative attitude matches two absolute attitude propagations") {
  // Chaser with an arbitrary smooth body rate history.
  const auto rates = [](double t) {
    ChaserRates r;
    r.omega = {0.01 * std::sin(0.1 * t), 0.02 * std::cos(0.05 * t), 0.001 + 0.005 * std::sin(0.2 * t)};
    r.omega_dot = {0.001 * std::cos(0.1 * t), -0.001 * std::sin(0.05 * t), 0.001 * std::cos(0.2 * t)};
    return r;
  };
  const DynamicsModel m = model_with(ChaserAttitudeProfile::from_function(rates));
  const Eigen::Matrix3d& j = kEnvisat.matrix();

  const Mrp p0(0.1, -0.2, 0.3);
  const Eigen::Vector3d wr0(0.01, -0.02, 0.04);
  const Eigen::Matrix3d g0 = rotation_from_mrp(p0);

  // Oracle state: C_chaser (9), C_target (9), target inertial rate (3).
  // C maps inertial components into body components, Cdot = -[w x] C.
  Eigen::VectorXd abs0(21);
  const Eigen::Matrix3d cc0 = Eigen::Matrix3d::Identity();
  const Eigen::Matrix3d ct0 = g0 * cc0;
  const Eigen::Vector3d wt0 = wr0 + g0 * rates(0.0).omega;
  abs0 << Eigen::Map<const Eigen::VectorXd>(cc0.data(), 9), Eigen::Map<const Eigen::VectorXd>(ct0.data(), 9), wt0;
  const DerivativeFunction fa = [&](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const Eigen::Map<const Eigen::Matrix3d> cc(x.data());
    const Eigen::Map<const Eigen::Matrix3d> ct(x.data() + 9);
    const Eigen::Vector3d wt = x.segment<3>(18);
    const Eigen::Vector3d wc = rates(t).omega;
    const Eigen::Matrix3d dcc = -cross_matrix(wc) * cc;
    const Eigen::Matrix3d dct = -cross_matrix(wt) * ct;
    Eigen::VectorXd d(21);
    d << Eigen::Map<const Eigen::VectorXd>(dcc.data(), 9), Eigen::Map<const Eigen::VectorXd>(dct.data(), 9),
        j.inverse() * (-wt.cross(j * wt));
    return d;
  };

  const ChaserOrbitState chaser = ChaserOrbitState::from_elements(7'150'000.0, 0.0, 0.0);
  RotationalBlock r0;
  r0 << chaser.as_vector(), p0.p, wr0;
  const DerivativeFunction fr = [&m](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return rotational_block_derivs(m, t, RotationalBlock(x));
  };
  const SampleHook shadow = [](double, Eigen::VectorXd& x) {
    if (x.segment<3>(4).squaredNorm() > 1.0) x.segment<3>(4) = Mrp(x.segment<3>(4)).shadow().p;
  };

  std::vector<double> times;
  for (int k = 1; k <= 100; ++k) times.push_back(k);
  Rkf45Options opts;
  opts.rel_tol = 1e-13;
  opts.abs_tol = 1e-14;
  const Rkf45Result oracle = rkf45_integrate(fa, abs0, 0.0, times, opts);
  const Rkf45Result rel = rkf45_integrate(fr, r0, 0.0, times, opts, shadow);

  for (std::size_t k = 0; k < times.size(); ++k) {
    const Eigen::Map<const Eigen::Matrix3d> cc(oracle.samples[k].data());
    const Eigen::Map<const Eigen::Matrix3d> ct(oracle.samples[k].data() + 9);
    const Eigen::Matrix3d g_oracle = ct * cc.transpose();
    const Eigen::Vector3d wr_oracle = oracle.samples[k].segment<3>(18) - g_oracle * rates(times[k]).omega;

    const Eigen::Matrix3d g = rotation_from_mrp(Mrp(rel.samples[k].segment<3>(4)));
    CAPTURE(times[k]);
    CHECK((g - g_oracle).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((rel.samples[k].segment<3>(7) - wr_oracle).norm() < 1e-8);
  }
}

TEST_CASE("torque-free target conserves energy and angular momentum") {
  const DynamicsModel m = model_with(ChaserAttitudeProfile::inertial());
  const ChaserOrbitState chaser = ChaserOrbitState::from_elements(7'150'000.0, 0.0, 0.0);
  FullState12 x = sample_state();
  const Eigen::Matrix3d& j = kEnvisat.matrix();
  const auto energy = [&](const FullState12& s) {
    const Eigen::Vector3d w = s.segment<3>(9);
    return 0.5 * w.dot(j * w);
  };
  const auto momentum = [&](const FullState12& s) {
    const Eigen::Vector3d w = s.segment<3>(9);
    return (j * w).norm();
  };
  const double e0 = energy(x), h0 = momentum(x);

  ChaserOrbitState c = chaser;
  for (int k = 0; k < 1000; ++k) {
    const PropagatedState next = propagate_full_state(x, c, m, k * 0.1, 0.1);
    x = next.state;
    c = next.chaser;
  }
  CHECK(std::abs(energy(x) - e0) / e0 < 1e-10);
  CHECK(std::abs(momentum(x) - h0) / h0 < 1e-10);
}

TEST_CASE("propagate_full_state") {
  const DynamicsModel m = model_with(ChaserAttitudeProfile::nadir_pointing());
  const ChaserOrbitState chaser = ChaserOrbitState::from_elements(7'150'000.0, 0.0, 0.0);

  SUBCASE("zero relative state is an equilibrium") {
    const PropagatedState out = propagate_full_state(FullState12::Zero(), chaser, m, 0.0, 1.0);
    CHECK(out.state.cwiseAbs().maxCoeff() < 1e-15);
  }

  SUBCASE("matches a single RK4 step of each decoupled block") {
    const FullState12 x = sample_state();
    const PropagatedState out = propagate_full_state(x, chaser, m, 0.0, 1.0);
    TranslationalBlock t0;
    t0 << chaser.as_vector(), x.head<6>();
    RotationalBlock r0;
    r0 << chaser.as_vector(), x.tail<6>();
    const TranslationalBlock t1 = rk4_step(
        [&m](double t, const TranslationalBlock& s) { return translational_block_derivs(m, t, s); }, t0, 0.0, 1.0);
    const RotationalBlock r1 = rk4_step(
        [&m](double t, const RotationalBlock& s) { return rotational_block_derivs(m, t, s); }, r0, 0.0, 1.0);
    CHECK((out.state.head<6>() - t1.tail<6>()).norm() == 0.0);
    CHECK((out.state.tail<6>() - r1.tail<6>()).norm() == 0.0);
    CHECK((out.chaser.as_vector() - t1.head<4>()).norm() == 0.0);
  }

  SUBCASE("agrees with the coupled 16-state derivative to integration accuracy") {
    const FullState12 x = sample_state();
    FullState12 a = x;
    ChaserOrbitState c = chaser;
    StackedState s = stack(chaser, x);
    const double dt = 0.5;
    for (int k = 0; k < 20; ++k) {
      const PropagatedState out = propagate_full_state(a, c, m, k * dt, dt, ShadowPolicy::kKeep);
      a = out.state;
      c = out.chaser;
      s = rk4_step([&m](double t, const StackedState& y) { return stacked_derivs(m, t, y); }, s, k * dt, dt);
    }
    CHECK((s.tail<12>() - a).cwiseAbs().maxCoeff() < 1e-9);
  }

  SUBCASE("shadow switching keeps |p| <= 1 over long propagations") {
    FullState12 x = sample_state();
    x.segment<3>(9) = Eigen::Vector3d(0.05, -0.08, 0.1);
    ChaserOrbitState c = chaser;
    int switches = 0;
    Eigen::Vector3d last = x.segment<3>(6);
    for (int k = 0; k < 1000; ++k) {
      const PropagatedState out = propagate_full_state(x, c, m, k * 1.0, 1.0);
      x = out.state;
      c = out.chaser;
      const Eigen::Vector3d p = x.segment<3>(6);
      CHECK(p.norm() <= 1.0 + 1e-12);
      if (p.dot(last) < 0.0) ++switches;
      last = p;
    }
    CHECK(switches > 0);
  }

  SUBCASE("rejects non-positive steps") {
    CHECK_THROWS_AS(propagate_full_state(sample_state(), chaser, m, 0.0, 0.0), DomainError);
  }

  SUBCASE("bitwise deterministic") {
    const PropagatedState a = propagate_full_state(sample_state(), chaser, m, 3.0, 1.0);
    const PropagatedState b = propagate_full_state(sample_state(), chaser, m, 3.0, 1.0);
    CHECK(a.state == b.state);
    CHECK(a.chaser.as_vector() == b.chaser.as_vector());
  }
}

TEST_CASE("normalize_mrp_block") {
  FullState12 x = sample_state();
  CHECK_FALSE(normalize_mrp_block(x));
  x.segment<3>(6) = Eigen::Vector3d(2, 0, 0);
  CHECK(normalize_mrp_block(x));
  CHECK((x.segment<3>(6) - Eigen::Vector3d(-0.5, 0, 0)).norm() < 1e-16);
}
