#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "relnav/attitude.hpp"
#include "relnav/errors.hpp"
#include "test_support.hpp"

using namespace relnav;
using namespace relnav::testing;

TEST_CASE("cross_matrix") {
  CHECK(cross_matrix(Eigen::Vector3d::Zero()).isZero(0.0));

  Eigen::Matrix3d expected;
  expected << 0, -3, 2, 3, 0, -1, -2, 1, 0;
  CHECK(cross_matrix(Eigen::Vector3d(1, 2, 3)) == expected);

  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Vector3d p = random_vector(rng);
    const Eigen::Vector3d b = random_vector(rng);
    const Eigen::Matrix3d s = cross_matrix(p);
    CHECK((s * b - cross_oracle(p, b)).norm() < 1e-14);
    CHECK((s.transpose() + s).isZero(0.0));
    CHECK(s.trace() == 0.0);
  }
}

TEST_CASE("mrp_from_quaternion") {
  CHECK(mrp_from_quaternion(Quaternion::identity()).p.isZero(0.0));
  CHECK((mrp_from_quaternion({Eigen::Vector3d(1, 0, 0), 0.0}).p - Eigen::Vector3d(1, 0, 0)).norm() < 1e-15);

  SUBCASE("degenerate 360 degree rotation") {
    CHECK_THROWS_AS(mrp_from_quaternion({Eigen::Vector3d::Zero(), -1.0}), DegenerateRotationError);
  }

  SUBCASE("rotations beyond 180 degrees come back as the shadow set") {
    const Quaternion q = Quaternion::from_axis_angle(Eigen::Vector3d::UnitZ(), 1.5 * std::numbers::pi);
    const Mrp p = mrp_from_quaternion(q);
    CHECK(p.p.norm() <= 1.0 + 1e-12);
    CHECK(p.p.z() == doctest::Approx(-std::tan(0.5 * std::numbers::pi / 4.0)));
  }

  SUBCASE("round trip reproduces +-q") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i) {
      const Quaternion q = random_quaternion(rng);
      if (q.scalar < -1.0 + 1e-6) continue;
      const Quaternion back = quaternion_from_mrp(mrp_from_quaternion(q));
      const double d_plus = (back.vec - q.vec).norm() + std::abs(back.scalar - q.scalar);
      const double d_minus = (back.vec + q.vec).norm() + std::abs(back.scalar + q.scalar);
      CHECK(std::min(d_plus, d_minus) < 1e-12);
    }
  }
}

TEST_CASE("quaternion_from_mrp") {
  const Quaternion id = quaternion_from_mrp(Mrp());
  CHECK(id.vec.isZero(0.0));
  CHECK(id.scalar == 1.0);

  const Quaternion z180 = quaternion_from_mrp(Mrp(0, 0, 1));
  CHECK((z180.vec - Eigen::Vector3d(0, 0, 1)).norm() < 1e-15);
  CHECK(std::abs(z180.scalar) < 1e-15);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    CHECK(std::abs(quaternion_from_mrp(random_mrp(rng)).norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("rotation_from_mrp") {
  CHECK(rotation_from_mrp(Mrp()).isIdentity(0.0));
  CHECK((rotation_from_mrp(Mrp(0, 0, 1)) - Eigen::Vector3d(-1, -1, 1).asDiagonal().toDenseMatrix()).norm() < 1e-15);

  SUBCASE("maps chaser-frame components into the rotated target frame") {
    // Target rotated by +phi about z relative to the chaser.
    const double phi = 0.7;
    const RotationMatrix g = rotation_from_mrp(Mrp(0, 0, std::tan(phi / 4.0)));
    CHECK((g * Eigen::Vector3d::UnitX() - Eigen::Vector3d(std::cos(phi), -std::sin(phi), 0)).norm() < 1e-14);
  }

  SUBCASE("agrees with the quaternion direction cosine matrix") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 2000; ++i) {
      const Mrp p = random_mrp(rng, 2.0);
      CHECK((rotation_from_mrp(p) - dcm_oracle(quaternion_from_mrp(p))).norm() < 1e-12);
    }
  }

  SUBCASE("orthonormal, proper, shadow invariant") {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 2000; ++i) {
      const Mrp p = random_mrp(rng, 3.0);
      const RotationMatrix g = rotation_from_mrp(p);
      CHECK((g.transpose() * g - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(std::abs(g.determinant() - 1.0) < 1e-12);
      CHECK((rotation_from_mrp(p.shadow()) - g).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("Mrp shadow handling") {
  CHECK_THROWS_AS(static_cast<void>(Mrp().shadow()), DegenerateRotationError);
  const Mrp p(0.0, 2.0, 0.0);
  CHECK((p.shadow().p - Eigen::Vector3d(0, -0.5, 0)).norm() < 1e-15);
  CHECK(p.normalized().p.norm() <= 1.0);
  const Mrp small(0.1, 0.2, 0.3);
  CHECK(small.normalized().p == small.p);
}

TEST_CASE("quaternion_from_rotation inverts rotation_from_quaternion") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 2000; ++i) {
    Quaternion q = random_quaternion(rng);
    if (q.scalar < 0) q = q.negated();
    const Quaternion back = quaternion_from_rotation(rotation_from_quaternion(q));
    CHECK((back.vec - q.vec).norm() + std::abs(back.scalar - q.scalar) < 1e-12);
    CHECK((rotation_from_quaternion(q) - dcm_oracle(q)).norm() < 1e-12);
  }
}

TEST_CASE("relative_mrp") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 500; ++i) {
    const Mrp a = random_mrp(rng);
    CHECK(relative_mrp(a, a).p.norm() < 1e-12);
    const Mrp d = random_mrp(rng, 0.5);
    // Gamma(b) = Gamma(d) Gamma(a)
    const Quaternion qb = quaternion_from_rotation(rotation_from_mrp(d) * rotation_from_mrp(a));
    const Mrp b = mrp_from_quaternion(qb);
    CHECK((relative_mrp(b, a).p - d.p).norm() < 1e-10);
  }
}

TEST_CASE("mrp_kinematic_matrix scales an orthogonal matrix") {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Vector3d p = random_mrp(rng).p;
    const Eigen::Matrix3d b = mrp_kinematic_matrix(p);
    const double s = (1.0 + p.squaredNorm()) * (1.0 + p.squaredNorm());
    CHECK((b * b.transpose() - s * Eigen::Matrix3d::Identity()).norm() < 1e-12);
  }
}

TEST_CASE("shadow_jacobian matches finite differences") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d p = random_mrp(rng, 2.0).p + Eigen::Vector3d::Constant(0.05);
    const Eigen::Matrix3d j = shadow_jacobian(p);
    const double h = 1e-6;
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector3d e = h * Eigen::Vector3d::Unit(k);
      const Eigen::Vector3d fd = (Mrp(p + e).shadow().p - Mrp(p - e).shadow().p) / (2 * h);
      CHECK((fd - j.col(k)).norm() < 1e-6 * std::max(1.0, j.norm()));
    }
  }
}
