#include "relnav/attitude.hpp"

#include <cmath>

#include "relnav/errors.hpp"

namespace relnav {

Quaternion Quaternion::from_axis_angle(const Eigen::Vector3d& axis, double angle) {
  const Eigen::Vector3d n = axis.normalized();
  return {n * std::sin(0.5 * angle), std::cos(0.5 * angle)};
}

double Quaternion::norm() const { return std::sqrt(vec.squaredNorm() + scalar * scalar); }

Quaternion Quaternion::normalized() const {
  const double n = norm();
  return {vec / n, scalar / n};
}

Mrp Mrp::shadow() const {
  const double s = p.squaredNorm();
  if (s == 0.0) {
    throw DegenerateRotationError("identity MRP has no shadow set");
  }
  return Mrp(-p / s);
}

Mrp Mrp::normalized() const { return p.squaredNorm() > 1.0 ? shadow() : *this; }

Eigen::Matrix3d cross_matrix(const Eigen::Vector3d& p) {
  Eigen::Matrix3d s;
  // clang-format off
  s <<  0.0,  -p.z(),  p.y(),
        p.z(),  0.0,  -p.x(),
       -p.y(),  p.x(),  0.0;
  // clang-format on
  return s;
}

Mrp mrp_from_quaternion(const Quaternion& q) {
  const double denom = 1.0 + q.scalar;
  if (denom < 1e-12) {
    throw DegenerateRotationError("quaternion scalar part is -1; MRP is unbounded");
  }
  return Mrp(q.vec / denom).normalized();
}

Quaternion quaternion_from_mrp(const Mrp& p) {
  const double s = p.squared_norm();
  const double inv = 1.0 / (1.0 + s);
  return {2.0 * p.p * inv, (1.0 - s) * inv};
}

RotationMatrix rotation_from_mrp(const Mrp& p) {
  const double s = p.squared_norm();
  const double d = (1.0 + s) * (1.0 + s);
  const double alpha1 = 4.0 * (1.0 - s) / d;
  const double alpha2 = 8.0 / d;
  const Eigen::Matrix3d px = cross_matrix(p.p);
  return Eigen::Matrix3d::Identity() - alpha1 * px + alpha2 * px * px;
}

RotationMatrix rotation_from_quaternion(const Quaternion& q) {
  const Eigen::Vector3d& v = q.vec;
  const double s = q.scalar;
  return (s * s - v.squaredNorm()) * Eigen::Matrix3d::Identity() + 2.0 * v * v.transpose() -
         2.0 * s * cross_matrix(v);
}

Quaternion quaternion_from_rotation(const RotationMatrix& m) {
  // Shepperd: pick the largest of the four squared components for stability.
  const double tr = m.trace();
  const double b4 = 0.25 * (1.0 + tr);
  const double b1 = 0.25 * (1.0 + 2.0 * m(0, 0) - tr);
  const double b2 = 0.25 * (1.0 + 2.0 * m(1, 1) - tr);
  const double b3 = 0.25 * (1.0 + 2.0 * m(2, 2) - tr);
  Quaternion q;
  if (b4 >= b1 && b4 >= b2 && b4 >= b3) {
    const double s = std::sqrt(b4);
    q.scalar = s;
    q.vec = Eigen::Vector3d(m(1, 2) - m(2, 1), m(2, 0) - m(0, 2), m(0, 1) - m(1, 0)) / (4.0 * s);
  } else if (b1 >= b2 && b1 >= b3) {
    const double s = std::sqrt(b1);
    q.vec.x() = s;
    q.scalar = (m(1, 2) - m(2, 1)) / (4.0 * s);
    q.vec.y() = (m(0, 1) + m(1, 0)) / (4.0 * s);
    q.vec.z() = (m(2, 0) + m(0, 2)) / (4.0 * s);
  } else if (b2 >= b3) {
    const double s = std::sqrt(b2);
    q.vec.y() = s;
    q.scalar = (m(2, 0) - m(0, 2)) / (4.0 * s);
    q.vec.x() = (m(0, 1) + m(1, 0)) / (4.0 * s);
    q.vec.z() = (m(1, 2) + m(2, 1)) / (4.0 * s);
  } else {
    const double s = std::sqrt(b3);
    q.vec.z() = s;
    q.scalar = (m(0, 1) - m(1, 0)) / (4.0 * s);
    q.vec.x() = (m(2, 0) + m(0, 2)) / (4.0 * s);
    q.vec.y() = (m(1, 2) + m(2, 1)) / (4.0 * s);
  }
  if (q.scalar < 0.0) {
    q = q.negated();
  }
  return q.normalized();
}

Mrp relative_mrp(const Mrp& p, const Mrp& ref) {
  const RotationMatrix rel = rotation_from_mrp(p) * rotation_from_mrp(ref).transpose();
  // Scalar part is non-negative, so 1 + qs >= 1 and the MRP norm is at most 1.
  return mrp_from_quaternion(quaternion_from_rotation(rel));
}

Eigen::Matrix3d mrp_kinematic_matrix(const Eigen::Vector3d& p) {
  return (1.0 - p.squaredNorm()) * Eigen::Matrix3d::Identity() + 2.0 * cross_matrix(p) +
         2.0 * p * p.transpose();
}

Eigen::Matrix3d shadow_jacobian(const Eigen::Vector3d& p) {
  const double s = p.squaredNorm();
  return -(Eigen::Matrix3d::Identity() - 2.0 * p * p.transpose() / s) / s;
}

}  // namespace relnav
