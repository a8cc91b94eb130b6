#pragma once

#include <Eigen/Dense>

namespace relnav {

/// Unit quaternion in scalar-last layout (q1, q2, q3 | q4).
///
/// vec = n sin(phi/2), scalar = cos(phi/2).
struct Quaternion {
  Eigen::Vector3d vec = Eigen::Vector3d::Zero();
  double scalar = 1.0;

  static Quaternion identity() { return {}; }
  /// Rotation of `angle` radians about the unit `axis`.
  static Quaternion from_axis_angle(const Eigen::Vector3d& axis, double angle);

  [[nodiscard]] double norm() const;
  [[nodiscard]] Quaternion normalized() const;
  [[nodiscard]] Quaternion negated() const { return {-vec, -scalar}; }
};

/// Modified Rodrigues Parameters, p = n tan(phi/4).
struct Mrp {
  Eigen::Vector3d p = Eigen::Vector3d::Zero();

  Mrp() = default;
  explicit Mrp(const Eigen::Vector3d& v) : p(v) {}
  Mrp(double p1, double p2, double p3) : p(p1, p2, p3) {}

  [[nodiscard]] double squared_norm() const { return p.squaredNorm(); }
  /// The equivalent parameter set -p/|p|^2 describing the same rotation.
  /// Throws DegenerateRotationError for p = 0.
  [[nodiscard]] Mrp shadow() const;
  /// Returns the shadow set when |p| > 1, otherwise a copy.
  [[nodiscard]] Mrp normalized() const;
};

/// Direction cosine matrix; maps chaser-frame components into the target frame.
using RotationMatrix = Eigen::Matrix3d;

/// Skew-symmetric matrix S with S b = p x b.
Eigen::Matrix3d cross_matrix(const Eigen::Vector3d& p);

/// p = qv / (1 + qs), shadow-switched when |p| > 1.
/// Throws DegenerateRotationError when 1 + qs < 1e-12.
Mrp mrp_from_quaternion(const Quaternion& q);

Quaternion quaternion_from_mrp(const Mrp& p);

/// Gamma(p) = I - a1 [p x] + a2 [p x]^2 with
/// a1 = 4 (1 - p'p) / (1 + p'p)^2 and a2 = 8 / (1 + p'p)^2.
RotationMatrix rotation_from_mrp(const Mrp& p);

RotationMatrix rotation_from_quaternion(const Quaternion& q);

/// Shepperd's method; returns the quaternion with non-negative scalar part.
Quaternion quaternion_from_rotation(const RotationMatrix& m);

/// MRP of Gamma(p) Gamma(ref)^T, i.e. the attitude of `p` relative to `ref`.
/// Returned with |result| <= 1.
Mrp relative_mrp(const Mrp& p, const Mrp& ref);

/// Kinematic matrix B(p) = (1 - p'p) I + 2 [p x] + 2 p p', so pdot = B(p) w / 4.
Eigen::Matrix3d mrp_kinematic_matrix(const Eigen::Vector3d& p);

/// Jacobian of the shadow map p -> -p / |p|^2.
Eigen::Matrix3d shadow_jacobian(const Eigen::Vector3d& p);

}  // namespace relnav
