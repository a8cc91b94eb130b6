#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "relnav/attitude.hpp"
#include "relnav/dynamics.hpp"

namespace relnav {

inline constexpr int kMarkerCount = 8;
inline constexpr int kFaceCount = 6;

/// Parallelepiped target body. Offsets are relative to the centre of mass in
/// the target body frame.
struct BodyGeometry {
  Eigen::Vector3d half_extents = Eigen::Vector3d::Ones();  // m
  Eigen::Vector3d com_offset = Eigen::Vector3d::Zero();    // geometric centre minus CoM, m
};

/// Marker ordering A..H, one bit per marker.
using VisibilityMask = std::bitset<kMarkerCount>;
using FaceMask = std::bitset<kFaceCount>;

/// The eight body corners A..H and the six faces (+x, -x, +y, -y, +z, -z).
///
/// Corner sign pattern (x, y, z):
///   A + + +   B + - +   C + - -   D + + -
///   E - + +   F - - +   G - - -   H - + -
class MarkerSet {
 public:
  explicit MarkerSet(const BodyGeometry& geometry);

  [[nodiscard]] const BodyGeometry& geometry() const { return geometry_; }
  [[nodiscard]] const std::array<Eigen::Vector3d, kMarkerCount>& positions() const { return positions_; }
  [[nodiscard]] const Eigen::Vector3d& position(int marker) const { return positions_[marker]; }
  [[nodiscard]] const std::array<Eigen::Vector3d, kFaceCount>& normals() const { return normals_; }
  [[nodiscard]] const std::array<std::array<int, 4>, kFaceCount>& face_corners() const { return face_corners_; }
  /// Plane offset d_f of face f: the face lies on n_f . x = d_f.
  [[nodiscard]] double face_offset(int face) const { return offsets_[face]; }

  static char label(int marker) { return static_cast<char>('A' + marker); }

 private:
  BodyGeometry geometry_;
  std::array<Eigen::Vector3d, kMarkerCount> positions_;
  std::array<Eigen::Vector3d, kFaceCount> normals_;
  std::array<double, kFaceCount> offsets_{};
  std::array<std::array<int, 4>, kFaceCount> face_corners_{};
};

/// Stacked positions of the visible markers in label order, 3 entries each.
struct MeasurementVector {
  Eigen::VectorXd z;
  VisibilityMask mask;

  [[nodiscard]] int marker_count() const { return static_cast<int>(mask.count()); }
  [[nodiscard]] bool empty() const { return mask.none(); }
};

struct NoiseModel {
  double sigma = 0.02;        // m, per axis
  double dropout_prob = 0.0;  // independent per-marker failure probability

  [[nodiscard]] Eigen::MatrixXd covariance(int dim) const {
    return Eigen::MatrixXd::Identity(dim, dim) * (sigma * sigma);
  }
};

/// Chaser centre of mass relative to the target CoM in the chaser frame.
/// The chaser body frame coincides with LVLH, so u = -r_r.
inline Eigen::Vector3d chaser_offset(const FullState12& x) { return -x.head<3>(); }

/// z_i = Gamma(p)^T v_i - u for all eight markers.
std::array<Eigen::Vector3d, kMarkerCount> marker_positions_chaser_frame(const Mrp& p,
                                                                        const Eigen::Vector3d& u,
                                                                        const MarkerSet& markers);

/// Back-face culling. `camera` is the chaser position relative to the target
/// CoM in the target body frame; face f is visible iff the camera lies strictly
/// on the outer side of its plane. Throws DegeneratePoseError if the camera is
/// inside (or on) the body.
FaceMask face_visibility(const Eigen::Vector3d& camera, const MarkerSet& markers);

/// A marker is visible iff at least one of its three faces is visible.
VisibilityMask marker_visibility(const Mrp& p, const Eigen::Vector3d& u, const MarkerSet& markers);
VisibilityMask marker_visibility(const FullState12& x, const MarkerSet& markers);

/// Noisy marker measurement of the truth state; visibility from the truth,
/// per-marker Bernoulli dropout, Gaussian noise with std `sigma` per axis.
MeasurementVector synthesize_measurement(const FullState12& truth, const MarkerSet& markers,
                                         const NoiseModel& noise, std::mt19937_64& rng);
MeasurementVector synthesize_measurement(const FullState12& truth, const MarkerSet& markers,
                                         const NoiseModel& noise, std::uint64_t seed);

/// Keeps the first min(k, i) visible markers in label order.
MeasurementVector restrict_to_k_markers(const MeasurementVector& m, int k);

/// Extracts the blocks of `subset` from `m`. `subset` must be contained in m.mask.
MeasurementVector select_markers(const MeasurementVector& m, const VisibilityMask& subset);

/// Noiseless measurement function h(x) over exactly the markers in `mask`.
MeasurementVector predict_measurement(const FullState12& state, const VisibilityMask& mask,
                                      const MarkerSet& markers);

}  // namespace relnav
