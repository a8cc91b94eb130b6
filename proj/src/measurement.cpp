#include "relnav/measurement.hpp"

#include "relnav/errors.hpp"

namespace relnav {

namespace {

constexpr std::array<std::array<int, 3>, kMarkerCount> kCornerSigns = {{
    {+1, +1, +1},  // A
    {+1, -1, +1},  // B
    {+1, -1, -1},  // C
    {+1, +1, -1},  // D
    {-1, +1, +1},  // E
    {-1, -1, +1},  // F
    {-1, -1, -1},  // G
    {-1, +1, -1},  // H
}};

// Face f has normal sign (f % 2 == 0 ? +1 : -1) along axis f / 2.
int face_axis(int face) { return face / 2; }
int face_sign(int face) { return face % 2 == 0 ? +1 : -1; }

}  // namespace

MarkerSet::MarkerSet(const BodyGeometry& geometry) : geometry_(geometry) {
  if (!(geometry.half_extents.minCoeff() > 0.0)) {
    throw DomainError("body half extents must be positive");
  }
  for (int m = 0; m < kMarkerCount; ++m) {
    const auto& s = kCornerSigns[m];
    positions_[m] = geometry.com_offset +
                    Eigen::Vector3d(s[0], s[1], s[2]).cwiseProduct(geometry.half_extents);
  }
  for (int f = 0; f < kFaceCount; ++f) {
    const int axis = face_axis(f);
    const int sign = face_sign(f);
    normals_[f] = Eigen::Vector3d::Zero();
    normals_[f](axis) = sign;
    offsets_[f] = sign * geometry.com_offset(axis) + geometry.half_extents(axis);
    int k = 0;
    for (int m = 0; m < kMarkerCount; ++m) {
      if (kCornerSigns[m][axis] == sign) {
        face_corners_[f][k++] = m;
      }
    }
  }
}

std::array<Eigen::Vector3d, kMarkerCount> marker_positions_chaser_frame(const Mrp& p,
                                                                        const Eigen::Vector3d& u,
                                                                        const MarkerSet& markers) {
  const RotationMatrix gamma_t = rotation_from_mrp(p).transpose();
  std::array<Eigen::Vector3d, kMarkerCount> out;
  for (int m = 0; m < kMarkerCount; ++m) {
    out[m] = gamma_t * markers.position(m) - u;
  }
  return out;
}

FaceMask face_visibility(const Eigen::Vector3d& camera, const MarkerSet& markers) {
  FaceMask faces;
  for (int f = 0; f < kFaceCount; ++f) {
    faces[f] = markers.normals()[f].dot(camera) > markers.face_offset(f);
  }
  if (faces.none()) {
    throw DegeneratePoseError("camera lies inside the target body");
  }
  return faces;
}

VisibilityMask marker_visibility(const Mrp& p, const Eigen::Vector3d& u, const MarkerSet& markers) {
  const Eigen::Vector3d camera = rotation_from_mrp(p) * u;
  const FaceMask faces = face_visibility(camera, markers);
  VisibilityMask mask;
  for (int f = 0; f < kFaceCount; ++f) {
    if (faces[f]) {
      for (const int m : markers.face_corners()[f]) {
        mask.set(m);
      }
    }
  }
  return mask;
}

VisibilityMask marker_visibility(const FullState12& x, const MarkerSet& markers) {
  return marker_visibility(Mrp(x.segment<3>(6)), chaser_offset(x), markers);
}

MeasurementVector synthesize_measurement(const FullState12& truth, const MarkerSet& markers,
                                         const NoiseModel& noise, std::mt19937_64& rng) {
  const Mrp p(truth.segment<3>(6));
  const Eigen::Vector3d u = chaser_offset(truth);
  const VisibilityMask visible = marker_visibility(p, u, markers);
  const auto positions = marker_positions_chaser_frame(p, u, markers);

  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  MeasurementVector out;
  std::array<Eigen::Vector3d, kMarkerCount> kept;
  for (int m = 0; m < kMarkerCount; ++m) {
    if (!visible[m]) {
      continue;
    }
    // One uniform draw per visible marker keeps the stream layout independent
    // of the dropout outcome.
    const bool failed = uniform(rng) < noise.dropout_prob;
    Eigen::Vector3d z = positions[m];
    for (int axis = 0; axis < 3; ++axis) {
      const double e = normal(rng);
      z(axis) += noise.sigma * e;
    }
    if (!failed) {
      out.mask.set(m);
      kept[m] = z;
    }
  }
  out.z.resize(3 * out.marker_count());
  int row = 0;
  for (int m = 0; m < kMarkerCount; ++m) {
    if (out.mask[m]) {
      out.z.segment<3>(row) = kept[m];
      row += 3;
    }
  }
  return out;
}

MeasurementVector synthesize_measurement(const FullState12& truth, const MarkerSet& markers,
                                         const NoiseModel& noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return synthesize_measurement(truth, markers, noise, rng);
}

MeasurementVector select_markers(const MeasurementVector& m, const VisibilityMask& subset) {
  if ((subset & ~m.mask).any()) {
    throw DimensionMismatchError("selected markers are not part of the measurement");
  }
  if (m.z.size() != 3 * m.marker_count()) {
    throw DimensionMismatchError("measurement length does not match its mask");
  }
  MeasurementVector out;
  out.mask = subset;
  out.z.resize(3 * static_cast<Eigen::Index>(subset.count()));
  int src = 0;
  int dst = 0;
  for (int k = 0; k < kMarkerCount; ++k) {
    if (!m.mask[k]) {
      continue;
    }
    if (subset[k]) {
      out.z.segment<3>(dst) = m.z.segment<3>(src);
      dst += 3;
    }
    src += 3;
  }
  return out;
}

MeasurementVector restrict_to_k_markers(const MeasurementVector& m, int k) {
  if (k < 0) {
    throw DomainError("marker limit must be non-negative");
  }
  VisibilityMask keep;
  int kept = 0;
  for (int i = 0; i < kMarkerCount && kept < k; ++i) {
    if (m.mask[i]) {
      keep.set(i);
      ++kept;
    }
  }
  return select_markers(m, keep);
}

MeasurementVector predict_measurement(const FullState12& state, const VisibilityMask& mask,
                                      const MarkerSet& markers) {
  const Mrp p(state.segment<3>(6));
  const Eigen::Vector3d u = chaser_offset(state);
  const RotationMatrix gamma_t = rotation_from_mrp(p).transpose();
  MeasurementVector out;
  out.mask = mask;
  out.z.resize(3 * static_cast<Eigen::Index>(mask.count()));
  int row = 0;
  for (int m = 0; m < kMarkerCount; ++m) {
    if (mask[m]) {
      out.z.segment<3>(row) = gamma_t * markers.position(m) - u;
      row += 3;
    }
  }
  return out;
}

}  // namespace relnav
