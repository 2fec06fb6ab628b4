#pragma once

#include <Eigen/Geometry>

namespace bimoplan {

/// Rigid transform stored as unit quaternion plus translation.
///
/// Convention used throughout: a pose is the transform from an element's
/// local frame to the camera frame. relative_pose(a, b) returns a's pose
/// expressed in b's frame, i.e. pose_a == pose_b * relative_pose(a, b).
struct RigidTransform {
  Eigen::Quaterniond rotation{1.0, 0.0, 0.0, 0.0};
  Eigen::Vector3d translation{0.0, 0.0, 0.0};

  static RigidTransform identity() { return RigidTransform{}; }

  RigidTransform operator*(const RigidTransform& rhs) const {
    RigidTransform out;
    out.rotation = rotation * rhs.rotation;
    out.translation = translation + rotation * rhs.translation;
    out.canonicalize();
    return out;
  }

  RigidTransform inverse() const {
    RigidTransform out;
    out.rotation = rotation.conjugate();
    out.translation = -(out.rotation * translation);
    out.canonicalize();
    return out;
  }

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }

  // Unit norm, hemisphere w >= 0 (removes the quaternion double cover).
  void canonicalize() {
    rotation.normalize();
    if (rotation.w() < 0.0) rotation.coeffs() *= -1.0;
  }
};

RigidTransform make_transform(const Eigen::Quaterniond& q, const Eigen::Vector3d& t);

/// Pose of a expressed in b's frame.
RigidTransform relative_pose(const RigidTransform& a, const RigidTransform& b);

/// Shortest-arc interpolation: lerp on translation, slerp on rotation.
RigidTransform interpolate_pose(const RigidTransform& a, const RigidTransform& b, double s);

/// Rotation angle between the two transforms, radians in [0, pi].
double rotation_distance(const RigidTransform& a, const RigidTransform& b);

double translation_distance(const RigidTransform& a, const RigidTransform& b);

bool approx_equal(const RigidTransform& a, const RigidTransform& b, double tol_m,
                  double tol_rad);

}  // namespace bimoplan
