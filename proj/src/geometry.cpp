#include "bimoplan/geometry.hpp"

#include <cmath>

namespace bimoplan {

RigidTransform make_transform(const Eigen::Quaterniond& q, const Eigen::Vector3d& t) {
  RigidTransform out;
  out.rotation = q;
  out.translation = t;
  out.canonicalize();
  return out;
}

RigidTransform relative_pose(const RigidTransform& a, const RigidTransform& b) {
  return b.inverse() * a;
}

RigidTransform interpolate_pose(const RigidTransform& a, const RigidTransform& b, double s) {
  RigidTransform out;
  // a + s*(b-a) is exact for identical endpoints; constant streams must stay
  // bit-constant through resampling or the windowed estimators see noise.
  out.translation = a.translation + s * (b.translation - a.translation);
  Eigen::Quaterniond qb = b.rotation;
  if (a.rotation.dot(qb) < 0.0) qb.coeffs() *= -1.0;
  out.rotation = a.rotation.slerp(s, qb);
  out.canonicalize();
  return out;
}

double rotation_distance(const RigidTransform& a, const RigidTransform& b) {
  // atan2 form stays well-conditioned for near-identical rotations, where
  // acos of the dot product loses half the significant digits.
  const Eigen::Quaterniond delta = a.rotation.conjugate() * b.rotation;
  return 2.0 * std::atan2(delta.vec().norm(), std::abs(delta.w()));
}

double translation_distance(const RigidTransform& a, const RigidTransform& b) {
  return (a.translation - b.translation).norm();
}

bool approx_equal(const RigidTransform& a, const RigidTransform& b, double tol_m,
                  double tol_rad) {
  return translation_distance(a, b) <= tol_m && rotation_distance(a, b) <= tol_rad;
}

}  // namespace bimoplan
