#include <doctest.h>

#include <random>

#include "bimoplan/geometry.hpp"

using namespace bimoplan;

namespace {

std::mt19937_64 rng(12345);

RigidTransform random_pose() {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::Quaterniond q(u(rng), u(rng), u(rng), u(rng));
  while (q.norm() < 1e-3) q = Eigen::Quaterniond(u(rng), u(rng), u(rng), u(rng));
  return make_transform(q.normalized(), Eigen::Vector3d(u(rng), u(rng), u(rng)));
}

}  // namespace

TEST_CASE("relative pose of a pose with itself is identity") {
  for (int i = 0; i < 20; ++i) {
    const RigidTransform a = random_pose();
    const RigidTransform rel = relative_pose(a, a);
    CHECK(rel.translation.norm() < 1e-12);
    CHECK(rotation_distance(rel, RigidTransform::identity()) < 1e-9);
  }
}

TEST_CASE("relative pose recovers a plain offset") {
  RigidTransform b;  // identity at origin
  RigidTransform a = make_transform(Eigen::Quaterniond::Identity(),
                                    Eigen::Vector3d(1.0, 0.0, 0.0));
  const RigidTransform rel = relative_pose(a, b);
  CHECK(rel.translation.isApprox(Eigen::Vector3d(1.0, 0.0, 0.0), 1e-12));
}

TEST_CASE("pose_b composed with relative_pose(a,b) reconstructs pose_a") {
  for (int i = 0; i < 100; ++i) {
    const RigidTransform a = random_pose();
    const RigidTransform b = random_pose();
    const RigidTransform recon = b * relative_pose(a, b);
    CHECK(translation_distance(recon, a) < 1e-9);
    CHECK(rotation_distance(recon, a) < 1e-9);
  }
}

TEST_CASE("relative poses in both directions compose to identity") {
  for (int i = 0; i < 100; ++i) {
    const RigidTransform a = random_pose();
    const RigidTransform b = random_pose();
    const RigidTransform round = relative_pose(a, b) * relative_pose(b, a);
    CHECK(translation_distance(round, RigidTransform::identity()) < 1e-9);
    CHECK(rotation_distance(round, RigidTransform::identity()) < 1e-9);
  }
}

TEST_CASE("transform composed with its inverse is identity") {
  for (int i = 0; i < 50; ++i) {
    const RigidTransform a = random_pose();
    const RigidTransform round = a * a.inverse();
    CHECK(translation_distance(round, RigidTransform::identity()) < 1e-9);
    CHECK(rotation_distance(round, RigidTransform::identity()) < 1e-9);
  }
}

TEST_CASE("interpolation between identical endpoints is exact") {
  const RigidTransform a = random_pose();
  for (double s : {0.0, 0.25, 0.5, 0.9, 1.0}) {
    const RigidTransform mid = interpolate_pose(a, a, s);
    CHECK(mid.translation == a.translation);  // bit-exact, not approximate
    CHECK(rotation_distance(mid, a) < 1e-12);
  }
}

TEST_CASE("interpolation endpoints match the inputs") {
  const RigidTransform a = random_pose();
  const RigidTransform b = random_pose();
  CHECK(translation_distance(interpolate_pose(a, b, 0.0), a) < 1e-12);
  CHECK(translation_distance(interpolate_pose(a, b, 1.0), b) < 1e-12);
  CHECK(rotation_distance(interpolate_pose(a, b, 1.0), b) < 1e-9);
}

TEST_CASE("interpolation takes the shortest arc across the double cover") {
  RigidTransform a;  // identity
  RigidTransform b = a;
  b.rotation = Eigen::Quaterniond(Eigen::AngleAxisd(0.2, Eigen::Vector3d::UnitZ()));
  RigidTransform b_neg = b;
  b_neg.rotation.coeffs() *= -1.0;  // same rotation, opposite sign
  const RigidTransform m1 = interpolate_pose(a, b, 0.5);
  const RigidTransform m2 = interpolate_pose(a, b_neg, 0.5);
  CHECK(rotation_distance(m1, m2) < 1e-9);
  CHECK(m1.rotation.w() >= 0.0);
}

TEST_CASE("canonicalization keeps quaternions on the w >= 0 hemisphere") {
  RigidTransform t;
  t.rotation = Eigen::Quaterniond(-1.0, 0.0, 0.0, 0.0);
  t.canonicalize();
  CHECK(t.rotation.w() == doctest::Approx(1.0));
}
