#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "pose6d/core/camera.hpp"
#include "pose6d/core/knn.hpp"
#include "pose6d/core/parallel.hpp"
#include "pose6d/core/rng.hpp"
#include "pose6d/core/subsample.hpp"

using namespace pose6d;

namespace {

Mat3 rot_zyx(double a, double b, double c) {
  return (Eigen::AngleAxisd(a, Vec3::UnitZ()) * Eigen::AngleAxisd(b, Vec3::UnitY()) *
          Eigen::AngleAxisd(c, Vec3::UnitX()))
      .toRotationMatrix();
}

}  // namespace

TEST_CASE("rng streams are deterministic and bounded") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
    const double u = a.uniform();
    b.next_u64();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  Rng c(7);
  for (int i = 0; i < 1000; ++i) CHECK(c.uniform_int(13) < 13);
  Rng d(3);
  double mean = 0;
  for (int i = 0; i < 20000; ++i) mean += d.normal();
  CHECK(std::abs(mean / 20000) < 0.05);
}

TEST_CASE("rigid transform enforces SO(3) and composes correctly") {
  CHECK_THROWS_AS(RigidTransform(Mat3::Identity() * 1.001, Vec3::Zero()), InvalidArgumentError);
  Mat3 mirror = Mat3::Identity();
  mirror(0, 0) = -1.0;
  CHECK_THROWS_AS(RigidTransform(mirror, Vec3::Zero()), InvalidArgumentError);

  const RigidTransform a(rot_zyx(0.3, -0.2, 0.9), Vec3(0.1, -0.4, 0.7));
  const RigidTransform b(rot_zyx(-1.1, 0.5, 0.2), Vec3(-0.3, 0.2, 0.0));
  const Vec3 p(0.4, -0.1, 0.9);
  CHECK((a.compose(b).apply(p) - a.apply(b.apply(p))).norm() < 1e-14);
  CHECK((a.inverse().apply(a.apply(p)) - p).norm() < 1e-14);
  CHECK(rotation_angle_between(a.rotation(), a.rotation()) == doctest::Approx(0.0));
  CHECK(rotation_angle_between(Mat3::Identity(), rot_zyx(0.5, 0, 0)) == doctest::Approx(0.5));
}

TEST_CASE("projection and lifting are mutually inverse at pixel centers") {
  RgbdFrame frame;
  frame.intrinsics = {280.0, 280.0, 160.0, 120.0, 320, 240};
  frame.red = frame.green = frame.blue = ImagePlane::Zero(240, 320);
  frame.depth = ImagePlane::Zero(240, 320);
  frame.depth(17, 33) = 0.62;
  frame.depth(0, 0) = 1.4;

  const XyzMap map = lift_depth(frame);
  CHECK(map.valid.count() == 2);
  CHECK(map.valid(17, 33));
  CHECK_FALSE(map.valid(100, 100));

  const auto px = project(map.at(17, 33), frame.intrinsics);
  REQUIRE(px.has_value());
  CHECK(px->u == doctest::Approx(33.0).epsilon(1e-12));
  CHECK(px->v == doctest::Approx(17.0).epsilon(1e-12));

  CHECK_THROWS_AS(project(Vec3(0, 0, -1), frame.intrinsics), BehindCameraError);
  CHECK_FALSE(project(Vec3(10, 0, 0.1), frame.intrinsics).has_value());
}

TEST_CASE("apply_transform rotates normals without translating them") {
  PointCloud cloud;
  cloud.points.resize(2, 3);
  cloud.points << 0, 0, 1, 1, 0, 0;
  cloud.normals.resize(2, 3);
  cloud.normals << 0, 0, 1, 1, 0, 0;
  const RigidTransform pose(rot_zyx(0, kPi / 2, 0), Vec3(5, 5, 5));
  const PointCloud moved = apply_transform(pose, cloud);
  CHECK((moved.points.row(0).transpose() - pose.apply(Vec3(0, 0, 1))).norm() < 1e-14);
  CHECK(std::abs(moved.normals.row(0).norm() - 1.0) < 1e-14);
  CHECK((moved.normals.row(0) - (pose.rotation() * Vec3(0, 0, 1)).transpose()).norm() < 1e-14);
}

TEST_CASE("kd-tree knn matches the brute-force scan bit for bit") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 50 + trial * 40;
    Points ref(n, 3), query(20, 3);
    for (int i = 0; i < n; ++i)
      ref.row(i) << rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1);
    // Duplicate a few rows so distance ties actually occur.
    ref.row(1) = ref.row(0);
    ref.row(n - 1) = ref.row(n / 2);
    for (int i = 0; i < 20; ++i)
      query.row(i) << rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1);

    const int k = 1 + static_cast<int>(rng.uniform_int(8));
    const IndexMatrix brute = knn_brute_force(query, ref, k);
    KdTree3 tree(ref);
    std::vector<int> out;
    for (int i = 0; i < 20; ++i) {
      tree.knn(query.row(i), k, out);
      for (int j = 0; j < k; ++j) CHECK(out[j] == brute(i, j));
    }
    const IndexMatrix dispatched = knn(query, ref, k);
    CHECK((dispatched - brute).cwiseAbs().maxCoeff() == 0);
  }
  Points ref(3, 3);
  ref.setZero();
  Points q(1, 3);
  q.setZero();
  CHECK_THROWS_AS(knn(q, ref, 4), InvalidArgumentError);
}

TEST_CASE("knn ties break toward the lowest reference index") {
  Points ref(4, 3);
  ref << 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1, 0;  // all at distance 1 from origin
  Points q(1, 3);
  q.setZero();
  const IndexMatrix idx = knn(q, ref, 4);
  for (int j = 0; j < 4; ++j) CHECK(idx(0, j) == j);
}

TEST_CASE("subsample_indices draws without replacement, deterministically") {
  const auto a = subsample_indices(100, 30, 9);
  const auto b = subsample_indices(100, 30, 9);
  CHECK(a == b);
  const std::set<int> unique(a.begin(), a.end());
  CHECK(unique.size() == 30);
  for (int i : a) {
    CHECK(i >= 0);
    CHECK(i < 100);
  }
  const auto all = subsample_indices(10, 10, 1);
  CHECK(std::set<int>(all.begin(), all.end()).size() == 10);
  CHECK_THROWS_AS(subsample_indices(5, 6, 0), InvalidArgumentError);
}

TEST_CASE("parallel_for covers every index exactly once") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(1000, [&](int i) { hits[i].fetch_add(1); });
  for (auto& h : hits) CHECK(h.load() == 1);
}
