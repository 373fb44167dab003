#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pose6d/core/rng.hpp"
#include "pose6d/metrics/metrics.hpp"

using namespace pose6d;

namespace {

RigidTransform random_pose(Rng& rng, double t_range = 0.2) {
  const Eigen::Quaterniond q =
      Eigen::Quaterniond(rng.normal(), rng.normal(), rng.normal(), rng.normal()).normalized();
  return RigidTransform(
      q.toRotationMatrix(),
      Vec3(rng.uniform(-t_range, t_range), rng.uniform(-t_range, t_range),
           rng.uniform(-t_range, t_range)));
}

PointCloud random_model(Rng& rng, int n) {
  PointCloud cloud;
  cloud.points.resize(n, 3);
  for (int i = 0; i < n; ++i)
    cloud.points.row(i) << rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05),
        rng.uniform(-0.05, 0.05);
  return cloud;
}

}  // namespace

TEST_CASE("identical poses give zero distance under both metrics") {
  Rng rng(2);
  const PointCloud model = random_model(rng, 40);
  const RigidTransform pose = random_pose(rng);
  CHECK(add(model, pose, pose) == doctest::Approx(0.0));
  CHECK(add_s(model, pose, pose) == doctest::Approx(0.0));
}

TEST_CASE("add_s never exceeds add") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const PointCloud model = random_model(rng, 30);
    const RigidTransform pred = random_pose(rng);
    const RigidTransform gt = random_pose(rng);
    const double a = add(model, pred, gt);
    const double s = add_s(model, pred, gt);
    CHECK(s >= 0.0);
    CHECK(s <= a + 1e-12);
    CHECK(add_dispatch(model, pred, gt, false) == a);
    CHECK(add_dispatch(model, pred, gt, true) == s);
  }
}

TEST_CASE("the two-point half-turn fixture separates add from add_s") {
  PointCloud model;
  model.points.resize(2, 3);
  model.points << 1, 0, 0, -1, 0, 0;
  Mat3 half_turn;
  half_turn << -1, 0, 0, 0, -1, 0, 0, 0, 1;  // pi about z swaps the endpoints
  const RigidTransform pred(half_turn, Vec3::Zero());
  const RigidTransform gt = RigidTransform::identity();
  CHECK(std::abs(add(model, pred, gt) - 2.0) <= 1e-12);
  CHECK(std::abs(add_s(model, pred, gt)) <= 1e-12);
}

TEST_CASE("add_auc equals a dense grid integral") {
  Rng rng(9);
  std::vector<double> distances;
  for (int i = 0; i < 200; ++i) distances.push_back(rng.uniform(0.0, 0.15));
  distances.push_back(0.0);
  distances.push_back(0.1);

  const double closed = add_auc(distances, 0.1);
  const int steps = 20000;
  double grid = 0.0;
  for (int j = 1; j <= steps; ++j)
    grid += accuracy_at_threshold(distances, 0.1 * j / steps) / steps;
  CHECK(std::abs(closed - grid) < 1e-3);

  CHECK(add_auc({0.0, 0.0}) == doctest::Approx(1.0));
  CHECK(add_auc({1.0, 2.0}) == doctest::Approx(0.0));
  CHECK(add_auc({0.05}, 0.1) == doctest::Approx(0.5));
}

TEST_CASE("accuracy thresholds are inclusive, add_01d strict") {
  const std::vector<double> d = {0.01, 0.02, 0.03};
  CHECK(accuracy_at_threshold(d, 0.02) == doctest::Approx(2.0 / 3.0));
  CHECK(accuracy_at_threshold(d, 0.005) == doctest::Approx(0.0));

  // Diameter 16 makes 0.1 * d exactly representable, so the boundary record
  // sits exactly on the threshold and the strict comparison must exclude it.
  std::vector<EvalRecord> records;
  records.push_back({"a", false, 1.5, 16.0});
  records.push_back({"b", false, 1.6, 16.0});
  records.push_back({"c", false, 50.0, 16.0});
  CHECK(add_01d(records) == doctest::Approx(1.0 / 3.0));
}
