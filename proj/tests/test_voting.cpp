#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pose6d/core/rng.hpp"
#include "pose6d/voting/detect.hpp"
#include "pose6d/voting/mean_shift.hpp"

using namespace pose6d;

namespace {

Points cluster_around(Rng& rng, const Vec3& center, int n, double sigma) {
  Points pts(n, 3);
  for (int i = 0; i < n; ++i)
    pts.row(i) << center.x() + rng.normal(0, sigma), center.y() + rng.normal(0, sigma),
        center.z() + rng.normal(0, sigma);
  return pts;
}

/// Vote field with one instance per requested class center; all offsets exact.
VoteField exact_field(Rng& rng, const std::vector<std::pair<int, Vec3>>& instances,
                      const Points& keypoints, int per_instance) {
  const int k = static_cast<int>(keypoints.rows());
  const int n = per_instance * static_cast<int>(instances.size());
  VoteField field;
  field.points.resize(n, 3);
  field.semantic.resize(n);
  field.center_offset.resize(n, 3);
  field.keypoint_offsets.assign(k, Points(n, 3));
  int row = 0;
  for (const auto& [class_id, center] : instances) {
    for (int i = 0; i < per_instance; ++i, ++row) {
      const Vec3 p = center + Vec3(rng.normal(0, 0.01), rng.normal(0, 0.01), rng.normal(0, 0.01));
      field.points.row(row) = p.transpose();
      field.semantic[row] = class_id;
      field.center_offset.row(row) = (center - p).transpose();
      for (int j = 0; j < k; ++j)
        field.keypoint_offsets[j].row(row) = (center + keypoints.row(j).transpose() - p).transpose();
    }
  }
  return field;
}

}  // namespace

TEST_CASE("mean_shift finds the modes of well-separated clusters") {
  Rng rng(13);
  Points samples(120, 3);
  samples.topRows(60) = cluster_around(rng, {0, 0, 0.5}, 60, 0.004);
  samples.bottomRows(60) = cluster_around(rng, {0.3, 0, 0.5}, 60, 0.004);
  const MeanShiftResult result = mean_shift(samples, 0.04);
  REQUIRE(result.modes.rows() == 2);
  CHECK((result.modes.row(0) - Eigen::RowVector3d(0, 0, 0.5)).norm() < 0.01);
  CHECK((result.modes.row(1) - Eigen::RowVector3d(0.3, 0, 0.5)).norm() < 0.01);
  CHECK(result.assignment.size() == 120);
  CHECK(result.support[0] == 60);
  CHECK(result.support[1] == 60);
  for (int i = 0; i < 60; ++i) CHECK(result.assignment[i] == 0);
}

TEST_CASE("mean_shift merges modes within half a bandwidth") {
  Points samples(40, 3);
  Rng rng(5);
  samples = cluster_around(rng, {0.1, 0.2, 0.3}, 40, 0.002);
  const MeanShiftResult result = mean_shift(samples, 0.05);
  CHECK(result.modes.rows() == 1);
  CHECK(result.support[0] == 40);
}

TEST_CASE("segment_instances separates same-class instances and drops slivers") {
  Rng rng(23);
  Points keypoints(4, 3);
  keypoints << 0.02, 0, 0, -0.02, 0, 0, 0, 0.02, 0, 0, 0, 0.02;
  VoteField field = exact_field(
      rng, {{1, {0, 0, 0.5}}, {1, {0.25, 0, 0.55}}, {2, {-0.2, 0.1, 0.6}}}, keypoints, 50);
  // A below-threshold sliver: relabel 3 rows of the class-2 block as class 3.
  for (int i = 0; i < 3; ++i) field.semantic[100 + i] = 3;

  const auto detections = segment_instances(field);
  int class1 = 0, class2 = 0, class3 = 0;
  for (const auto& det : detections) {
    if (det.class_id == 1) ++class1;
    if (det.class_id == 2) ++class2;
    if (det.class_id == 3) ++class3;
    CHECK(det.member_indices.size() >= 10);
  }
  CHECK(class1 == 2);
  CHECK(class2 == 1);
  CHECK(class3 == 0);  // min_cluster_size filters the sliver
}

TEST_CASE("exact votes recover the instance pose through detect_and_fit") {
  Rng rng(37);
  Points keypoints(4, 3);
  keypoints << 0.03, 0, 0, -0.03, 0.01, 0, 0, 0.03, 0.01, -0.01, -0.02, 0.03;
  KeypointModel model;
  model.object_id = "thing";
  model.keypoints = keypoints;
  model.center = Vec3::Zero();
  model.diameter = 0.08;

  const Vec3 c1(0.02, -0.03, 0.5), c2(0.3, 0.05, 0.62);
  VoteField field = exact_field(rng, {{1, c1}, {1, c2}}, keypoints, 80);
  const auto detections = detect_and_fit(field, {{1, model}});
  REQUIRE(detections.size() == 2);
  for (const auto& det : detections) {
    REQUIRE(det.pose.has_value());
    const Vec3 expect = (det.voted_center - c1).norm() < (det.voted_center - c2).norm() ? c1 : c2;
    CHECK((det.pose->translation() - expect).norm() < 1e-6);
    CHECK(rotation_angle_between(det.pose->rotation(), Mat3::Identity()) < 1e-6);
    CHECK(det.keypoint_support.size() == 4);
    CHECK(det.keypoint_support.minCoeff() >= 10);
    CHECK(det.voted_keypoints.rows() == 4);
  }
}

TEST_CASE("detect_and_fit demands a model for every labeled class") {
  Rng rng(3);
  Points keypoints(3, 3);
  keypoints << 0.02, 0, 0, 0, 0.02, 0, 0, 0, 0.02;
  VoteField field = exact_field(rng, {{5, {0, 0, 0.5}}}, keypoints, 40);
  CHECK_THROWS_AS(detect_and_fit(field, {}), ConfigError);
}

TEST_CASE("vote field validation catches shape mismatches") {
  VoteField field;
  field.points = Points::Zero(4, 3);
  field.semantic = Eigen::VectorXi::Zero(4);
  field.center_offset = Points::Zero(3, 3);  // wrong row count
  field.keypoint_offsets = {Points::Zero(4, 3)};
  CHECK_THROWS_AS(field.validate(), InvalidArgumentError);
}
