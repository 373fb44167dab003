#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pose6d/core/camera.hpp"
#include "pose6d/synth/objects.hpp"
#include "pose6d/synth/scene.hpp"

using namespace pose6d;

TEST_CASE("procedural objects expose exact geometry metadata") {
  const ProceduralObject box = make_box("b", {0.08, 0.06, 0.05});
  CHECK(box.surface.size() > 1000);
  CHECK(box.surface.has_normals());
  CHECK(box.surface.has_colors());
  CHECK(box.diameter == doctest::Approx(Vec3(0.08, 0.06, 0.05).norm()));
  CHECK_FALSE(box.symmetric);

  const ProceduralObject cyl = make_cylinder("c", 0.025, 0.09);
  CHECK(cyl.symmetric);
  CHECK(cyl.diameter == doctest::Approx(std::hypot(0.05, 0.09)));

  const ProceduralObject sphere = make_sphere("s", 0.03);
  CHECK(sphere.diameter == doctest::Approx(0.06));
  for (int i = 0; i < sphere.surface.size(); ++i)
    CHECK(sphere.surface.points.row(i).norm() == doctest::Approx(0.03).epsilon(1e-9));

  const ProceduralObject cube = make_blob_cube("bc");
  CHECK(cube.blobs.size() == 8);
  for (const auto& blob : cube.blobs) {
    CHECK(std::abs(std::abs(blob.center.z()) - 0.04) < 1e-12);
    CHECK(std::abs(std::abs(blob.center.x()) - 0.022) < 1e-12);
    CHECK(std::abs(std::abs(blob.center.y()) - 0.022) < 1e-12);
  }
}

TEST_CASE("splat_render keeps the nearest sample per pixel") {
  // A small plane at z = 0.5 in front of a large one at z = 0.6: contested
  // pixels must carry the nearer plane's depth and class, the far plane's
  // uncovered rim stays visible.
  const ProceduralObject near_plane = make_plane("near", 0.06, 0.06);
  const ProceduralObject far_plane = make_plane("far", 0.2, 0.2);
  const CameraIntrinsics intr{100, 100, 32, 32, 64, 64};
  std::vector<RenderInstance> instances(2);
  instances[0] = {0, 1, 1, RigidTransform(Mat3::Identity(), {0, 0, 0.5})};
  instances[1] = {1, 2, 2, RigidTransform(Mat3::Identity(), {0, 0, 0.6})};
  const RenderResult result = splat_render({near_plane, far_plane}, instances, intr);

  const auto& ann = result.annotation;
  int front = 0, back = 0;
  for (int v = 0; v < 64; ++v) {
    for (int u = 0; u < 64; ++u) {
      if (ann.semantic(v, u) == 1) {
        ++front;
        CHECK(result.frame.depth(v, u) == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(ann.instance(v, u) == 1);
      } else if (ann.semantic(v, u) == 2) {
        ++back;
        CHECK(result.frame.depth(v, u) == doctest::Approx(0.6).epsilon(1e-9));
      } else {
        CHECK(ann.instance(v, u) == -1);
      }
    }
  }
  // Near plane footprint: 0.06 m * 100 px / 0.5 m = 12 px square.
  CHECK(front > 100);
  CHECK(front < 200);
  CHECK(back > 500);
  REQUIRE(ann.instances.size() == 2);
  // Visibility counts winning samples over all samples, so a fully visible
  // but densely sampled object still sits well below 1; occlusion must only
  // ever push it further down. The occluded far plane loses its center.
  const double near_vis = ann.info_for(1).visibility;
  const double far_vis = ann.info_for(2).visibility;
  CHECK(near_vis > 0.0);
  CHECK(far_vis > 0.0);
  RenderInstance solo = instances[1];
  solo.object_index = 0;
  const RenderResult alone = splat_render({far_plane}, {solo}, intr);
  CHECK(far_vis < alone.annotation.info_for(2).visibility);
}

TEST_CASE("make_scene is bitwise deterministic in its seed") {
  const SceneSpec spec = default_scene_spec();
  const SceneBundle a = make_scene(spec, 77);
  const SceneBundle b = make_scene(spec, 77);
  CHECK((a.frame.depth - b.frame.depth).abs().maxCoeff() == 0.0);
  CHECK((a.frame.red - b.frame.red).abs().maxCoeff() == 0.0);
  CHECK((a.votes.points - b.votes.points).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(a.annotation.instances.size() == b.annotation.instances.size());
  for (size_t i = 0; i < a.annotation.instances.size(); ++i) {
    const auto& ia = a.annotation.instances[i];
    const auto& ib = b.annotation.instances[i];
    CHECK((ia.pose.translation() - ib.pose.translation()).norm() == 0.0);
    CHECK((ia.pose.rotation() - ib.pose.rotation()).norm() == 0.0);
  }
  const SceneBundle c = make_scene(spec, 78);
  CHECK((a.frame.depth - c.frame.depth).abs().maxCoeff() > 0.0);
}

TEST_CASE("scene bundles satisfy their own structural contracts") {
  const SceneBundle bundle = make_scene(default_scene_spec(), 3);
  CHECK_NOTHROW(bundle.frame.validate());
  CHECK_NOTHROW(bundle.votes.validate());
  // The backdrop plane is itself an instance with class 0; object instances
  // carry classes >= 1.
  int n_objects = 0;
  for (const auto& info : bundle.annotation.instances) {
    if (info.class_id == 0) continue;
    ++n_objects;
    CHECK(bundle.classes.count(info.class_id) == 1);
    CHECK(info.visibility > 0.0);
    CHECK(info.pose.translation().z() >= 0.45);
    CHECK(info.pose.translation().z() <= 0.70);
  }
  CHECK(n_objects >= 2);
  CHECK(n_objects <= 3);
  CHECK(bundle.votes.size() == default_scene_spec().vote_points);
  for (const auto& [class_id, cm] : bundle.classes) {
    CHECK(cm.keypoints.count() == 8);
    CHECK(cm.points.rows() > 0);
  }
}

TEST_CASE("ground-truth votes point exactly at posed targets") {
  const SceneBundle bundle = make_scene(default_scene_spec(), 12);
  const VoteField& votes = bundle.votes;
  int labeled = 0;
  for (int i = 0; i < votes.size(); ++i) {
    if (votes.semantic[i] == 0) {
      CHECK(votes.center_offset.row(i).norm() == 0.0);
      continue;
    }
    ++labeled;
    // Identify the instance this point belongs to by reprojecting its offset.
    const Vec3 voted_center = votes.points.row(i).transpose() + votes.center_offset.row(i).transpose();
    double best = 1e9;
    const InstanceInfo* owner = nullptr;
    for (const auto& info : bundle.annotation.instances) {
      if (info.class_id == 0) continue;  // backdrop
      const KeypointModel& km = bundle.classes.at(info.class_id).keypoints;
      const double d = (voted_center - info.pose.apply(km.center)).norm();
      if (d < best) {
        best = d;
        owner = &info;
      }
    }
    REQUIRE(owner != nullptr);
    CHECK(best < 1e-9);
    const KeypointModel& km = bundle.classes.at(owner->class_id).keypoints;
    for (int j = 0; j < km.count(); ++j) {
      const Vec3 voted = votes.points.row(i).transpose() + votes.keypoint_offsets[j].row(i).transpose();
      CHECK((voted - owner->pose.apply(km.keypoints.row(j).transpose())).norm() < 1e-9);
    }
  }
  CHECK(labeled > 100);
}

TEST_CASE("corrupt_votes replaces exactly round(frac * N) rows") {
  const SceneBundle bundle = make_scene(default_scene_spec(), 8);
  const VoteField& clean = bundle.votes;
  const double frac = 0.1;
  const VoteField noisy = corrupt_votes(clean, 0.0, frac, 99);
  REQUIRE(noisy.size() == clean.size());
  int changed = 0;
  for (int i = 0; i < clean.size(); ++i)
    if ((noisy.center_offset.row(i) - clean.center_offset.row(i)).norm() != 0.0) ++changed;
  CHECK(changed == static_cast<int>(std::lround(frac * clean.size())));
  for (int i = 0; i < clean.size(); ++i) {
    CHECK(noisy.center_offset.row(i).cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
    CHECK(noisy.semantic[i] == clean.semantic[i]);
  }

  const VoteField jittered = corrupt_votes(clean, 0.005, 0.0, 7);
  double max_shift = 0;
  for (int i = 0; i < clean.size(); ++i)
    max_shift = std::max(max_shift,
                         (jittered.center_offset.row(i) - clean.center_offset.row(i)).norm());
  CHECK(max_shift > 0.0);
  CHECK(max_shift < 0.05);  // ~10 sigma; gross deviation means broken scaling
}
