#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pose6d/keypoints/dog.hpp"
#include "pose6d/keypoints/fps.hpp"
#include "pose6d/keypoints/sift_fps.hpp"
#include "pose6d/keypoints/viewpoints.hpp"
#include "pose6d/synth/objects.hpp"

using namespace pose6d;

TEST_CASE("fps greedily maximizes the minimum distance, ties to lowest index") {
  Points line(5, 3);
  line << 0, 0, 0, 1, 0, 0, 4, 0, 0, 9, 0, 0, 10, 0, 0;
  const auto picks = fps(line, 3, 0);
  REQUIRE(picks.size() == 3);
  CHECK(picks[0] == 0);
  CHECK(picks[1] == 4);  // x = 10 is farthest from x = 0
  CHECK(picks[2] == 2);  // x = 4: min-dist 4 beats x = 9 (1) and x = 1 (1)

  Points square(4, 3);
  square << 0, 0, 0, 1, 0, 0, 0, 1, 0, 1, 1, 0;
  const auto tie = fps(square, 2, 0);
  CHECK(tie[1] == 3);  // the diagonal; equidistant corners lose to it
  const auto tie2 = fps(square, 3, 0);
  CHECK(tie2[2] == 1);  // corners 1 and 2 tie at distance 1; lowest index wins
}

TEST_CASE("farthest_from_centroid and coverage_radius behave as advertised") {
  Points pts(4, 3);
  pts << 0, 0, 0, 1, 0, 0, 0, 2, 0, 0.2, 0.2, 0;
  CHECK(farthest_from_centroid(pts) == 2);

  Points one(1, 3), two(2, 3);
  one << 0, 0, 0;
  two << 0, 0, 0, 0, 2, 0;
  CHECK(coverage_radius(pts, one) == doctest::Approx(2.0));
  CHECK(coverage_radius(pts, two) <= coverage_radius(pts, one));
  CHECK(model_diameter(pts) == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("fps_select yields surface points with correct bookkeeping") {
  const ProceduralObject obj = make_box("box", {0.08, 0.06, 0.05});
  const KeypointModel model = fps_select(obj, 8);
  CHECK(model.count() == 8);
  CHECK(model.object_id == "box");
  CHECK(model.diameter == doctest::Approx(obj.diameter));
  for (int i = 0; i < 8; ++i) {
    double best = 1e9;
    for (int j = 0; j < obj.surface.size(); ++j)
      best = std::min(best, (model.keypoints.row(i) - obj.surface.points.row(j)).norm());
    CHECK(best < 1e-12);  // selected points are actual surface samples
  }
  const KeypointModel again = fps_select(obj, 8);
  CHECK((again.keypoints - model.keypoints).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gaussian_blur is mass-preserving on constants and separable") {
  ImagePlane flat = ImagePlane::Constant(16, 16, 0.37);
  const ImagePlane blurred = gaussian_blur(flat, 2.0);
  CHECK((blurred - 0.37).abs().maxCoeff() < 1e-12);
  const ImagePlane same = gaussian_blur(flat, 0.0);
  CHECK((same - flat).abs().maxCoeff() == 0.0);
}

TEST_CASE("dog detector localizes an isolated gaussian blob") {
  ImagePlane img = ImagePlane::Zero(64, 64);
  const double cx = 31.3, cy = 24.7, sigma = 2.5;
  for (int v = 0; v < 64; ++v)
    for (int u = 0; u < 64; ++u)
      img(v, u) = std::exp(-((u - cx) * (u - cx) + (v - cy) * (v - cy)) / (2 * sigma * sigma));

  const auto kps = detect_dog_keypoints(img);
  REQUIRE(!kps.empty());
  double best = 1e9;
  for (const auto& kp : kps) best = std::min(best, std::hypot(kp.u - cx, kp.v - cy));
  CHECK(best < 0.5);
}

TEST_CASE("sphere viewpoints sit on the sphere and look at the origin") {
  const Points vp = sphere_viewpoints(60, 2.0);
  REQUIRE(vp.rows() == 60);
  for (int i = 0; i < 60; ++i) CHECK(vp.row(i).norm() == doctest::Approx(2.0));
  const auto poses = look_at_origin(vp);
  for (int i = 0; i < 60; ++i) {
    // Camera-frame origin direction must be +z (looking straight at it).
    const Vec3 cam = poses[i].apply(Vec3::Zero());
    CHECK(cam.x() == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(cam.y() == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(cam.z() == doctest::Approx(2.0));
  }
}

TEST_CASE("sift-fps on a textureless object reports the candidate shortage") {
  ProceduralObject obj = make_sphere("plain", 0.03);
  obj.surface.colors = Points::Constant(obj.surface.size(), 3, 0.5);  // wipe texture
  SiftFpsParams params;
  params.views = 8;
  try {
    sift_fps_select(obj, 8, params);
    FAIL("expected InsufficientSaliencyError");
  } catch (const InsufficientSaliencyError& e) {
    CHECK(e.candidate_count < 8);
    // The count is part of the message so CLI users see it.
    CHECK(std::string(e.what()).find(std::to_string(e.candidate_count)) != std::string::npos);
  }
}

TEST_CASE("keypoint model validation rejects inconsistent payloads") {
  KeypointModel model;
  model.object_id = "x";
  model.keypoints.resize(3, 3);
  model.keypoints << 0, 0, 0, 0.1, 0, 0, 0, 0.1, 0;
  model.center = Vec3::Zero();
  model.diameter = 0.1;
  CHECK_NOTHROW(model.validate());
  model.diameter = -1.0;
  CHECK_THROWS_AS(model.validate(), InvalidArgumentError);
  model.diameter = 0.1;
  model.keypoints.row(2) = model.keypoints.row(0);
  CHECK_THROWS_AS(model.validate(), InvalidArgumentError);
  model.keypoints(2, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(model.validate(), InvalidArgumentError);
}
