#include "pose6d/keypoints/sift_fps.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <vector>

#include "pose6d/core/camera.hpp"
#include "pose6d/core/error.hpp"
#include "pose6d/core/parallel.hpp"
#include "pose6d/core/rng.hpp"
#include "pose6d/keypoints/fps.hpp"
#include "pose6d/keypoints/viewpoints.hpp"
#include "pose6d/synth/render.hpp"

namespace pose6d {

namespace {

KeypointModel model_from_candidates(const ProceduralObject& object,
                                    const Points& candidates, int n_keypoints,
                                    std::optional<uint64_t> seed) {
  int seed_index;
  if (seed.has_value()) {
    Rng rng(*seed);
    seed_index = static_cast<int>(rng.uniform_int(candidates.rows()));
  } else {
    seed_index = farthest_from_centroid(candidates);
  }
  const std::vector<int> picks = fps(candidates, n_keypoints, seed_index);
  KeypointModel model;
  model.object_id = object.object_id;
  model.keypoints.resize(n_keypoints, 3);
  for (int i = 0; i < n_keypoints; ++i) {
    model.keypoints.row(i) = candidates.row(picks[i]);
  }
  model.center = object.center;
  model.diameter = object.diameter;
  model.validate();
  return model;
}

/// Nearest valid-depth pixel within a 5x5 window of (u, v), or (-1, -1).
std::pair<int, int> nearest_valid_pixel(const ImagePlane& depth, double u, double v) {
  const int h = static_cast<int>(depth.rows());
  const int w = static_cast<int>(depth.cols());
  const int cu = static_cast<int>(std::lround(u));
  const int cv = static_cast<int>(std::lround(v));
  int best_u = -1, best_v = -1;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int dv = -2; dv <= 2; ++dv) {
    for (int du = -2; du <= 2; ++du) {
      const int uu = cu + du, vv = cv + dv;
      if (uu < 0 || uu >= w || vv < 0 || vv >= h) continue;
      if (!(depth(vv, uu) > 0.0)) continue;
      const double d2 = (uu - u) * (uu - u) + (vv - v) * (vv - v);
      if (d2 < best_d2) {
        best_d2 = d2;
        best_u = uu;
        best_v = vv;
      }
    }
  }
  return {best_u, best_v};
}

}  // namespace

KeypointModel sift_fps_select(const ProceduralObject& object, int n_keypoints,
                              const SiftFpsParams& params) {
  if (n_keypoints < 1) {
    throw InvalidArgumentError("sift_fps_select: n_keypoints must be positive");
  }
  if (params.views < 1) {
    throw InvalidArgumentError("sift_fps_select: need at least one view");
  }
  CameraIntrinsics intr;
  intr.width = params.render_width;
  intr.height = params.render_height;
  intr.fx = intr.fy = params.focal;
  intr.cx = params.render_width / 2.0;
  intr.cy = params.render_height / 2.0;
  intr.validate();

  const double radius = params.camera_radius_scale * object.diameter;
  const Points centers = sphere_viewpoints(params.views, radius);
  const std::vector<RigidTransform> cams = look_at_origin(centers);
  const std::vector<ProceduralObject> objects = {object};

  // Per-view: render, detect, lift, undo the camera pose. Views are
  // independent; candidates are concatenated in view order afterwards so the
  // result does not depend on scheduling.
  std::vector<std::vector<Vec3>> per_view(params.views);
  std::mutex first_error_mutex;
  std::exception_ptr first_error;
  parallel_for(params.views, [&](int vi) {
    try {
      std::vector<RenderInstance> inst(1);
      inst[0].object_index = 0;
      inst[0].class_id = 1;
      inst[0].instance_id = 1;
      inst[0].pose = cams[vi];
      RenderOptions opts;
      opts.background = 0.5;  // match the untextured tone: silhouettes stay quiet
      const RenderResult render = splat_render(objects, inst, intr, opts);
      const std::vector<Keypoint2D> found =
          detect_dog_keypoints(render.frame.grayscale(), params.detector);
      const RigidTransform object_from_camera = cams[vi].inverse();
      for (const Keypoint2D& kp : found) {
        const auto [pu, pv] = nearest_valid_pixel(render.frame.depth, kp.u, kp.v);
        if (pu < 0) continue;  // detection off the object silhouette
        const double d = render.frame.depth(pv, pu);
        const Vec3 cam_pt((pu - intr.cx) * d / intr.fx, (pv - intr.cy) * d / intr.fy, d);
        per_view[vi].push_back(object_from_camera.apply(cam_pt));
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(first_error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  });
  if (first_error) std::rethrow_exception(first_error);

  // Merge: keep the first candidate of every dedupe_radius-sized cluster so
  // candidates remain exact lifted surface points.
  std::vector<Vec3> merged;
  const double r2 = params.dedupe_radius * params.dedupe_radius;
  for (const auto& view_candidates : per_view) {
    for (const Vec3& c : view_candidates) {
      bool duplicate = false;
      for (const Vec3& kept : merged) {
        if ((c - kept).squaredNorm() < r2) {
          duplicate = true;
          break;
        }
      }
      if (!duplicate) merged.push_back(c);
    }
  }
  if (static_cast<int>(merged.size()) < n_keypoints) {
    throw InsufficientSaliencyError(
        "sift_fps_select: only " + std::to_string(merged.size()) +
            " salient candidates for " + std::to_string(n_keypoints) + " keypoints",
        static_cast<int>(merged.size()));
  }

  Points candidates(static_cast<int>(merged.size()), 3);
  for (int i = 0; i < candidates.rows(); ++i) {
    candidates.row(i) = merged[i].transpose();
  }
  return model_from_candidates(object, candidates, n_keypoints, params.seed);
}

KeypointModel fps_select(const ProceduralObject& object, int n_keypoints,
                         std::optional<uint64_t> seed) {
  if (n_keypoints < 1) {
    throw InvalidArgumentError("fps_select: n_keypoints must be positive");
  }
  if (n_keypoints > object.surface.size()) {
    throw InvalidArgumentError("fps_select: more keypoints than surface samples");
  }
  return model_from_candidates(object, object.surface.points, n_keypoints, seed);
}

}  // namespace pose6d
