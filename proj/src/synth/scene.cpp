#include "pose6d/synth/scene.hpp"

#include <algorithm>
#include <cmath>

#include "pose6d/core/error.hpp"
#include "pose6d/core/rng.hpp"
#include "pose6d/core/subsample.hpp"
#include "pose6d/keypoints/sift_fps.hpp"

namespace pose6d {

namespace {

Mat3 random_rotation(Rng& rng) {
  // Uniform over SO(3) via a normalized 4-normal quaternion.
  double q[4];
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& qi : q) {
      qi = rng.normal();
      norm2 += qi * qi;
    }
  } while (norm2 < 1e-12);
  const double s = 1.0 / std::sqrt(norm2);
  const double w = q[0] * s, x = q[1] * s, y = q[2] * s, z = q[3] * s;
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

/// Orthonormalize to machine precision so RigidTransform's 1e-9 gate holds.
Mat3 snap_rotation(const Mat3& r) {
  const Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 out = svd.matrixU() * svd.matrixV().transpose();
  if (out.determinant() < 0) {
    Mat3 flip = Mat3::Identity();
    flip(2, 2) = -1.0;
    out = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return out;
}

}  // namespace

SceneSpec default_scene_spec() {
  SceneSpec spec;
  spec.intrinsics.width = 320;
  spec.intrinsics.height = 240;
  spec.intrinsics.fx = spec.intrinsics.fy = 280.0;
  spec.intrinsics.cx = 160.0;
  spec.intrinsics.cy = 120.0;
  spec.objects.push_back(make_box("box", Vec3(0.08, 0.06, 0.05)));
  spec.objects.push_back(make_cylinder("cylinder", 0.025, 0.09));
  spec.objects.push_back(make_sphere("sphere", 0.03));
  spec.objects.push_back(make_l_bracket("l-bracket", 0.09, 0.07, 0.04, 0.015));
  return spec;
}

VoteField ground_truth_votes(const RgbdFrame& frame,
                             const SceneAnnotation& annotation,
                             const std::map<int, KeypointModel>& models,
                             const std::vector<int>& flat_indices) {
  const int w = frame.width();
  const int n = static_cast<int>(flat_indices.size());
  int k = 0;
  for (const auto& [cls, model] : models) {
    if (k == 0) k = model.count();
    if (model.count() != k)
      throw ConfigError("ground_truth_votes: inconsistent keypoint counts");
  }
  VoteField votes;
  votes.points.resize(n, 3);
  votes.semantic.resize(n);
  votes.center_offset = Points::Zero(n, 3);
  votes.keypoint_offsets.assign(k, Points::Zero(n, 3));
  for (int i = 0; i < n; ++i) {
    const int v = flat_indices[i] / w, u = flat_indices[i] % w;
    const double d = frame.depth(v, u);
    if (!(d > 0.0))
      throw InvalidArgumentError("ground_truth_votes: index at invalid depth");
    const Vec3 p((u - frame.intrinsics.cx) * d / frame.intrinsics.fx,
                 (v - frame.intrinsics.cy) * d / frame.intrinsics.fy, d);
    votes.points.row(i) = p.transpose();
    const int cls = annotation.semantic(v, u);
    votes.semantic[i] = cls;
    if (cls <= 0) continue;
    const InstanceInfo& info = annotation.info_for(annotation.instance(v, u));
    const KeypointModel& model = models.at(cls);
    votes.center_offset.row(i) = (info.pose.apply(model.center) - p).transpose();
    for (int ki = 0; ki < k; ++ki) {
      votes.keypoint_offsets[ki].row(i) =
          (info.pose.apply(model.keypoints.row(ki).transpose()) - p).transpose();
    }
  }
  return votes;
}

SceneBundle make_scene(const SceneSpec& spec, uint64_t seed) {
  spec.intrinsics.validate();
  if (spec.objects.empty())
    throw InvalidArgumentError("make_scene: no objects in spec");
  if (spec.min_instances < 1 || spec.max_instances < spec.min_instances)
    throw InvalidArgumentError("make_scene: bad instance range");

  // Per-class keypoint models (derive with plain FPS when not supplied).
  std::map<int, KeypointModel> models = spec.models;
  for (int c = 1; c <= static_cast<int>(spec.objects.size()); ++c) {
    if (models.find(c) == models.end()) {
      models[c] = fps_select(spec.objects[c - 1], 8);
    }
  }

  // Backdrop sized to overfill the frustum at its distance.
  const double bw =
      2.3 * spec.backdrop_distance * spec.intrinsics.cx / spec.intrinsics.fx;
  const double bh =
      2.3 * spec.backdrop_distance * spec.intrinsics.cy / spec.intrinsics.fy;
  SurfaceStyle backdrop_style;
  backdrop_style.spacing = 0.65 * spec.backdrop_distance / spec.intrinsics.fx;
  backdrop_style.checker_cell = 0.08;
  backdrop_style.light = 0.55;
  backdrop_style.dark = 0.45;
  std::vector<ProceduralObject> all_objects = spec.objects;
  all_objects.push_back(make_plane("backdrop", bw, bh, backdrop_style));
  const int backdrop_index = static_cast<int>(all_objects.size()) - 1;

  Rng rng(seed);
  const int total_px = spec.intrinsics.width * spec.intrinsics.height;
  const int min_visible_px = std::max(30, total_px / 128);

  for (int attempt = 0; attempt < 20; ++attempt) {
    const int count = spec.min_instances +
                      static_cast<int>(rng.uniform_int(
                          spec.max_instances - spec.min_instances + 1));
    std::vector<RenderInstance> instances;
    RenderInstance backdrop;
    backdrop.object_index = backdrop_index;
    backdrop.class_id = 0;
    backdrop.instance_id = 0;
    backdrop.pose =
        RigidTransform(Mat3::Identity(), Vec3(0, 0, spec.backdrop_distance));
    instances.push_back(backdrop);

    bool placed_all = true;
    std::vector<Vec3> centers;
    std::vector<int> classes;
    for (int i = 0; i < count && placed_all; ++i) {
      const int cls = 1 + static_cast<int>(rng.uniform_int(spec.objects.size()));
      bool placed = false;
      for (int tries = 0; tries < 100; ++tries) {
        const Vec3 pos(rng.uniform(-spec.lateral_x, spec.lateral_x),
                       rng.uniform(-spec.lateral_y, spec.lateral_y),
                       rng.uniform(spec.min_z, spec.max_z));
        bool ok = true;
        for (size_t j = 0; j < centers.size(); ++j) {
          const double sep = (pos - centers[j]).norm();
          const double need = classes[j] == cls ? spec.same_class_separation
                                                : spec.min_separation;
          if (sep < need) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        RenderInstance inst;
        inst.object_index = cls - 1;
        inst.class_id = cls;
        inst.instance_id = static_cast<int>(instances.size());
        inst.pose = RigidTransform(snap_rotation(random_rotation(rng)), pos);
        instances.push_back(inst);
        centers.push_back(pos);
        classes.push_back(cls);
        placed = true;
        break;
      }
      placed_all = placed;
    }
    if (!placed_all) continue;

    RenderResult render = splat_render(all_objects, instances, spec.intrinsics);
    bool all_visible = true;
    for (const InstanceInfo& info : render.annotation.instances) {
      if (info.class_id == 0) continue;
      const int won = (render.annotation.instance.array() == info.instance_id)
                          .cast<int>()
                          .sum();
      if (won < min_visible_px) {
        all_visible = false;
        break;
      }
    }
    if (!all_visible) continue;

    std::vector<int> valid;
    Points coords;
    lift_depth(render.frame).collect_valid(valid, coords);
    std::vector<int> chosen;
    if (static_cast<int>(valid.size()) <= spec.vote_points) {
      chosen = valid;
    } else {
      for (int idx : subsample_indices(static_cast<int>(valid.size()),
                                       spec.vote_points, rng.next_u64())) {
        chosen.push_back(valid[idx]);
      }
    }

    SceneBundle bundle;
    bundle.frame = std::move(render.frame);
    bundle.annotation = std::move(render.annotation);
    bundle.votes = ground_truth_votes(bundle.frame, bundle.annotation, models, chosen);
    for (int c = 1; c <= static_cast<int>(spec.objects.size()); ++c) {
      ClassModel cm;
      cm.object_id = spec.objects[c - 1].object_id;
      cm.symmetric = spec.objects[c - 1].symmetric;
      const PointCloud sub =
          random_subsample(spec.objects[c - 1].surface,
                           std::min(2048, spec.objects[c - 1].surface.size()), 9001);
      cm.points = sub.points;
      cm.keypoints = models[c];
      bundle.classes[c] = std::move(cm);
    }
    return bundle;
  }
  throw InvalidArgumentError(
      "make_scene: could not place all instances visibly inside the frustum");
}

VoteField corrupt_votes(const VoteField& votes, double gaussian_sigma,
                        double outlier_frac, uint64_t seed) {
  if (!(outlier_frac >= 0.0 && outlier_frac <= 1.0))
    throw InvalidArgumentError("corrupt_votes: outlier fraction must be in [0,1]");
  if (gaussian_sigma < 0.0)
    throw InvalidArgumentError("corrupt_votes: negative sigma");
  VoteField out = votes;
  const int n = out.size();
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < 3; ++a) out.center_offset(i, a) += gaussian_sigma * rng.normal();
  }
  for (Points& off : out.keypoint_offsets) {
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < 3; ++a) off(i, a) += gaussian_sigma * rng.normal();
    }
  }
  const int n_out = static_cast<int>(std::lround(outlier_frac * n));
  if (n_out > 0) {
    for (int i : subsample_indices(n, n_out, rng.next_u64())) {
      for (int a = 0; a < 3; ++a) out.center_offset(i, a) = rng.uniform(-1.0, 1.0);
      for (Points& off : out.keypoint_offsets) {
        for (int a = 0; a < 3; ++a) off(i, a) = rng.uniform(-1.0, 1.0);
      }
    }
  }
  return out;
}

}  // namespace pose6d
