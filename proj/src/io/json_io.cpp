#include "pose6d/io/json_io.hpp"

namespace pose6d {

namespace {

/// Runs f, converting nlohmann's exceptions (bad parse, missing key, wrong
/// type) into ParseError. Library errors pass through untouched.
template <typename F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
}

void check_version(const Json& j) {
  if (j.at("format_version").get<int>() != kFormatVersion)
    throw ParseError("unsupported format_version");
}

Json points_to_json(const Points& pts) {
  Json rows = Json::array();
  for (int i = 0; i < pts.rows(); ++i)
    rows.push_back({pts(i, 0), pts(i, 1), pts(i, 2)});
  return rows;
}

Points points_from_json(const Json& j) {
  Points pts(static_cast<int>(j.size()), 3);
  int i = 0;
  for (const Json& row : j) {
    if (!row.is_array() || row.size() != 3)
      throw ParseError("point rows must hold exactly 3 numbers");
    pts.row(i) << row[0].get<double>(), row[1].get<double>(), row[2].get<double>();
    ++i;
  }
  return pts;
}

Json vec3_to_json(const Vec3& v) { return {v[0], v[1], v[2]}; }

Vec3 vec3_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw ParseError("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

Json parse_json(const std::string& text) {
  return guarded([&] { return Json::parse(text); });
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json pose_to_json(const RigidTransform& pose) {
  Json j;
  Json rot = Json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rot.push_back(pose.rotation()(r, c));
  j["rotation"] = std::move(rot);
  j["translation"] = vec3_to_json(pose.translation());
  return j;
}

RigidTransform pose_from_json(const Json& j) {
  return guarded([&] {
    const Json& rot = j.at("rotation");
    if (!rot.is_array() || rot.size() != 9)
      throw ParseError("rotation must hold 9 row-major entries");
    Mat3 r;
    for (int k = 0; k < 9; ++k) r(k / 3, k % 3) = rot[k].get<double>();
    return RigidTransform(r, vec3_from_json(j.at("translation")));
  });
}

std::string write_pose_json(const RigidTransform& pose) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["pose"] = pose_to_json(pose);
  return dump_json(j);
}

RigidTransform read_pose_json(const std::string& text) {
  const Json j = parse_json(text);
  return guarded([&] {
    check_version(j);
    return pose_from_json(j.at("pose"));
  });
}

std::string write_poses_json(const std::vector<PoseRecord>& poses) {
  Json j;
  j["format_version"] = kFormatVersion;
  Json list = Json::array();
  for (const PoseRecord& rec : poses) {
    Json e;
    e["scene"] = rec.scene;
    e["class_id"] = rec.class_id;
    e["object_id"] = rec.object_id;
    e["pose"] = pose_to_json(rec.pose);
    list.push_back(std::move(e));
  }
  j["poses"] = std::move(list);
  return dump_json(j);
}

std::vector<PoseRecord> read_poses_json(const std::string& text) {
  const Json j = parse_json(text);
  return guarded([&] {
    check_version(j);
    std::vector<PoseRecord> out;
    for (const Json& e : j.at("poses")) {
      PoseRecord rec;
      rec.scene = e.value("scene", 0);
      rec.class_id = e.at("class_id").get<int>();
      rec.object_id = e.at("object_id").get<std::string>();
      rec.pose = pose_from_json(e.at("pose"));
      out.push_back(std::move(rec));
    }
    return out;
  });
}

Json keypoint_model_to_json(const KeypointModel& model) {
  Json j;
  j["object_id"] = model.object_id;
  j["keypoints"] = points_to_json(model.keypoints);
  j["center"] = vec3_to_json(model.center);
  j["diameter"] = model.diameter;
  return j;
}

KeypointModel keypoint_model_from_json(const Json& j) {
  return guarded([&] {
    KeypointModel m;
    m.object_id = j.at("object_id").get<std::string>();
    m.keypoints = points_from_json(j.at("keypoints"));
    m.center = vec3_from_json(j.at("center"));
    m.diameter = j.at("diameter").get<double>();
    m.validate();
    return m;
  });
}

std::string write_keypoint_model_json(const KeypointModel& model) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["keypoint_model"] = keypoint_model_to_json(model);
  return dump_json(j);
}

KeypointModel read_keypoint_model_json(const std::string& text) {
  const Json j = parse_json(text);
  return guarded([&] {
    check_version(j);
    return keypoint_model_from_json(j.at("keypoint_model"));
  });
}

std::string write_detections_json(const std::vector<Detection>& detections) {
  Json j;
  j["format_version"] = kFormatVersion;
  Json list = Json::array();
  for (const Detection& det : detections) {
    Json e;
    e["class_id"] = det.class_id;
    e["member_indices"] = det.member_indices;
    e["voted_center"] = vec3_to_json(det.voted_center);
    e["voted_keypoints"] = points_to_json(det.voted_keypoints);
    Json support = Json::array();
    for (int k = 0; k < det.keypoint_support.size(); ++k)
      support.push_back(det.keypoint_support[k]);
    e["keypoint_support"] = std::move(support);
    e["pose"] = det.pose ? pose_to_json(*det.pose) : Json(nullptr);
    list.push_back(std::move(e));
  }
  j["detections"] = std::move(list);
  return dump_json(j);
}

std::vector<Detection> read_detections_json(const std::string& text) {
  const Json j = parse_json(text);
  return guarded([&] {
    check_version(j);
    std::vector<Detection> out;
    for (const Json& e : j.at("detections")) {
      Detection det;
      det.class_id = e.at("class_id").get<int>();
      det.member_indices = e.at("member_indices").get<std::vector<int>>();
      det.voted_center = vec3_from_json(e.at("voted_center"));
      det.voted_keypoints = points_from_json(e.at("voted_keypoints"));
      const Json& support = e.at("keypoint_support");
      det.keypoint_support.resize(static_cast<int>(support.size()));
      for (int k = 0; k < det.keypoint_support.size(); ++k)
        det.keypoint_support[k] = support[k].get<double>();
      if (!e.at("pose").is_null()) det.pose = pose_from_json(e.at("pose"));
      out.push_back(std::move(det));
    }
    return out;
  });
}

Json fusion_config_to_json(const FusionConfig& cfg) {
  Json j;
  j["enable_encode_fusion"] = cfg.enable_encode_fusion;
  j["enable_decode_fusion"] = cfg.enable_decode_fusion;
  j["enable_final_dense_fusion"] = cfg.enable_final_dense_fusion;
  j["enable_p2r"] = cfg.enable_p2r;
  j["enable_r2p"] = cfg.enable_r2p;
  j["k_r2p"] = cfg.k_r2p;
  j["k_p2r"] = cfg.k_p2r;
  j["downsample_mode"] =
      cfg.downsample_mode == DownsampleMode::kNearest ? "nearest" : "mean_kernel";
  j["n_points"] = cfg.n_points;
  j["n_cls"] = cfg.n_cls;
  j["n_keypoints"] = cfg.n_keypoints;
  j["lfa_k"] = cfg.lfa_k;
  return j;
}

FusionConfig fusion_config_from_json(const Json& j) {
  return guarded([&] {
    FusionConfig cfg;
    cfg.enable_encode_fusion = j.value("enable_encode_fusion", cfg.enable_encode_fusion);
    cfg.enable_decode_fusion = j.value("enable_decode_fusion", cfg.enable_decode_fusion);
    cfg.enable_final_dense_fusion =
        j.value("enable_final_dense_fusion", cfg.enable_final_dense_fusion);
    cfg.enable_p2r = j.value("enable_p2r", cfg.enable_p2r);
    cfg.enable_r2p = j.value("enable_r2p", cfg.enable_r2p);
    cfg.k_r2p = j.value("k_r2p", cfg.k_r2p);
    cfg.k_p2r = j.value("k_p2r", cfg.k_p2r);
    const std::string mode = j.value("downsample_mode", std::string("nearest"));
    if (mode == "nearest") {
      cfg.downsample_mode = DownsampleMode::kNearest;
    } else if (mode == "mean_kernel") {
      cfg.downsample_mode = DownsampleMode::kMeanKernel;
    } else {
      throw ParseError("downsample_mode must be 'nearest' or 'mean_kernel'");
    }
    cfg.n_points = j.value("n_points", cfg.n_points);
    cfg.n_cls = j.value("n_cls", cfg.n_cls);
    cfg.n_keypoints = j.value("n_keypoints", cfg.n_keypoints);
    cfg.lfa_k = j.value("lfa_k", cfg.lfa_k);
    cfg.validate();
    return cfg;
  });
}

std::string write_fusion_config_json(const FusionConfig& cfg) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["fusion_config"] = fusion_config_to_json(cfg);
  return dump_json(j);
}

FusionConfig read_fusion_config_json(const std::string& text) {
  const Json j = parse_json(text);
  return guarded([&] {
    check_version(j);
    return fusion_config_from_json(j.at("fusion_config"));
  });
}

std::string write_params_json(const ParamStore& params) {
  Json j;
  j["format_version"] = kFormatVersion;
  Json entries;
  for (const auto& [name, tensor] : params) {
    Json e;
    e["shape"] = tensor.shape;
    Json data = Json::array();
    for (int i = 0; i < tensor.numel(); ++i) data.push_back(tensor.data[i]);
    e["data"] = std::move(data);
    entries[name] = std::move(e);
  }
  j["params"] = std::move(entries);
  return dump_json(j);
}

ParamStore read_params_json(const std::string& text) {
  const Json j = parse_json(text);
  return guarded([&] {
    check_version(j);
    ParamStore store;
    for (const auto& [name, e] : j.at("params").items()) {
      const std::vector<int> shape = e.at("shape").get<std::vector<int>>();
      const Json& data = e.at("data");
      Tensor t = Tensor::zeros(shape);
      if (static_cast<int>(data.size()) != t.numel())
        throw ParseError("parameter '" + name + "' data length does not match shape");
      for (int i = 0; i < t.numel(); ++i) t.data[i] = data[i].get<double>();
      store.set(name, std::move(t));
    }
    return store;
  });
}

Json annotation_to_json(const SceneAnnotation& annotation,
                        const CameraIntrinsics& intrinsics) {
  Json j;
  Json intr;
  intr["fx"] = intrinsics.fx;
  intr["fy"] = intrinsics.fy;
  intr["cx"] = intrinsics.cx;
  intr["cy"] = intrinsics.cy;
  intr["width"] = intrinsics.width;
  intr["height"] = intrinsics.height;
  j["intrinsics"] = std::move(intr);
  Json list = Json::array();
  for (const InstanceInfo& info : annotation.instances) {
    Json e;
    e["instance_id"] = info.instance_id;
    e["class_id"] = info.class_id;
    e["object_index"] = info.object_index;
    e["object_id"] = info.object_id;
    e["visibility"] = info.visibility;
    e["pose"] = pose_to_json(info.pose);
    list.push_back(std::move(e));
  }
  j["instances"] = std::move(list);
  return j;
}

void annotation_from_json(const Json& j, SceneAnnotation& annotation,
                          CameraIntrinsics& intrinsics) {
  guarded([&] {
    const Json& intr = j.at("intrinsics");
    intrinsics.fx = intr.at("fx").get<double>();
    intrinsics.fy = intr.at("fy").get<double>();
    intrinsics.cx = intr.at("cx").get<double>();
    intrinsics.cy = intr.at("cy").get<double>();
    intrinsics.width = intr.at("width").get<int>();
    intrinsics.height = intr.at("height").get<int>();
    intrinsics.validate();
    annotation.instances.clear();
    for (const Json& e : j.at("instances")) {
      InstanceInfo info;
      info.instance_id = e.at("instance_id").get<int>();
      info.class_id = e.at("class_id").get<int>();
      info.object_index = e.at("object_index").get<int>();
      info.object_id = e.at("object_id").get<std::string>();
      info.visibility = e.at("visibility").get<double>();
      info.pose = pose_from_json(e.at("pose"));
      annotation.instances.push_back(std::move(info));
    }
    return 0;
  });
}

}  // namespace pose6d
