#include "pose6d/io/scene_io.hpp"

#include <filesystem>

#include "pose6d/io/image_io.hpp"
#include "pose6d/io/json_io.hpp"
#include "pose6d/io/ply.hpp"

namespace fs = std::filesystem;

namespace pose6d {

void save_scene_bundle(const SceneBundle& bundle, const std::string& dir) {
  fs::create_directories(fs::path(dir) / "models");
  const auto path = [&](const char* name) { return (fs::path(dir) / name).string(); };

  write_file(path("frame.ppm"),
             write_ppm(bundle.frame.red, bundle.frame.green, bundle.frame.blue));
  write_file(path("depth.raw"), write_depth_raw(bundle.frame.depth));

  Json ann = annotation_to_json(bundle.annotation, bundle.frame.intrinsics);
  Json ann_doc;
  ann_doc["format_version"] = kFormatVersion;
  ann_doc["annotation"] = std::move(ann);
  write_file(path("annotation.json"), dump_json(ann_doc));

  write_file(path("semantic.pgm"), write_pgm(bundle.annotation.semantic));
  IndexMatrix shifted = bundle.annotation.instance;
  shifted.array() += 1;  // -1 (no geometry) becomes 0
  write_file(path("instance.pgm"), write_pgm(shifted));

  Json classes = Json::array();
  for (const auto& [class_id, cm] : bundle.classes) {
    Json e;
    e["class_id"] = class_id;
    e["object_id"] = cm.object_id;
    e["symmetric"] = cm.symmetric;
    e["keypoint_model"] = keypoint_model_to_json(cm.keypoints);
    const std::string ply_name = "class" + std::to_string(class_id) + ".ply";
    e["points_file"] = "models/" + ply_name;
    PointCloud cloud;
    cloud.points = cm.points;
    save_ply(cloud, (fs::path(dir) / "models" / ply_name).string());
    classes.push_back(std::move(e));
  }
  Json cls_doc;
  cls_doc["format_version"] = kFormatVersion;
  cls_doc["classes"] = std::move(classes);
  write_file(path("classes.json"), dump_json(cls_doc));
}

SceneBundle load_scene_bundle(const std::string& dir) {
  const auto path = [&](const char* name) { return (fs::path(dir) / name).string(); };
  SceneBundle bundle;

  read_ppm(read_file(path("frame.ppm")), bundle.frame.red, bundle.frame.green,
           bundle.frame.blue);
  bundle.frame.depth = read_depth_raw(read_file(path("depth.raw")));

  const Json ann_doc = parse_json(read_file(path("annotation.json")));
  if (ann_doc.value("format_version", 0) != kFormatVersion)
    throw ParseError("annotation.json: unsupported format_version");
  if (!ann_doc.contains("annotation"))
    throw ParseError("annotation.json: missing 'annotation'");
  annotation_from_json(ann_doc["annotation"], bundle.annotation,
                       bundle.frame.intrinsics);

  bundle.annotation.semantic = read_pgm(read_file(path("semantic.pgm")));
  bundle.annotation.instance = read_pgm(read_file(path("instance.pgm")));
  bundle.annotation.instance.array() -= 1;

  const int h = bundle.frame.height(), w = bundle.frame.width();
  if (bundle.annotation.semantic.rows() != h || bundle.annotation.semantic.cols() != w ||
      bundle.annotation.instance.rows() != h || bundle.annotation.instance.cols() != w)
    throw ParseError("annotation maps do not match the frame size");
  bundle.frame.validate();

  const Json cls_doc = parse_json(read_file(path("classes.json")));
  if (cls_doc.value("format_version", 0) != kFormatVersion)
    throw ParseError("classes.json: unsupported format_version");
  if (!cls_doc.contains("classes")) throw ParseError("classes.json: missing 'classes'");
  for (const Json& e : cls_doc["classes"]) {
    if (!e.contains("class_id") || !e.contains("object_id") || !e.contains("symmetric") ||
        !e.contains("keypoint_model") || !e.contains("points_file"))
      throw ParseError("classes.json: incomplete class record");
    ClassModel cm;
    const int class_id = e["class_id"].get<int>();
    cm.object_id = e["object_id"].get<std::string>();
    cm.symmetric = e["symmetric"].get<bool>();
    cm.keypoints = keypoint_model_from_json(e["keypoint_model"]);
    const std::string rel = e["points_file"].get<std::string>();
    cm.points = load_ply((fs::path(dir) / rel).string()).points;
    bundle.classes.emplace(class_id, std::move(cm));
  }
  return bundle;
}

}  // namespace pose6d
