#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "pose6d/core/rng.hpp"
#include "pose6d/io/image_io.hpp"
#include "pose6d/io/json_io.hpp"
#include "pose6d/io/ply.hpp"
#include "pose6d/io/report.hpp"
#include "pose6d/io/scene_io.hpp"
#include "pose6d/synth/scene.hpp"

using namespace pose6d;

namespace {

PointCloud random_cloud(Rng& rng, int n, bool colors, bool normals) {
  PointCloud cloud;
  cloud.points.resize(n, 3);
  for (int i = 0; i < n; ++i)
    cloud.points.row(i) << rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2);
  if (colors) {
    cloud.colors.resize(n, 3);
    for (int i = 0; i < n; ++i)
      cloud.colors.row(i) << rng.uniform(), rng.uniform(), rng.uniform();
  }
  if (normals) {
    cloud.normals.resize(n, 3);
    for (int i = 0; i < n; ++i) {
      Vec3 v(rng.normal(), rng.normal(), rng.normal());
      cloud.normals.row(i) = v.normalized().transpose();
    }
  }
  return cloud;
}

int parse_error_line(const std::string& text) {
  try {
    read_ply(text);
  } catch (const ParseError& e) {
    return e.line;
  }
  return -1;
}

RigidTransform random_pose(Rng& rng) {
  const Eigen::Quaterniond q =
      Eigen::Quaterniond(rng.normal(), rng.normal(), rng.normal(), rng.normal()).normalized();
  return RigidTransform(q.toRotationMatrix(),
                        Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)));
}

}  // namespace

TEST_CASE("ply round trips preserve 9 significant digits") {
  Rng rng(6);
  for (int combo = 0; combo < 4; ++combo) {
    const PointCloud cloud = random_cloud(rng, 50, combo & 1, combo & 2);
    const PointCloud back = read_ply(write_ply(cloud));
    REQUIRE(back.size() == 50);
    CHECK(back.has_colors() == cloud.has_colors());
    CHECK(back.has_normals() == cloud.has_normals());
    for (int i = 0; i < 50; ++i) {
      CHECK((back.points.row(i) - cloud.points.row(i)).norm() <
            1e-8 * std::max(1.0, cloud.points.row(i).norm()));
      if (cloud.has_colors())
        CHECK((back.colors.row(i) - cloud.colors.row(i)).cwiseAbs().maxCoeff() < 1e-2);
      if (cloud.has_normals())
        CHECK((back.normals.row(i) - cloud.normals.row(i)).cwiseAbs().maxCoeff() < 1e-7);
    }
    // A second trip is exact: formatting already reached a fixed point.
    const std::string once = write_ply(back);
    CHECK(write_ply(read_ply(once)) == once);
  }
}

TEST_CASE("ply parser reports precise failure lines") {
  CHECK(parse_error_line("not a ply\n") == 1);
  CHECK(parse_error_line("ply\nformat binary_little_endian 1.0\n") == 2);
  const std::string bad_count =
      "ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\n"
      "property float z\nend_header\n0 0 0\n1 1 1\n";
  CHECK(parse_error_line(bad_count) > 0);  // vertex count mismatch
  const std::string bad_token =
      "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\n"
      "property float z\nend_header\n0 zero 0\n";
  CHECK(parse_error_line(bad_token) == 8);
  const std::string extra_field =
      "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\n"
      "property float z\nend_header\n0 0 0 0\n";
  CHECK(parse_error_line(extra_field) == 8);
  const std::string no_x =
      "ply\nformat ascii 1.0\nelement vertex 1\nproperty float y\nproperty float z\n"
      "end_header\n0 0\n";
  CHECK(parse_error_line(no_x) > 0);
  const std::string list_prop =
      "ply\nformat ascii 1.0\nelement vertex 1\nproperty list uchar int vertex_indices\n"
      "end_header\n";
  CHECK(parse_error_line(list_prop) == 4);
  const std::string nonfinite =
      "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\n"
      "property float z\nend_header\nnan 0 0\n";
  CHECK(parse_error_line(nonfinite) == 8);
}

TEST_CASE("ppm and pgm round trips are byte-exact") {
  Rng rng(8);
  ImagePlane r(5, 7), g(5, 7), b(5, 7);
  for (int v = 0; v < 5; ++v)
    for (int u = 0; u < 7; ++u) {
      r(v, u) = rng.uniform();
      g(v, u) = rng.uniform();
      b(v, u) = rng.uniform();
    }
  r(0, 0) = 0.0;
  g(0, 0) = 1.0;
  const std::string ppm = write_ppm(r, g, b);
  ImagePlane r2, g2, b2;
  read_ppm(ppm, r2, g2, b2);
  CHECK(write_ppm(r2, g2, b2) == ppm);

  IndexMatrix labels(3, 4);
  labels << 0, 1, 2, 3, 255, 254, 6, 7, 8, 9, 10, 11;
  const std::string pgm = write_pgm(labels);
  const IndexMatrix back = read_pgm(pgm);
  CHECK((back - labels).cwiseAbs().maxCoeff() == 0);
  IndexMatrix oob(1, 1);
  oob << 256;
  CHECK_THROWS_AS(write_pgm(oob), InvalidArgumentError);
}

TEST_CASE("pnm parsing honors comments and rejects truncation") {
  const std::string with_comment = "P5\n# a comment\n2 2\n255\n\x01\x02\x03\x04";
  const IndexMatrix m = read_pgm(with_comment);
  CHECK(m(0, 0) == 1);
  CHECK(m(1, 1) == 4);
  CHECK_THROWS_AS(read_pgm("P5\n2 2\n255\n\x01\x02"), ParseError);
  CHECK_THROWS_AS(read_pgm("P5\n2 2\n254\n\x01\x02\x03\x04"), ParseError);
  CHECK_THROWS_AS(read_pgm("P4\n2 2\n255\n\x01\x02\x03\x04"), ParseError);
}

TEST_CASE("depth raw round trips reproduce float32 exactly") {
  Rng rng(12);
  ImagePlane depth(6, 9);
  for (int v = 0; v < 6; ++v)
    for (int u = 0; u < 9; ++u) depth(v, u) = rng.uniform(0.0, 3.0);
  depth(2, 2) = 0.0;
  const std::string blob = write_depth_raw(depth);
  const ImagePlane back = read_depth_raw(blob);
  REQUIRE(back.rows() == 6);
  // Quantized to float32 on write; reading recovers those exact values.
  for (int v = 0; v < 6; ++v)
    for (int u = 0; u < 9; ++u)
      CHECK(back(v, u) == static_cast<double>(static_cast<float>(depth(v, u))));
  CHECK(write_depth_raw(back) == blob);

  CHECK_THROWS_AS(read_depth_raw("XXXXX"), ParseError);
  CHECK_THROWS_AS(read_depth_raw(blob.substr(0, blob.size() - 1)), ParseError);
  std::string negative = blob;
  negative[16] |= char(0x80);  // flip the first sample's sign bit
  CHECK_THROWS_AS(read_depth_raw(negative), ParseError);
}

TEST_CASE("pose json validates rotations on load") {
  Rng rng(14);
  const RigidTransform pose = random_pose(rng);
  const RigidTransform back = read_pose_json(write_pose_json(pose));
  CHECK((back.rotation() - pose.rotation()).norm() < 1e-15);
  CHECK((back.translation() - pose.translation()).norm() < 1e-15);

  Json j = parse_json(write_pose_json(pose));
  auto rot = j["pose"]["rotation"];
  for (int i = 0; i < 3; ++i) rot[i] = -rot[i].get<double>();  // det flips to -1
  j["pose"]["rotation"] = rot;
  CHECK_THROWS_AS(read_pose_json(dump_json(j)), InvalidArgumentError);
  j["pose"]["rotation"] = std::vector<double>{1, 0, 0, 0, 1, 0};
  CHECK_THROWS_AS(read_pose_json(dump_json(j)), ParseError);
  CHECK_THROWS_AS(read_pose_json("{}"), ParseError);
  CHECK_THROWS_AS(read_pose_json("{\"format_version\": 2, \"pose\": {}}"), ParseError);
}

TEST_CASE("pose record lists and keypoint models survive the trip") {
  Rng rng(15);
  std::vector<PoseRecord> records(3);
  for (int i = 0; i < 3; ++i) {
    records[i].scene = i;
    records[i].class_id = i + 1;
    records[i].object_id = "obj" + std::to_string(i);
    records[i].pose = random_pose(rng);
  }
  const auto back = read_poses_json(write_poses_json(records));
  REQUIRE(back.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(back[i].scene == i);
    CHECK(back[i].class_id == i + 1);
    CHECK(back[i].object_id == records[i].object_id);
    CHECK((back[i].pose.translation() - records[i].pose.translation()).norm() < 1e-15);
  }

  KeypointModel model;
  model.object_id = "widget";
  model.keypoints.resize(4, 3);
  model.keypoints << 0.01, 0, 0, 0, 0.01, 0, 0, 0, 0.01, 0.01, 0.01, 0.01;
  model.center = Vec3(0.001, -0.002, 0.003);
  model.diameter = 0.025;
  const KeypointModel km = read_keypoint_model_json(write_keypoint_model_json(model));
  CHECK(km.object_id == "widget");
  CHECK((km.keypoints - model.keypoints).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(km.diameter == model.diameter);
}

TEST_CASE("fusion config json carries every switch") {
  FusionConfig cfg;
  cfg.enable_p2r = false;
  cfg.enable_r2p = true;
  cfg.enable_decode_fusion = false;
  cfg.k_r2p = 12;
  cfg.downsample_mode = DownsampleMode::kMeanKernel;
  cfg.n_points = 300;
  const FusionConfig back = read_fusion_config_json(write_fusion_config_json(cfg));
  CHECK(back.enable_p2r == false);
  CHECK(back.enable_r2p == true);
  CHECK(back.enable_decode_fusion == false);
  CHECK(back.enable_encode_fusion == true);
  CHECK(back.k_r2p == 12);
  CHECK(back.downsample_mode == DownsampleMode::kMeanKernel);
  CHECK(back.n_points == 300);

  Json j = parse_json(write_fusion_config_json(cfg));
  j["fusion_config"]["downsample_mode"] = "bilinear";
  CHECK_THROWS_AS(read_fusion_config_json(dump_json(j)), ParseError);
  j["fusion_config"]["downsample_mode"] = "nearest";
  j["fusion_config"]["n_points"] = 100000;
  CHECK_THROWS_AS(read_fusion_config_json(dump_json(j)), InvalidArgumentError);
}

TEST_CASE("json writers are deterministic") {
  Rng rng(16);
  const RigidTransform pose = random_pose(rng);
  CHECK(write_pose_json(pose) == write_pose_json(pose));
  FusionConfig cfg;
  CHECK(write_fusion_config_json(cfg) == write_fusion_config_json(cfg));
}

TEST_CASE("report csv round trips rows and summary") {
  std::vector<ReportRow> rows(2);
  rows[0] = {0, 1, 1, "box", false, 0.001, 0.0005, 0.001, 0.11};
  rows[1] = {1, 2, 2, "cyl", true, 0.002, 0.0008, 0.0008, 0.10};
  const std::vector<std::pair<std::string, double>> summary = {{"auc", 0.987654}, {"add", 0.0015}};
  const std::string csv = write_report_csv(rows, summary);

  std::vector<ReportRow> rows2;
  std::vector<std::pair<std::string, double>> summary2;
  read_report_csv(csv, rows2, summary2);
  REQUIRE(rows2.size() == 2);
  CHECK(rows2[0].object_id == "box");
  CHECK(rows2[1].symmetric == true);
  CHECK(rows2[0].add == 0.001);
  CHECK(rows2[1].dispatch == 0.0008);
  REQUIRE(summary2.size() == 2);
  CHECK(summary2[0].first == "auc");
  CHECK(summary2[0].second == doctest::Approx(0.987654));

  CHECK_THROWS_AS(read_report_csv("bogus\n", rows2, summary2), ParseError);
  ReportRow evil = rows[0];
  evil.object_id = "a,b";
  CHECK_THROWS_AS(write_report_csv({evil}, {}), InvalidArgumentError);
}

TEST_CASE("svg accuracy curves are valid and deterministic") {
  const std::vector<double> d = {0.01, 0.02, 0.08};
  const std::string svg = accuracy_curve_svg(d, 0.1, "test curve");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("test curve") != std::string::npos);
  CHECK(accuracy_curve_svg(d, 0.1, "test curve") == svg);
}

TEST_CASE("scene bundles survive a save/load cycle") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "pose6d_bundle_test";
  fs::remove_all(dir);

  const SceneBundle bundle = make_scene(default_scene_spec(), 55);
  save_scene_bundle(bundle, dir.string());
  const SceneBundle back = load_scene_bundle(dir.string());

  CHECK(back.frame.width() == bundle.frame.width());
  // Depth is stored as float32: equality after one quantization step.
  for (int v = 0; v < bundle.frame.height(); ++v)
    for (int u = 0; u < bundle.frame.width(); ++u)
      CHECK(back.frame.depth(v, u) ==
            static_cast<double>(static_cast<float>(bundle.frame.depth(v, u))));
  CHECK((back.annotation.semantic - bundle.annotation.semantic).cwiseAbs().maxCoeff() == 0);
  CHECK((back.annotation.instance - bundle.annotation.instance).cwiseAbs().maxCoeff() == 0);
  REQUIRE(back.annotation.instances.size() == bundle.annotation.instances.size());
  for (size_t i = 0; i < back.annotation.instances.size(); ++i) {
    const auto& a = back.annotation.instances[i];
    const auto& b = bundle.annotation.instances[i];
    CHECK(a.instance_id == b.instance_id);
    CHECK(a.object_id == b.object_id);
    CHECK((a.pose.rotation() - b.pose.rotation()).norm() < 1e-12);
    CHECK((a.pose.translation() - b.pose.translation()).norm() < 1e-12);
  }
  REQUIRE(back.classes.size() == bundle.classes.size());
  for (const auto& [cid, cm] : bundle.classes) {
    const ClassModel& cm2 = back.classes.at(cid);
    CHECK(cm2.object_id == cm.object_id);
    CHECK(cm2.symmetric == cm.symmetric);
    CHECK(cm2.points.rows() == cm.points.rows());
    CHECK((cm2.keypoints.keypoints - cm.keypoints.keypoints).cwiseAbs().maxCoeff() < 1e-7);
  }
  // A reloaded bundle re-saves to byte-identical artifacts.
  const fs::path dir2 = fs::temp_directory_path() / "pose6d_bundle_test2";
  fs::remove_all(dir2);
  save_scene_bundle(back, dir2.string());
  for (const char* name : {"frame.ppm", "depth.raw", "annotation.json", "semantic.pgm",
                           "instance.pgm", "classes.json"}) {
    CHECK(read_file((dir / name).string()) == read_file((dir2 / name).string()));
  }
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("fuzzed corruption never crashes the parsers") {
  Rng rng(2024);
  const SceneBundle bundle = make_scene(default_scene_spec(), 60);
  std::vector<std::string> documents = {
      write_ply(random_cloud(rng, 20, true, true)),
      write_ppm(bundle.frame.red, bundle.frame.green, bundle.frame.blue),
      write_pgm(bundle.annotation.semantic),
      write_depth_raw(bundle.frame.depth),
      write_pose_json(random_pose(rng)),
      write_fusion_config_json(FusionConfig{}),
  };
  int rejected = 0, accepted = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::string doc = documents[trial % documents.size()];
    const int edits = 1 + static_cast<int>(rng.uniform_int(8));
    for (int e = 0; e < edits; ++e) {
      const auto pos = rng.uniform_int(doc.size());
      switch (rng.uniform_int(3)) {
        case 0: doc[pos] = static_cast<char>(rng.uniform_int(256)); break;
        case 1: doc.erase(pos, 1 + rng.uniform_int(4)); break;
        default: doc.insert(pos, 1, static_cast<char>(rng.uniform_int(256))); break;
      }
      if (doc.empty()) doc = "x";
    }
    try {
      switch (trial % documents.size()) {
        case 0: read_ply(doc); break;
        case 1: { ImagePlane r, g, b; read_ppm(doc, r, g, b); break; }
        case 2: read_pgm(doc); break;
        case 3: read_depth_raw(doc); break;
        case 4: read_pose_json(doc); break;
        default: read_fusion_config_json(doc); break;
      }
      ++accepted;  // a mutation can cancel out or stay within tolerance
    } catch (const Error&) {
      ++rejected;
    }
  }
  CHECK(rejected + accepted == 2000);
  CHECK(rejected > 1500);  // the vast majority of mutations must be caught
}
