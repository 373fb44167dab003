#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "pose6d/core/camera.hpp"
#include "pose6d/core/rng.hpp"
#include "pose6d/core/subsample.hpp"
#include "pose6d/io/image_io.hpp"
#include "pose6d/io/json_io.hpp"
#include "pose6d/io/ply.hpp"
#include "pose6d/io/report.hpp"
#include "pose6d/io/scene_io.hpp"
#include "pose6d/keypoints/fps.hpp"
#include "pose6d/keypoints/sift_fps.hpp"
#include "pose6d/metrics/metrics.hpp"
#include "pose6d/net/gradcheck.hpp"
#include "pose6d/net/train.hpp"
#include "pose6d/synth/scene.hpp"
#include "pose6d/voting/detect.hpp"

namespace fs = std::filesystem;
using namespace pose6d;

namespace {

std::string format9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

ProceduralObject object_from_ply(const std::string& path) {
  ProceduralObject obj;
  obj.object_id = fs::path(path).stem().string();
  obj.surface = load_ply(path);
  if (obj.surface.size() < 2)
    throw InvalidArgumentError("mesh '" + path + "' holds fewer than 2 points");
  obj.center = obj.surface.points.colwise().mean().transpose();
  obj.diameter = model_diameter(obj.surface.points);
  return obj;
}

/// A directory is a scene bundle iff it holds frame.ppm; otherwise its
/// immediate subdirectories are scanned in name order.
std::vector<std::string> scene_dirs(const std::string& root) {
  if (fs::exists(fs::path(root) / "frame.ppm")) return {root};
  std::vector<std::string> dirs;
  if (!fs::is_directory(root))
    throw InvalidArgumentError("'" + root + "' is not a directory");
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "frame.ppm"))
      dirs.push_back(entry.path().string());
  }
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty())
    throw InvalidArgumentError("no scene bundles under '" + root + "'");
  return dirs;
}

ProceduralObject named_object(const std::string& name) {
  if (name == "box") return make_box("box", {0.08, 0.06, 0.05});
  if (name == "cylinder") return make_cylinder("cylinder", 0.025, 0.09);
  if (name == "sphere") return make_sphere("sphere", 0.03);
  if (name == "l_bracket") return make_l_bracket("l_bracket", 0.09, 0.07, 0.04, 0.015);
  if (name == "blob_cube") return make_blob_cube("blob_cube");
  throw InvalidArgumentError("unknown object '" + name +
                             "' (box, cylinder, sphere, l_bracket, blob_cube)");
}

/// Scene-generation spec: the defaults of default_scene_spec overridden by
/// the optional JSON file fields (scenes, width, height, focal, objects,
/// instance counts, placement ranges, vote_points).
struct GenerateSpec {
  int scenes = 1;
  SceneSpec scene = default_scene_spec();
};

GenerateSpec generate_spec_from_json(const std::string& path) {
  GenerateSpec spec;
  const Json j = parse_json(read_file(path));
  if (j.value("format_version", kFormatVersion) != kFormatVersion)
    throw ParseError("unsupported format_version in '" + path + "'");
  spec.scenes = j.value("scenes", spec.scenes);
  if (spec.scenes < 1) throw InvalidArgumentError("scene spec: scenes must be >= 1");
  SceneSpec& s = spec.scene;
  if (j.contains("objects")) {
    s.objects.clear();
    for (const Json& name : j["objects"]) s.objects.push_back(named_object(name.get<std::string>()));
    if (s.objects.empty()) throw InvalidArgumentError("scene spec: empty object list");
  }
  const int width = j.value("width", s.intrinsics.width);
  const int height = j.value("height", s.intrinsics.height);
  const double focal = j.value("focal", s.intrinsics.fx);
  s.intrinsics = {focal, focal, width / 2.0, height / 2.0, width, height};
  s.min_instances = j.value("min_instances", s.min_instances);
  s.max_instances = j.value("max_instances", s.max_instances);
  s.min_z = j.value("min_z", s.min_z);
  s.max_z = j.value("max_z", s.max_z);
  s.lateral_x = j.value("lateral_x", s.lateral_x);
  s.lateral_y = j.value("lateral_y", s.lateral_y);
  s.min_separation = j.value("min_separation", s.min_separation);
  s.same_class_separation = j.value("same_class_separation", s.same_class_separation);
  s.backdrop_distance = j.value("backdrop_distance", s.backdrop_distance);
  s.vote_points = j.value("vote_points", s.vote_points);
  return spec;
}

/// The train-toy batch: four small frames, two object classes, geometry
/// scaled down so 200 full-batch steps stay cheap.
SceneSpec tiny_scene_spec() {
  SceneSpec spec = default_scene_spec();
  spec.objects = {named_object("box"), named_object("cylinder")};
  spec.intrinsics = {60.0, 60.0, 24.0, 24.0, 48, 48};
  spec.min_instances = 2;
  spec.max_instances = 2;
  return spec;
}

std::map<int, KeypointModel> class_keypoints(const SceneBundle& bundle) {
  std::map<int, KeypointModel> models;
  for (const auto& [class_id, cm] : bundle.classes) models.emplace(class_id, cm.keypoints);
  return models;
}

// ---------------------------------------------------------------- commands

struct KeypointsArgs {
  std::string mesh, algo, out;
  int n = 8;
  int views = 60;
  std::optional<uint64_t> seed;
};

void cmd_keypoints_select(const KeypointsArgs& a) {
  const ProceduralObject obj = object_from_ply(a.mesh);
  KeypointModel model;
  if (a.algo == "fps") {
    model = fps_select(obj, a.n, a.seed);
  } else {
    if (!obj.surface.has_colors())
      throw InvalidArgumentError("sift-fps needs a mesh with per-vertex colors");
    SiftFpsParams params;
    params.views = a.views;
    params.seed = a.seed;
    model = sift_fps_select(obj, a.n, params);
  }
  write_file(a.out, write_keypoint_model_json(model));
  std::cout << "selected " << model.count() << " keypoints (" << a.algo << ") -> "
            << a.out << "\n";
}

struct GenerateArgs {
  std::string spec_path, out;
  uint64_t seed = 0;
};

void cmd_synth_generate(const GenerateArgs& a) {
  GenerateSpec spec;
  if (!a.spec_path.empty()) spec = generate_spec_from_json(a.spec_path);
  for (int i = 0; i < spec.scenes; ++i) {
    const SceneBundle bundle = make_scene(spec.scene, a.seed + i);
    char name[16];
    std::snprintf(name, sizeof(name), "scene%03d", i);
    save_scene_bundle(bundle, (fs::path(a.out) / name).string());
  }
  std::cout << "wrote " << spec.scenes << " scene(s) under " << a.out << "\n";
}

struct FitArgs {
  std::string scene, keypoints, out;
  double noise_sigma = 0.0;
  double outlier_frac = 0.0;
  int vote_points = 4096;
  uint64_t seed = 0;
};

void cmd_pose_fit(const FitArgs& a) {
  std::optional<KeypointModel> override_model;
  if (!a.keypoints.empty())
    override_model = read_keypoint_model_json(read_file(a.keypoints));

  const std::vector<std::string> dirs = scene_dirs(a.scene);
  Rng rng(a.seed);
  std::vector<PoseRecord> records;
  for (int si = 0; si < static_cast<int>(dirs.size()); ++si) {
    const uint64_t sample_seed = rng.next_u64();
    const uint64_t corrupt_seed = rng.next_u64();
    const SceneBundle bundle = load_scene_bundle(dirs[si]);
    std::map<int, KeypointModel> models = class_keypoints(bundle);
    if (override_model) {
      int hits = 0;
      for (auto& [class_id, model] : models) {
        if (model.object_id == override_model->object_id) {
          model = *override_model;
          ++hits;
        }
      }
      if (hits == 0)
        throw InvalidArgumentError("keypoint override '" + override_model->object_id +
                                   "' matches no class in " + dirs[si]);
    }

    std::vector<int> valid;
    Points coords;
    lift_depth(bundle.frame).collect_valid(valid, coords);
    const int n = std::min<int>(a.vote_points, static_cast<int>(valid.size()));
    const std::vector<int> picks = subsample_indices(static_cast<int>(valid.size()), n, sample_seed);
    std::vector<int> flat(n);
    for (int i = 0; i < n; ++i) flat[i] = valid[picks[i]];

    VoteField votes = ground_truth_votes(bundle.frame, bundle.annotation, models, flat);
    if (a.noise_sigma > 0.0 || a.outlier_frac > 0.0)
      votes = corrupt_votes(votes, a.noise_sigma, a.outlier_frac, corrupt_seed);

    const std::vector<Detection> detections = detect_and_fit(votes, models);
    for (const Detection& det : detections) {
      if (!det.pose) continue;
      PoseRecord rec;
      rec.scene = si;
      rec.class_id = det.class_id;
      rec.object_id = bundle.classes.at(det.class_id).object_id;
      rec.pose = *det.pose;
      records.push_back(std::move(rec));
    }
  }
  write_file(a.out, write_poses_json(records));
  std::cout << "fit " << records.size() << " pose(s) across " << dirs.size()
            << " scene(s) -> " << a.out << "\n";
}

struct EvalArgs {
  std::string pred, gt, metrics = "add,adds,auc,add01d", out;
};

std::vector<std::string> split_tokens(const std::string& csv) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : csv) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

void cmd_eval(const EvalArgs& a) {
  const std::vector<PoseRecord> preds = read_poses_json(read_file(a.pred));
  const std::vector<std::string> dirs = scene_dirs(a.gt);

  std::vector<ReportRow> rows;
  std::vector<EvalRecord> eval_records;
  for (int si = 0; si < static_cast<int>(dirs.size()); ++si) {
    const SceneBundle bundle = load_scene_bundle(dirs[si]);

    std::map<int, std::vector<const InstanceInfo*>> gt_by_class;
    for (const InstanceInfo& info : bundle.annotation.instances)
      if (info.class_id > 0) gt_by_class[info.class_id].push_back(&info);
    std::map<int, std::vector<const PoseRecord*>> pred_by_class;
    for (const PoseRecord& rec : preds)
      if (rec.scene == si) pred_by_class[rec.class_id].push_back(&rec);

    for (const auto& [class_id, gts] : gt_by_class) {
      const auto it = pred_by_class.find(class_id);
      const size_t n_pred = it == pred_by_class.end() ? 0 : it->second.size();
      if (n_pred != gts.size())
        throw InvalidArgumentError(
            "scene " + std::to_string(si) + " class " + std::to_string(class_id) + ": " +
            std::to_string(n_pred) + " prediction(s) for " + std::to_string(gts.size()) +
            " instance(s)");
      const ClassModel& cm = bundle.classes.at(class_id);
      for (const PoseRecord* rec : it->second) {
        if (rec->object_id != cm.object_id)
          throw InvalidArgumentError("object id mismatch in scene " + std::to_string(si) +
                                     ": prediction says '" + rec->object_id +
                                     "', ground truth says '" + cm.object_id + "'");
      }

      // Greedy nearest-translation matching, closest pair first.
      std::vector<const PoseRecord*> free_pred = it->second;
      std::vector<const InstanceInfo*> free_gt = gts;
      PointCloud model;
      model.points = cm.points;
      while (!free_pred.empty()) {
        size_t best_p = 0, best_g = 0;
        double best_d = -1;
        for (size_t p = 0; p < free_pred.size(); ++p) {
          for (size_t gi = 0; gi < free_gt.size(); ++gi) {
            const double d = (free_pred[p]->pose.translation() -
                              free_gt[gi]->pose.translation())
                                 .norm();
            if (best_d < 0 || d < best_d) {
              best_d = d;
              best_p = p;
              best_g = gi;
            }
          }
        }
        const PoseRecord* rec = free_pred[best_p];
        const InstanceInfo* info = free_gt[best_g];
        free_pred.erase(free_pred.begin() + best_p);
        free_gt.erase(free_gt.begin() + best_g);

        ReportRow row;
        row.scene = si;
        row.instance_id = info->instance_id;
        row.class_id = class_id;
        row.object_id = cm.object_id;
        row.symmetric = cm.symmetric;
        row.add = add(model, rec->pose, info->pose);
        row.adds = add_s(model, rec->pose, info->pose);
        row.dispatch = cm.symmetric ? row.adds : row.add;
        row.diameter = cm.keypoints.diameter;
        rows.push_back(row);
        eval_records.push_back({cm.object_id, cm.symmetric, row.dispatch, row.diameter});
      }
    }
  }

  std::vector<double> add_list, adds_list, dispatch_list;
  for (const ReportRow& r : rows) {
    add_list.push_back(r.add);
    adds_list.push_back(r.adds);
    dispatch_list.push_back(r.dispatch);
  }
  std::vector<std::pair<std::string, double>> summary;
  for (const std::string& tok : split_tokens(a.metrics)) {
    double value = 0;
    if (tok == "add") {
      for (double d : add_list) value += d;
      value /= add_list.empty() ? 1 : add_list.size();
    } else if (tok == "adds") {
      for (double d : adds_list) value += d;
      value /= adds_list.empty() ? 1 : adds_list.size();
    } else if (tok == "auc") {
      value = add_auc(dispatch_list);
    } else if (tok == "add01d") {
      value = add_01d(eval_records);
    } else {
      throw InvalidArgumentError("unknown metric '" + tok +
                                 "' (add, adds, auc, add01d)");
    }
    summary.emplace_back(tok, value);
  }

  write_file(a.out, write_report_csv(rows, summary));
  for (const auto& [metric, value] : summary) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    std::cout << metric << " " << buf << "\n";
  }
}

void cmd_gradcheck(uint64_t seed) {
  const GradCheckSummary summary = run_gradcheck_suite(seed);
  std::cout << "per-op max rel err: " << format9(summary.per_op_max) << "\n";
  std::cout << "end-to-end max rel err: " << format9(summary.end_to_end_max) << "\n";
  if (summary.per_op_max >= 1e-5 || summary.end_to_end_max >= 1e-4)
    throw DivergenceError("gradient check exceeded tolerance", 0);
}

struct TrainArgs {
  int steps = 200;
  double lr = 0.05;
  int scenes = 4;
  std::string config_path, out;
  uint64_t seed = 11;
};

void cmd_train_toy(const TrainArgs& a) {
  FusionConfig cfg;
  if (!a.config_path.empty()) cfg = read_fusion_config_json(read_file(a.config_path));

  const SceneSpec spec = tiny_scene_spec();
  std::vector<SceneBundle> scenes;
  for (int i = 0; i < a.scenes; ++i) scenes.push_back(make_scene(spec, a.seed * 1000 + i));

  TrainConfig tc;
  tc.steps = a.steps;
  tc.lr = a.lr;
  const TrainResult result = train_toy(scenes, cfg, tc, a.seed);

  if (!a.out.empty()) {
    std::string csv = "step,loss\n";
    for (size_t i = 0; i < result.loss_trace.size(); ++i)
      csv += std::to_string(i) + "," + format9(result.loss_trace[i]) + "\n";
    write_file(a.out, csv);
  }
  const double initial = result.loss_trace.front();
  const double final_loss = result.loss_trace.back();
  std::cout << "initial loss " << format9(initial) << ", final loss "
            << format9(final_loss) << ", ratio " << format9(final_loss / initial) << "\n";
}

struct PlotArgs {
  std::string in, curve = "auc", out;
};

void cmd_plot(const PlotArgs& a) {
  std::vector<ReportRow> rows;
  std::vector<std::pair<std::string, double>> summary;
  read_report_csv(read_file(a.in), rows, summary);
  if (rows.empty()) throw InvalidArgumentError("report has no instance rows");
  std::vector<double> distances;
  std::string label;
  for (const ReportRow& r : rows) {
    if (a.curve == "auc") {
      distances.push_back(r.dispatch);
      label = "ADD(S) accuracy vs. threshold";
    } else if (a.curve == "add") {
      distances.push_back(r.add);
      label = "ADD accuracy vs. threshold";
    } else if (a.curve == "adds") {
      distances.push_back(r.adds);
      label = "ADD-S accuracy vs. threshold";
    } else {
      throw InvalidArgumentError("unknown curve '" + a.curve + "' (auc, add, adds)");
    }
  }
  write_file(a.out, accuracy_curve_svg(distances, 0.1, label));
  std::cout << "wrote " << a.out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale RGB-D 6D object pose estimation pipeline"};
  app.require_subcommand(1);

  // keypoints select
  auto* keypoints = app.add_subcommand("keypoints", "Keypoint model tools");
  keypoints->require_subcommand(1);
  KeypointsArgs ka;
  uint64_t ka_seed = 0;
  bool ka_has_seed = false;
  auto* select = keypoints->add_subcommand("select", "Select 3D keypoints from a mesh");
  select->add_option("--mesh", ka.mesh, "Input PLY mesh")->required()->check(CLI::ExistingFile);
  select->add_option("--algo", ka.algo, "Selection algorithm")
      ->required()
      ->check(CLI::IsMember({"fps", "sift-fps"}));
  select->add_option("--n", ka.n, "Keypoint count")->required()->check(CLI::IsMember({4, 8, 12}));
  select->add_option("--views", ka.views, "Rendered viewpoints (sift-fps)")->capture_default_str()
      ->check(CLI::PositiveNumber);
  auto* seed_opt = select->add_option("--seed", ka_seed, "FPS seed (default: deterministic)");
  select->add_option("-o,--output", ka.out, "Output keypoint model JSON")->required();
  select->callback([&] {
    ka_has_seed = seed_opt->count() > 0;
    if (ka_has_seed) ka.seed = ka_seed;
    cmd_keypoints_select(ka);
  });

  // synth generate
  auto* synth = app.add_subcommand("synth", "Synthetic scene tools");
  synth->require_subcommand(1);
  GenerateArgs ga;
  auto* generate = synth->add_subcommand("generate", "Generate scene bundles");
  generate->add_option("--spec", ga.spec_path, "Scene spec JSON (optional)")
      ->check(CLI::ExistingFile);
  generate->add_option("--out", ga.out, "Output directory")->required();
  generate->add_option("--seed", ga.seed, "Scene seed")->capture_default_str();
  generate->callback([&] { cmd_synth_generate(ga); });

  // pose fit
  auto* pose = app.add_subcommand("pose", "Pose estimation tools");
  pose->require_subcommand(1);
  FitArgs fa;
  auto* fit = pose->add_subcommand("fit", "Vote, cluster, and fit poses");
  fit->add_option("--scene", fa.scene, "Scene bundle dir (or parent of bundles)")
      ->required()
      ->check(CLI::ExistingDirectory);
  fit->add_option("--keypoints", fa.keypoints, "Keypoint model JSON override")
      ->check(CLI::ExistingFile);
  fit->add_option("--noise-sigma", fa.noise_sigma, "Gaussian vote noise (m)")->capture_default_str();
  fit->add_option("--outliers", fa.outlier_frac, "Outlier vote fraction")->capture_default_str();
  fit->add_option("--votes", fa.vote_points, "Vote field size")->capture_default_str()->check(CLI::PositiveNumber);
  fit->add_option("--seed", fa.seed, "Sampling/noise seed")->capture_default_str();
  fit->add_option("-o,--output", fa.out, "Output poses JSON")->required();
  fit->callback([&] { cmd_pose_fit(fa); });

  // eval
  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate predicted poses");
  eval_cmd->add_option("--pred", ea.pred, "Predicted poses JSON")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--gt", ea.gt, "Ground-truth scene dir")->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--metrics", ea.metrics, "Comma list: add,adds,auc,add01d")->capture_default_str();
  eval_cmd->add_option("-o,--output", ea.out, "Output report CSV")->required();
  eval_cmd->callback([&] { cmd_eval(ea); });

  // gradcheck
  uint64_t gc_seed = 7;
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient check");
  gradcheck->add_option("--seed", gc_seed, "Probe seed")->capture_default_str();
  gradcheck->callback([&] { cmd_gradcheck(gc_seed); });

  // train-toy
  TrainArgs ta;
  auto* train = app.add_subcommand("train-toy", "Full-batch training on tiny scenes");
  train->add_option("--steps", ta.steps, "Gradient steps")->capture_default_str()->check(CLI::NonNegativeNumber);
  train->add_option("--lr", ta.lr, "Learning rate")->capture_default_str();
  train->add_option("--scenes", ta.scenes, "Scene count")->capture_default_str()->check(CLI::PositiveNumber);
  train->add_option("--config", ta.config_path, "FusionConfig JSON")->check(CLI::ExistingFile);
  train->add_option("--seed", ta.seed, "Training seed")->capture_default_str();
  train->add_option("-o,--output", ta.out, "Loss trace CSV");
  train->callback([&] { cmd_train_toy(ta); });

  // plot
  PlotArgs pa;
  auto* plot = app.add_subcommand("plot", "Render the accuracy-threshold curve");
  plot->add_option("--in", pa.in, "Report CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--curve", pa.curve, "Distance column")->capture_default_str()
      ->check(CLI::IsMember({"auc", "add", "adds"}));
  plot->add_option("-o,--output", pa.out, "Output SVG")->required();
  plot->callback([&] { cmd_plot(pa); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const InvalidArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const InsufficientSaliencyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const InsufficientCorrespondencesError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
