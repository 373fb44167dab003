#include "pose6d/net/train.hpp"

#include <cmath>
#include <exception>
#include <mutex>

#include "pose6d/core/parallel.hpp"
#include "pose6d/core/rng.hpp"

namespace pose6d {

namespace {

struct SceneBatch {
  const RgbdFrame* frame = nullptr;
  SampledPoints pts;
  PointTargets targets;
  uint64_t subsample_seed = 0;
};

struct SceneEval {
  double loss = 0;
  std::map<std::string, Tensor> grads;  // filled only when grads requested
};

SceneEval eval_scene(const SceneBatch& sc, const FusionConfig& cfg,
                     const ParamStore& params, const TrainConfig& tc,
                     bool want_grads) {
  Graph g;
  const ForwardResult fr = forward(g, *sc.frame, sc.pts, cfg, params, sc.subsample_seed);
  const LossNodes ln =
      multi_task_loss(g, fr, sc.targets, tc.weights, tc.focal_alpha, tc.focal_gamma);
  SceneEval out;
  out.loss = g.value(ln.total).data[0];
  if (want_grads) {
    g.backward(ln.total);
    for (const auto& [name, id] : fr.param_nodes) out.grads.emplace(name, g.grad(id));
  }
  return out;
}

}  // namespace

TrainResult train_toy(const std::vector<SceneBundle>& scenes,
                      const FusionConfig& cfg, const TrainConfig& tc,
                      uint64_t seed) {
  cfg.validate();
  if (scenes.empty()) throw InvalidArgumentError("train_toy: no scenes");
  if (tc.steps < 0 || !(tc.lr >= 0.0))
    throw InvalidArgumentError("train_toy: steps and lr must be non-negative");

  Rng rng(seed);
  TrainResult result;
  result.params = init_params(cfg, rng.next_u64());

  // Freeze each scene's point draw and decimation stream up front; training
  // then sees a fixed batch every step.
  const int n_scenes = static_cast<int>(scenes.size());
  std::vector<SceneBatch> batch(n_scenes);
  for (int i = 0; i < n_scenes; ++i) {
    const uint64_t sample_seed = rng.next_u64();
    batch[i].subsample_seed = rng.next_u64();
    batch[i].frame = &scenes[i].frame;
    batch[i].pts = sample_scene_points(scenes[i].frame, cfg.n_points, sample_seed);
    std::map<int, KeypointModel> models;
    for (const auto& [cls, cm] : scenes[i].classes) models.emplace(cls, cm.keypoints);
    batch[i].targets = targets_from_votes(ground_truth_votes(
        scenes[i].frame, scenes[i].annotation, models, batch[i].pts.flat_indices));
  }

  result.loss_trace.reserve(tc.steps + 1);
  for (int step = 0; step <= tc.steps; ++step) {
    const bool want_grads = step < tc.steps;
    std::vector<SceneEval> evals(n_scenes);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    parallel_for(n_scenes, [&](int i) {
      try {
        evals[i] = eval_scene(batch[i], cfg, result.params, tc, want_grads);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
    if (first_error) std::rethrow_exception(first_error);

    double mean_loss = 0;
    for (const SceneEval& ev : evals) mean_loss += ev.loss;
    mean_loss /= n_scenes;
    result.loss_trace.push_back(mean_loss);
    if (!std::isfinite(mean_loss))
      throw DivergenceError("train_toy: mean loss is not finite", step);

    if (!want_grads) break;
    for (const auto& [name, first] : evals[0].grads) {
      Tensor sum = first;
      for (int i = 1; i < n_scenes; ++i) sum.data += evals[i].grads.at(name).data;
      result.params.get(name).data -= (tc.lr / n_scenes) * sum.data;
    }
  }
  return result;
}

}  // namespace pose6d
