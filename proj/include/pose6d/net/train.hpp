#pragma once

#include <vector>

#include "pose6d/net/loss.hpp"
#include "pose6d/synth/scene.hpp"

namespace pose6d {

struct TrainConfig {
  int steps = 200;
  double lr = 0.05;
  LossWeights weights;
  double focal_alpha = 1.0;
  double focal_gamma = 2.0;
};

struct TrainResult {
  ParamStore params;
  /// steps + 1 entries: entry i is the mean scene loss after i updates, so
  /// the first entry is the untrained loss and the last follows the final
  /// update.
  std::vector<double> loss_trace;
};

/// Full-batch gradient descent on the multi-task loss over the given scenes.
/// The seed fixes parameter init and each scene's point draw, so a run is
/// reproducible end to end. Scene frames must fit the network's 64x64 image
/// limit and expose at least n_points valid pixels. Throws DivergenceError
/// (carrying the step) the moment the mean loss leaves the finite range.
TrainResult train_toy(const std::vector<SceneBundle>& scenes,
                      const FusionConfig& cfg, const TrainConfig& tc,
                      uint64_t seed);

}  // namespace pose6d
