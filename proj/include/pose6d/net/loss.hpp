#pragma once

#include <vector>

#include "pose6d/net/model.hpp"
#include "pose6d/voting/detect.hpp"

namespace pose6d {

struct LossWeights {
  double sem = 2.0;
  double center = 1.0;
  double keypoint = 1.0;
};

/// Per-point supervision in the layout the heads emit: labels for the focal
/// term, flattened K x 3 keypoint offsets row-per-point, and the labeled
/// mask (class > 0) restricting both regression terms.
struct PointTargets {
  std::vector<int> labels;
  Tensor center_offsets;    // N x 3
  Tensor keypoint_offsets;  // N x (K*3), point i row = [k0 | k1 | ...]
  std::vector<bool> labeled;
};

PointTargets targets_from_votes(const VoteField& votes);

/// Graph node ids of the loss terms; total = sem * focal + center * l1_c +
/// keypoint * l1_k.
struct LossNodes {
  int total = -1;
  int focal = -1;
  int center = -1;
  int keypoint = -1;
};

LossNodes multi_task_loss(Graph& g, const ForwardResult& fr,
                          const PointTargets& targets, const LossWeights& weights,
                          double alpha = 1.0, double gamma = 2.0);

struct LossBreakdown {
  double total = 0;
  double focal = 0;
  double center = 0;
  double keypoint = 0;
};

LossBreakdown read_losses(const Graph& g, const LossNodes& nodes);

}  // namespace pose6d
