#include "pose6d/net/loss.hpp"

namespace pose6d {

PointTargets targets_from_votes(const VoteField& votes) {
  votes.validate();
  const int n = votes.size();
  const int k = votes.keypoint_count();
  PointTargets t;
  t.labels.resize(n);
  t.labeled.resize(n);
  t.center_offsets = Tensor::zeros({n, 3});
  t.center_offsets.matrix() = votes.center_offset;
  t.keypoint_offsets = Tensor::zeros({n, 3 * k});
  for (int j = 0; j < k; ++j)
    t.keypoint_offsets.matrix().middleCols(3 * j, 3) = votes.keypoint_offsets[j];
  for (int i = 0; i < n; ++i) {
    t.labels[i] = votes.semantic[i];
    t.labeled[i] = votes.semantic[i] > 0;
  }
  return t;
}

LossNodes multi_task_loss(Graph& g, const ForwardResult& fr,
                          const PointTargets& targets, const LossWeights& weights,
                          double alpha, double gamma) {
  const int n = g.value(fr.logits).rows();
  if (static_cast<int>(targets.labels.size()) != n ||
      static_cast<int>(targets.labeled.size()) != n)
    throw InvalidArgumentError("loss targets do not match prediction row count");
  if (!g.value(fr.centers).same_shape(targets.center_offsets) ||
      !g.value(fr.keypoints).same_shape(targets.keypoint_offsets))
    throw InvalidArgumentError("loss target shapes do not match predictions");
  LossNodes nodes;
  nodes.focal = g.focal_loss(fr.logits, targets.labels, alpha, gamma);
  nodes.center = g.l1_loss(fr.centers, targets.center_offsets, targets.labeled);
  nodes.keypoint = g.l1_loss(fr.keypoints, targets.keypoint_offsets, targets.labeled);
  nodes.total = g.weighted_sum({nodes.focal, nodes.center, nodes.keypoint},
                               {weights.sem, weights.center, weights.keypoint});
  return nodes;
}

LossBreakdown read_losses(const Graph& g, const LossNodes& nodes) {
  LossBreakdown out;
  out.total = g.value(nodes.total).data[0];
  out.focal = g.value(nodes.focal).data[0];
  out.center = g.value(nodes.center).data[0];
  out.keypoint = g.value(nodes.keypoint).data[0];
  return out;
}

}  // namespace pose6d
