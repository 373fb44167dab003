#include "pose6d/net/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "pose6d/core/rng.hpp"
#include "pose6d/net/loss.hpp"
#include "pose6d/net/model.hpp"

namespace pose6d {

namespace {

double evaluate(const std::vector<Tensor>& inputs, const GraphBuilder& build,
                std::vector<Tensor>* grads_out) {
  Graph g;
  std::vector<int> ids;
  ids.reserve(inputs.size());
  for (const Tensor& t : inputs) ids.push_back(g.param(t));
  const int out = build(g, ids);
  const double value = g.value(out).data[0];
  if (grads_out) {
    g.backward(out);
    grads_out->clear();
    for (int id : ids) grads_out->push_back(g.grad(id));
  }
  return value;
}

}  // namespace

double max_grad_rel_err(std::vector<Tensor> inputs, const GraphBuilder& build,
                        const std::vector<CoordRef>& coords, double h) {
  std::vector<Tensor> grads;
  evaluate(inputs, build, &grads);

  std::vector<CoordRef> probes = coords;
  if (probes.empty()) {
    for (int i = 0; i < static_cast<int>(inputs.size()); ++i)
      for (int j = 0; j < inputs[i].numel(); ++j) probes.push_back({i, j});
  }

  double worst = 0;
  for (const CoordRef& c : probes) {
    double& slot = inputs.at(c.input).data[c.offset];
    const double saved = slot;
    slot = saved + h;
    const double above = evaluate(inputs, build, nullptr);
    slot = saved - h;
    const double below = evaluate(inputs, build, nullptr);
    slot = saved;
    const double numeric = (above - below) / (2.0 * h);
    const double analytic = grads.at(c.input).data[c.offset];
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-4});
    worst = std::max(worst, std::abs(analytic - numeric) / denom);
  }
  return worst;
}

namespace {

Tensor rand_tensor(Rng& rng, int r, int c, double lo = -1.0, double hi = 1.0) {
  Tensor t = Tensor::zeros({r, c});
  for (int i = 0; i < t.numel(); ++i) t.data[i] = rng.uniform(lo, hi);
  return t;
}

/// Uniform magnitude in [0.1, 1] with a random sign: keeps probes clear of
/// the ReLU / L1 kinks so central differences stay two-sided.
Tensor rand_tensor_off_zero(Rng& rng, int r, int c) {
  Tensor t = Tensor::zeros({r, c});
  for (int i = 0; i < t.numel(); ++i)
    t.data[i] = rng.uniform(0.1, 1.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
  return t;
}

/// Reduce an R x C node to a scalar through two random linear readouts, so
/// every entry reaches the output with its own distinct weight (misrouted
/// gradients cannot hide behind a uniform reduction).
struct Scalarizer {
  Tensor w2, b2, w3, b3;

  static Scalarizer make(Rng& rng, int r, int c) {
    return {rand_tensor(rng, c, 1), rand_tensor(rng, 1, 1), rand_tensor(rng, r, 1),
            rand_tensor(rng, 1, 1)};
  }

  /// Appends the four readout tensors to `inputs` and returns a builder
  /// wrapper that applies the readout after `op` produced its node.
  GraphBuilder wrap(std::vector<Tensor>& inputs,
                    const std::function<int(Graph&, const std::vector<int>&)>& op) const {
    const int base = static_cast<int>(inputs.size());
    inputs.push_back(w2);
    inputs.push_back(b2);
    inputs.push_back(w3);
    inputs.push_back(b3);
    const int rows = static_cast<int>(w3.rows());
    return [op, base, rows](Graph& g, const std::vector<int>& ids) {
      const int out = op(g, ids);
      const int col = g.linear(out, ids[base], ids[base + 1]);
      const int row = g.reshape(col, {1, rows});
      return g.linear(row, ids[base + 2], ids[base + 3]);
    };
  }
};

double check_op(std::vector<Tensor> inputs, Rng& rng, int out_r, int out_c,
                const std::function<int(Graph&, const std::vector<int>&)>& op) {
  const Scalarizer s = Scalarizer::make(rng, out_r, out_c);
  const GraphBuilder build = s.wrap(inputs, op);
  return max_grad_rel_err(std::move(inputs), build);
}

double per_op_probes(Rng& rng) {
  double worst = 0;
  const auto track = [&](double err) { worst = std::max(worst, err); };

  // linear
  track(check_op({rand_tensor(rng, 5, 4), rand_tensor(rng, 4, 3), rand_tensor(rng, 1, 3)},
                 rng, 5, 3, [](Graph& g, const std::vector<int>& ids) {
                   return g.linear(ids[0], ids[1], ids[2]);
                 }));
  // relu
  track(check_op({rand_tensor_off_zero(rng, 5, 4)}, rng, 5, 4,
                 [](Graph& g, const std::vector<int>& ids) { return g.relu(ids[0]); }));
  // concat_cols
  track(check_op({rand_tensor(rng, 4, 3), rand_tensor(rng, 4, 2)}, rng, 4, 5,
                 [](Graph& g, const std::vector<int>& ids) {
                   return g.concat_cols(ids[0], ids[1]);
                 }));
  // gather_rows with a repeated row (checks scatter-add)
  track(check_op({rand_tensor(rng, 6, 3)}, rng, 5, 3,
                 [](Graph& g, const std::vector<int>& ids) {
                   return g.gather_rows(ids[0], {0, 2, 2, 5, 1});
                 }));
  // gather_rows_zero with padding rows
  track(check_op({rand_tensor(rng, 6, 3)}, rng, 5, 3,
                 [](Graph& g, const std::vector<int>& ids) {
                   return g.gather_rows_zero(ids[0], {-1, 0, 3, -1, 2});
                 }));
  // gather_max over distinct random values (ties would kink the FD probe)
  track(check_op({rand_tensor(rng, 6, 3)}, rng, 3, 3,
                 [](Graph& g, const std::vector<int>& ids) {
                   IndexMatrix groups(3, 2);
                   groups << 0, 1, 2, 4, 5, 3;
                   return g.gather_max(ids[0], groups);
                 }));
  // overwrite_rows
  track(check_op({rand_tensor(rng, 5, 3), rand_tensor(rng, 2, 3)}, rng, 5, 3,
                 [](Graph& g, const std::vector<int>& ids) {
                   return g.overwrite_rows(ids[0], {1, 3}, ids[1]);
                 }));
  // reshape
  track(check_op({rand_tensor(rng, 4, 6)}, rng, 3, 8,
                 [](Graph& g, const std::vector<int>& ids) {
                   return g.reshape(ids[0], {3, 8});
                 }));

  // weighted_sum over three scalarized terms
  {
    std::vector<Tensor> inputs = {rand_tensor(rng, 3, 2), rand_tensor(rng, 2, 2)};
    const Scalarizer s1 = Scalarizer::make(rng, 3, 2);
    const Scalarizer s2 = Scalarizer::make(rng, 2, 2);
    const GraphBuilder b1 = s1.wrap(inputs, [](Graph&, const std::vector<int>& ids) {
      return ids[0];
    });
    const GraphBuilder b2 = s2.wrap(inputs, [](Graph&, const std::vector<int>& ids) {
      return ids[1];
    });
    track(max_grad_rel_err(inputs, [&](Graph& g, const std::vector<int>& ids) {
      const int t1 = b1(g, ids);
      const int t2 = b2(g, ids);
      return g.weighted_sum({t1, t2}, {0.7, -1.3});
    }));
  }

  // focal loss, gamma = 2 and the plain cross-entropy gamma = 0 branch
  const std::vector<int> labels = {0, 1, 2, 0, 2, 1};
  for (const double gamma : {2.0, 0.0}) {
    track(max_grad_rel_err({rand_tensor(rng, 6, 3, -2.0, 2.0)},
                           [labels, gamma](Graph& g, const std::vector<int>& ids) {
                             return g.focal_loss(ids[0], labels, 1.0, gamma);
                           }));
  }

  // masked l1 (targets offset so |pred - target| stays away from its kink)
  {
    Tensor pred = rand_tensor(rng, 5, 3);
    Tensor target = pred;
    const Tensor offsets = rand_tensor_off_zero(rng, 5, 3);
    target.data += offsets.data;
    const std::vector<bool> mask = {true, false, true, true, false};
    track(max_grad_rel_err({pred}, [target, mask](Graph& g, const std::vector<int>& ids) {
      return g.l1_loss(ids[0], target, mask);
    }));
  }
  return worst;
}

/// Tiny fully-valid synthetic frame: enough pixels for two decimation
/// levels, nothing more.
RgbdFrame tiny_frame(Rng& rng) {
  const int hw = 12;
  RgbdFrame frame;
  frame.intrinsics = {15.0, 15.0, 6.0, 6.0, hw, hw};
  frame.red.resize(hw, hw);
  frame.green.resize(hw, hw);
  frame.blue.resize(hw, hw);
  frame.depth.resize(hw, hw);
  for (int v = 0; v < hw; ++v) {
    for (int u = 0; u < hw; ++u) {
      frame.red(v, u) = rng.uniform();
      frame.green(v, u) = rng.uniform();
      frame.blue(v, u) = rng.uniform();
      frame.depth(v, u) = rng.uniform(0.4, 0.8);
    }
  }
  return frame;
}

double end_to_end_probe(Rng& rng) {
  FusionConfig cfg;
  cfg.n_points = 24;
  cfg.n_cls = 3;
  cfg.n_keypoints = 2;
  cfg.lfa_k = 4;
  cfg.k_r2p = 4;

  const RgbdFrame frame = tiny_frame(rng);
  const SampledPoints pts = sample_scene_points(frame, cfg.n_points, rng.next_u64());
  ParamStore params = init_params(cfg, rng.next_u64());
  const uint64_t subsample_seed = rng.next_u64();

  PointTargets targets;
  targets.labels.resize(cfg.n_points);
  targets.labeled.resize(cfg.n_points);
  for (int i = 0; i < cfg.n_points; ++i) {
    targets.labels[i] = static_cast<int>(rng.uniform_int(cfg.n_cls));
    targets.labeled[i] = targets.labels[i] > 0;
  }
  targets.center_offsets = rand_tensor(rng, cfg.n_points, 3, -0.1, 0.1);
  targets.keypoint_offsets = rand_tensor(rng, cfg.n_points, 3 * cfg.n_keypoints, -0.1, 0.1);

  const LossWeights weights;
  const auto loss_value = [&](int* node_out, Graph* g_out,
                              std::map<std::string, int>* nodes_out) {
    Graph local;
    Graph& g = g_out ? *g_out : local;
    const ForwardResult fr = forward(g, frame, pts, cfg, params, subsample_seed);
    const LossNodes ln = multi_task_loss(g, fr, targets, weights);
    if (node_out) *node_out = ln.total;
    if (nodes_out) *nodes_out = fr.param_nodes;
    return g.value(ln.total).data[0];
  };

  Graph g;
  int total = -1;
  std::map<std::string, int> param_nodes;
  loss_value(&total, &g, &param_nodes);
  g.backward(total);

  const std::vector<std::string> names = params.names();
  constexpr double h = 1e-6;
  double worst = 0;
  for (int probe = 0; probe < 20; ++probe) {
    const std::string& name = names[rng.uniform_int(names.size())];
    Tensor& t = params.get(name);
    const int off = static_cast<int>(rng.uniform_int(t.numel()));
    const double analytic = g.grad(param_nodes.at(name)).data[off];
    const double saved = t.data[off];
    t.data[off] = saved + h;
    const double above = loss_value(nullptr, nullptr, nullptr);
    t.data[off] = saved - h;
    const double below = loss_value(nullptr, nullptr, nullptr);
    t.data[off] = saved;
    const double numeric = (above - below) / (2.0 * h);
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-4});
    worst = std::max(worst, std::abs(analytic - numeric) / denom);
  }
  return worst;
}

}  // namespace

GradCheckSummary run_gradcheck_suite(uint64_t seed) {
  Rng rng(seed);
  GradCheckSummary summary;
  summary.per_op_max = per_op_probes(rng);
  summary.end_to_end_max = end_to_end_probe(rng);
  return summary;
}

}  // namespace pose6d
