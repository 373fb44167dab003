#pragma once

#include <map>
#include <string>
#include <vector>

#include "pose6d/core/types.hpp"
#include "pose6d/net/fusion.hpp"
#include "pose6d/net/params.hpp"

namespace pose6d {

/// Point-branch input: N lifted pixels with colors and estimated normals
/// (x-y-z-R-G-B-nx-ny-nz), plus each point's source pixel for the final
/// projection-correspondence gather.
struct SampledPoints {
  PointCloud cloud;
  std::vector<int> flat_indices;  // v * width + u per point
};

/// Local-PCA normals over k neighbors, oriented toward the camera origin.
Points estimate_normals(const Points& pts, int k = 8);

/// Seeded draw of n valid-depth pixels, lifted and annotated.
SampledPoints sample_scene_points(const RgbdFrame& frame, int n, uint64_t seed);

struct NetworkOutput {
  Tensor semantic_logits;   // N x n_cls
  Tensor center_offsets;    // N x 3
  Tensor keypoint_offsets;  // N x (K*3)
  Tensor fused_features;    // N x (C_r + C_p), the head input
  std::vector<Tensor> cnn_stage_activations;  // pre-fusion, stages in order
  std::vector<Tensor> pcn_stage_activations;
};

/// Node handles into the graph a forward pass built, for loss construction
/// and gradient readback.
struct ForwardResult {
  int logits = -1;
  int centers = -1;
  int keypoints = -1;
  int fused = -1;
  std::vector<int> cnn_pre_fusion;
  std::vector<int> pcn_pre_fusion;
  std::map<std::string, int> param_nodes;
  NetworkOutput output;
};

/// All trainable tensors for the given config, uniform ±1/sqrt(fan_in).
/// Every fusion block is always allocated so configs differing only in
/// enable flags share one parameter set.
ParamStore init_params(const FusionConfig& cfg, uint64_t seed);

/// Full network: CNN branch (2 strided encode convs + 2 upsample decode
/// convs), point branch (2 LFA encode stages with seeded 4x decimation + 2
/// nearest-upsample decode MLPs), bidirectional fusion at every enabled
/// stage, final per-point concat of both modalities, three prediction heads.
/// Image must be at most 64x64; pts must hold cfg.n_points points.
ForwardResult forward(Graph& g, const RgbdFrame& frame, const SampledPoints& pts,
                      const FusionConfig& cfg, const ParamStore& params,
                      uint64_t subsample_seed);

/// The CNN branch alone (no fusion): final (H*W) x C_r features.
Tensor run_cnn_branch(const RgbdFrame& frame, const FusionConfig& cfg,
                      const ParamStore& params);

/// The point branch alone (no fusion): final N x C_p features.
Tensor run_pcn_branch(const SampledPoints& pts, const FusionConfig& cfg,
                      const ParamStore& params, uint64_t subsample_seed);

}  // namespace pose6d
