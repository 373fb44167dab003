#pragma once

#include <string>

#include "pose6d/core/types.hpp"
#include "pose6d/net/graph.hpp"

namespace pose6d {

enum class DownsampleMode { kNearest, kMeanKernel };

struct FusionConfig {
  bool enable_encode_fusion = true;
  bool enable_decode_fusion = true;
  bool enable_final_dense_fusion = true;
  bool enable_p2r = true;
  bool enable_r2p = true;
  int k_r2p = 16;
  int k_p2r = 1;
  DownsampleMode downsample_mode = DownsampleMode::kNearest;
  int n_points = 256;   // sampled point count N (toy scale, <= 512)
  int n_cls = 3;        // semantic classes including background
  int n_keypoints = 8;  // K
  int lfa_k = 8;        // point-branch local aggregation neighborhood

  void validate() const {
    if (k_r2p < 1 || k_p2r < 1)
      throw InvalidArgumentError("fusion config: neighbor counts must be >= 1");
    if (n_points < 1 || n_points > 512)
      throw InvalidArgumentError("fusion config: n_points must be in [1, 512]");
    if (n_cls < 2) throw InvalidArgumentError("fusion config: need >= 2 classes");
    if (n_keypoints < 1) throw InvalidArgumentError("fusion config: need >= 1 keypoint");
    if (lfa_k < 1) throw InvalidArgumentError("fusion config: lfa_k must be >= 1");
  }
};

/// Reduce an XYZ map by stride. Nearest mode keeps the first (row-major)
/// valid source pixel of each stride x stride cell, so every output
/// coordinate is a member of the input; mean-kernel averages the valid
/// members and can emit coordinates lying on no surface. Border cells are
/// clipped to the image (edge padding). Output mask is any-valid.
XyzMap downsample_xyz(const XyzMap& map, int stride, DownsampleMode mode);

/// Graph node ids of one fusion block's parameters.
struct FuseBlockNodes {
  int squeeze_w = -1, squeeze_b = -1;
  int fuse_w = -1, fuse_b = -1;
};

/// Pixel-to-point direction: per point, gather the k_r2p nearest valid map
/// pixels (3D distance), columnwise-max their RGB features, squeeze to C_p,
/// concat [F_point, F_r2p], fuse back to C_p. Max precedes the MLP in this
/// direction.
int pixel_to_point_fuse(Graph& g, int rgb_feat, const XyzMap& map_ds,
                        int point_feat, const Points& point_xyz, int k_r2p,
                        const FuseBlockNodes& blk);

/// Point-to-pixel direction: squeeze every point feature to C_r first, then
/// per valid pixel gather-max its k_p2r nearest points, concat [F_rgb,
/// F_p2r], fuse back to C_r. Invalid pixels pass F_rgb through unchanged.
/// The MLP precedes the max here — the reverse of pixel_to_point_fuse.
int point_to_pixel_fuse(Graph& g, int point_feat, const Points& point_xyz,
                        int rgb_feat, const XyzMap& map_ds, int k_p2r,
                        const FuseBlockNodes& blk);

}  // namespace pose6d
