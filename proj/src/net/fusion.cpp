#include "pose6d/net/fusion.hpp"

#include "pose6d/core/error.hpp"
#include "pose6d/core/knn.hpp"

namespace pose6d {

XyzMap downsample_xyz(const XyzMap& map, int stride, DownsampleMode mode) {
  if (stride < 1) throw InvalidArgumentError("downsample_xyz: stride must be >= 1");
  const int h = map.height(), w = map.width();
  const int ho = (h + stride - 1) / stride, wo = (w + stride - 1) / stride;
  XyzMap out;
  out.x = ImagePlane::Zero(ho, wo);
  out.y = ImagePlane::Zero(ho, wo);
  out.z = ImagePlane::Zero(ho, wo);
  out.valid = MaskPlane::Constant(ho, wo, false);
  for (int r = 0; r < ho; ++r) {
    for (int c = 0; c < wo; ++c) {
      const int r0 = r * stride, c0 = c * stride;
      const int r1 = std::min(r0 + stride, h), c1 = std::min(c0 + stride, w);
      if (mode == DownsampleMode::kNearest) {
        for (int rr = r0; rr < r1 && !out.valid(r, c); ++rr) {
          for (int cc = c0; cc < c1; ++cc) {
            if (map.valid(rr, cc)) {
              out.x(r, c) = map.x(rr, cc);
              out.y(r, c) = map.y(rr, cc);
              out.z(r, c) = map.z(rr, cc);
              out.valid(r, c) = true;
              break;
            }
          }
        }
      } else {
        double sx = 0, sy = 0, sz = 0;
        int count = 0;
        for (int rr = r0; rr < r1; ++rr) {
          for (int cc = c0; cc < c1; ++cc) {
            if (!map.valid(rr, cc)) continue;
            sx += map.x(rr, cc);
            sy += map.y(rr, cc);
            sz += map.z(rr, cc);
            ++count;
          }
        }
        if (count > 0) {
          out.x(r, c) = sx / count;
          out.y(r, c) = sy / count;
          out.z(r, c) = sz / count;
          out.valid(r, c) = true;
        }
      }
    }
  }
  return out;
}

namespace {

void collect_valid_pixels(const XyzMap& map, std::vector<int>& flat, Points& coords) {
  map.collect_valid(flat, coords);
}

}  // namespace

int pixel_to_point_fuse(Graph& g, int rgb_feat, const XyzMap& map_ds,
                        int point_feat, const Points& point_xyz, int k_r2p,
                        const FuseBlockNodes& blk) {
  const Tensor& rv = g.value(rgb_feat);
  if (rv.rank() != 2 || rv.rows() != map_ds.height() * map_ds.width())
    throw InvalidArgumentError("pixel_to_point_fuse: rgb feature/map size mismatch");
  if (g.value(point_feat).rows() != point_xyz.rows())
    throw InvalidArgumentError("pixel_to_point_fuse: point feature/xyz mismatch");
  std::vector<int> flat;
  Points coords;
  collect_valid_pixels(map_ds, flat, coords);
  if (static_cast<int>(flat.size()) < k_r2p)
    throw InvalidArgumentError("pixel_to_point_fuse: fewer valid pixels than k_r2p");

  IndexMatrix nn = knn(point_xyz, coords, k_r2p);
  for (int i = 0; i < nn.rows(); ++i)
    for (int k = 0; k < nn.cols(); ++k) nn(i, k) = flat[nn(i, k)];

  const int max_feat = g.gather_max(rgb_feat, nn);
  const int r2p = g.linear(max_feat, blk.squeeze_w, blk.squeeze_b);
  const int cat = g.concat_cols(point_feat, r2p);
  return g.linear(cat, blk.fuse_w, blk.fuse_b);
}

int point_to_pixel_fuse(Graph& g, int point_feat, const Points& point_xyz,
                        int rgb_feat, const XyzMap& map_ds, int k_p2r,
                        const FuseBlockNodes& blk) {
  if (point_xyz.rows() == 0)
    throw InvalidArgumentError("point_to_pixel_fuse: empty point cloud");
  if (point_xyz.rows() < k_p2r)
    throw InvalidArgumentError("point_to_pixel_fuse: fewer points than k_p2r");
  const Tensor& rv = g.value(rgb_feat);
  if (rv.rank() != 2 || rv.rows() != map_ds.height() * map_ds.width())
    throw InvalidArgumentError("point_to_pixel_fuse: rgb feature/map size mismatch");

  std::vector<int> flat;
  Points coords;
  collect_valid_pixels(map_ds, flat, coords);
  if (flat.empty()) return rgb_feat;  // nothing to fuse into

  const int squeezed = g.linear(point_feat, blk.squeeze_w, blk.squeeze_b);
  const IndexMatrix nn = knn(coords, point_xyz, k_p2r);
  const int p2r = g.gather_max(squeezed, nn);
  const int rgb_valid = g.gather_rows(rgb_feat, flat);
  const int cat = g.concat_cols(rgb_valid, p2r);
  const int fused = g.linear(cat, blk.fuse_w, blk.fuse_b);
  return g.overwrite_rows(rgb_feat, flat, fused);
}

}  // namespace pose6d
