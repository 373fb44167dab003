#include "pose6d/net/model.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "pose6d/core/camera.hpp"
#include "pose6d/core/error.hpp"
#include "pose6d/core/knn.hpp"
#include "pose6d/core/rng.hpp"
#include "pose6d/core/subsample.hpp"

namespace pose6d {

namespace {

constexpr int kCr = 8;  // CNN widths: encode [8, 16], decode [16, 8]
constexpr int kCrMid = 16;
constexpr int kCp = 8;  // point branch mirrors the CNN widths
constexpr int kCpMid = 16;
constexpr int kHead = 128;

std::vector<int> im2col_indices(int h, int w, int stride, int& ho, int& wo) {
  ho = (h - 1) / stride + 1;
  wo = (w - 1) / stride + 1;
  std::vector<int> idx;
  idx.reserve(static_cast<size_t>(ho) * wo * 9);
  for (int r = 0; r < ho; ++r) {
    for (int c = 0; c < wo; ++c) {
      for (int kr = -1; kr <= 1; ++kr) {
        for (int kc = -1; kc <= 1; ++kc) {
          const int rr = r * stride + kr, cc = c * stride + kc;
          idx.push_back(rr < 0 || rr >= h || cc < 0 || cc >= w ? -1 : rr * w + cc);
        }
      }
    }
  }
  return idx;
}

/// 3x3 convolution with zero padding 1, expressed as an im2col gather
/// (out-of-image taps read zero rows) followed by one linear op. Weight rows
/// are laid out (kr * 3 + kc) * cin + ci.
int conv3x3(Graph& g, int x, int h, int w, int stride, int wn, int bn, int& ho,
            int& wo) {
  const int cin = g.value(x).cols();
  const int cols = g.gather_rows_zero(x, im2col_indices(h, w, stride, ho, wo));
  const int folded = g.reshape(cols, {ho * wo, 9 * cin});
  return g.linear(folded, wn, bn);
}

std::vector<int> upsample2_indices(int ho, int wo, int hs, int ws) {
  std::vector<int> idx(static_cast<size_t>(ho) * wo);
  for (int r = 0; r < ho; ++r)
    for (int c = 0; c < wo; ++c)
      idx[r * wo + c] = std::min(r / 2, hs - 1) * ws + std::min(c / 2, ws - 1);
  return idx;
}

/// One point-branch encode stage: per point, gather the k nearest point
/// features, append each neighbor's offset from the query, map through a
/// shared linear layer, columnwise-max over the neighborhood, ReLU.
int lfa_stage(Graph& g, int feat, const Points& xyz, int k, int wn, int bn) {
  const int n = static_cast<int>(xyz.rows());
  const int kk = std::min(k, n);
  const IndexMatrix nn = knn(xyz, xyz, kk);
  std::vector<int> rows(static_cast<size_t>(n) * kk);
  Tensor rel = Tensor::zeros({n * kk, 3});
  IndexMatrix groups(n, kk);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < kk; ++j) {
      rows[i * kk + j] = nn(i, j);
      rel.matrix().row(i * kk + j) = xyz.row(nn(i, j)) - xyz.row(i);
      groups(i, j) = i * kk + j;
    }
  }
  const int gathered = g.gather_rows(feat, std::move(rows));
  const int cat = g.concat_cols(gathered, g.input(std::move(rel)));
  const int mapped = g.linear(cat, wn, bn);
  return g.relu(g.gather_max(mapped, groups));
}

/// Lazily turns named parameters into graph leaves, each at most once.
struct ParamNodes {
  Graph& g;
  const ParamStore& params;
  std::map<std::string, int> ids;

  int operator()(const std::string& name) {
    auto it = ids.find(name);
    if (it != ids.end()) return it->second;
    const int id = g.param(params.get(name));
    ids.emplace(name, id);
    return id;
  }

  FuseBlockNodes block(const std::string& prefix) {
    FuseBlockNodes blk;
    blk.squeeze_w = (*this)(prefix + ".squeeze.w");
    blk.squeeze_b = (*this)(prefix + ".squeeze.b");
    blk.fuse_w = (*this)(prefix + ".fuse.w");
    blk.fuse_b = (*this)(prefix + ".fuse.b");
    return blk;
  }
};

struct NetBuild {
  int cnn_final = -1;
  int pcn_final = -1;
  std::vector<int> cnn_pre, pcn_pre;
  std::map<std::string, int> param_nodes;
};

/// Stage-interleaved construction of one or both branches. A disabled
/// direction (or a missing opposite branch) skips the fusion ops entirely, so
/// the surviving branch executes exactly the op sequence it would run alone —
/// toggling fusion flags never perturbs non-fused values.
NetBuild build_network(Graph& g, const RgbdFrame* frame, const SampledPoints* pts,
                       const FusionConfig& cfg, const ParamStore& params,
                       uint64_t subsample_seed, bool with_cnn, bool with_pcn) {
  cfg.validate();
  if (!with_cnn && !with_pcn)
    throw InvalidArgumentError("network needs at least one branch");
  ParamNodes pn{g, params, {}};
  NetBuild net;

  // --- image input and per-stage lifted maps -------------------------
  int h0 = 0, w0 = 0, rgb0 = -1;
  XyzMap map_full, map_s2, map_s4;
  if (with_cnn) {
    frame->validate();
    h0 = frame->height();
    w0 = frame->width();
    if (h0 > 64 || w0 > 64)
      throw InvalidArgumentError("image exceeds the 64x64 network limit");
    Tensor rgb = Tensor::zeros({h0 * w0, 3});
    for (int v = 0; v < h0; ++v) {
      for (int u = 0; u < w0; ++u) {
        rgb.at(v * w0 + u, 0) = frame->red(v, u);
        rgb.at(v * w0 + u, 1) = frame->green(v, u);
        rgb.at(v * w0 + u, 2) = frame->blue(v, u);
      }
    }
    rgb0 = g.input(std::move(rgb));
    map_full = lift_depth(*frame);
    map_s2 = downsample_xyz(map_full, 2, cfg.downsample_mode);
    map_s4 = downsample_xyz(map_full, 4, cfg.downsample_mode);
  }

  // --- point input, decimation subsets, upsample gathers -------------
  int feats0 = -1;
  Points xyz0, xyz1, xyz2;
  std::vector<int> s1, s2, up01, up12;
  if (with_pcn) {
    const int n = pts->cloud.size();
    if (n != cfg.n_points)
      throw InvalidArgumentError("sampled point count differs from n_points");
    if (static_cast<int>(pts->flat_indices.size()) != n)
      throw InvalidArgumentError("flat index count differs from point count");
    if (!pts->cloud.has_colors() || !pts->cloud.has_normals())
      throw InvalidArgumentError("point branch input needs colors and normals");
    Tensor f = Tensor::zeros({n, 9});
    f.matrix().leftCols(3) = pts->cloud.points;
    f.matrix().middleCols(3, 3) = pts->cloud.colors;
    f.matrix().rightCols(3) = pts->cloud.normals;
    feats0 = g.input(std::move(f));
    xyz0 = pts->cloud.points;

    Rng srng(subsample_seed);
    const int n1 = std::max(1, n / 4);
    s1 = subsample_indices(n, n1, srng.next_u64());
    xyz1.resize(n1, 3);
    for (int i = 0; i < n1; ++i) xyz1.row(i) = xyz0.row(s1[i]);
    const int n2 = std::max(1, n1 / 4);
    s2 = subsample_indices(n1, n2, srng.next_u64());
    xyz2.resize(n2, 3);
    for (int i = 0; i < n2; ++i) xyz2.row(i) = xyz1.row(s2[i]);

    const IndexMatrix nn01 = knn(xyz0, xyz1, 1);
    up01.resize(n);
    for (int i = 0; i < n; ++i) up01[i] = nn01(i, 0);
    const IndexMatrix nn12 = knn(xyz1, xyz2, 1);
    up12.resize(n1);
    for (int i = 0; i < n1; ++i) up12[i] = nn12(i, 0);
  }

  const bool both = with_cnn && with_pcn;
  const bool fuse_enc = both && cfg.enable_encode_fusion;
  const bool fuse_dec = both && cfg.enable_decode_fusion;
  const bool fuse_df = both && cfg.enable_final_dense_fusion;

  // ---- stage 1 (encode, image stride 2 / points 4x decimate) --------
  int h1 = 0, w1 = 0, a1 = -1, p1 = -1;
  if (with_cnn) {
    a1 = g.relu(conv3x3(g, rgb0, h0, w0, 2, pn("cnn.enc1.w"), pn("cnn.enc1.b"), h1, w1));
    net.cnn_pre.push_back(a1);
  }
  if (with_pcn) {
    const int l1 = lfa_stage(g, feats0, xyz0, cfg.lfa_k, pn("pcn.enc1.w"), pn("pcn.enc1.b"));
    p1 = g.gather_rows(l1, s1);
    net.pcn_pre.push_back(p1);
  }
  int a1f = a1, p1f = p1;
  if (fuse_enc && cfg.enable_p2r)
    a1f = point_to_pixel_fuse(g, p1, xyz1, a1, map_s2, cfg.k_p2r, pn.block("fuse0.p2r"));
  if (fuse_enc && cfg.enable_r2p)
    p1f = pixel_to_point_fuse(g, a1, map_s2, p1, xyz1, cfg.k_r2p, pn.block("fuse0.r2p"));

  // ---- stage 2 (encode) ---------------------------------------------
  int h2 = 0, w2 = 0, a2 = -1, p2 = -1;
  if (with_cnn) {
    a2 = g.relu(conv3x3(g, a1f, h1, w1, 2, pn("cnn.enc2.w"), pn("cnn.enc2.b"), h2, w2));
    net.cnn_pre.push_back(a2);
  }
  if (with_pcn) {
    const int l2 = lfa_stage(g, p1f, xyz1, cfg.lfa_k, pn("pcn.enc2.w"), pn("pcn.enc2.b"));
    p2 = g.gather_rows(l2, s2);
    net.pcn_pre.push_back(p2);
  }
  int a2f = a2, p2f = p2;
  if (fuse_enc && cfg.enable_p2r)
    a2f = point_to_pixel_fuse(g, p2, xyz2, a2, map_s4, cfg.k_p2r, pn.block("fuse1.p2r"));
  if (fuse_enc && cfg.enable_r2p)
    p2f = pixel_to_point_fuse(g, a2, map_s4, p2, xyz2, cfg.k_r2p, pn.block("fuse1.r2p"));

  // ---- stage 3 (decode back to half / quarter-count resolution) -----
  int d1 = -1, q1 = -1;
  if (with_cnn) {
    int th = 0, tw = 0;
    const int u1 = g.gather_rows(a2f, upsample2_indices(h1, w1, h2, w2));
    d1 = g.relu(conv3x3(g, u1, h1, w1, 1, pn("cnn.dec1.w"), pn("cnn.dec1.b"), th, tw));
    net.cnn_pre.push_back(d1);
  }
  if (with_pcn) {
    const int uq1 = g.gather_rows(p2f, up12);
    q1 = g.relu(g.linear(uq1, pn("pcn.dec1.w"), pn("pcn.dec1.b")));
    net.pcn_pre.push_back(q1);
  }
  int d1f = d1, q1f = q1;
  if (fuse_dec && cfg.enable_p2r)
    d1f = point_to_pixel_fuse(g, q1, xyz1, d1, map_s2, cfg.k_p2r, pn.block("fuse2.p2r"));
  if (fuse_dec && cfg.enable_r2p)
    q1f = pixel_to_point_fuse(g, d1, map_s2, q1, xyz1, cfg.k_r2p, pn.block("fuse2.r2p"));

  // ---- stage 4 (decode to full resolution) --------------------------
  int d2 = -1, q2 = -1;
  if (with_cnn) {
    int th = 0, tw = 0;
    const int u2 = g.gather_rows(d1f, upsample2_indices(h0, w0, h1, w1));
    d2 = g.relu(conv3x3(g, u2, h0, w0, 1, pn("cnn.dec2.w"), pn("cnn.dec2.b"), th, tw));
    net.cnn_pre.push_back(d2);
  }
  if (with_pcn) {
    const int uq2 = g.gather_rows(q1f, up01);
    q2 = g.relu(g.linear(uq2, pn("pcn.dec2.w"), pn("pcn.dec2.b")));
    net.pcn_pre.push_back(q2);
  }
  int d2f = d2, q2f = q2;
  if (fuse_dec && cfg.enable_p2r)
    d2f = point_to_pixel_fuse(g, q2, xyz0, d2, map_full, cfg.k_p2r, pn.block("fuse3.p2r"));
  if (fuse_dec && cfg.enable_r2p)
    q2f = pixel_to_point_fuse(g, d2, map_full, q2, xyz0, cfg.k_r2p, pn.block("fuse3.r2p"));

  // ---- final dense fusion at full resolution ------------------------
  net.cnn_final = d2f;
  net.pcn_final = q2f;
  if (fuse_df && cfg.enable_p2r)
    net.cnn_final = point_to_pixel_fuse(g, q2f, xyz0, d2f, map_full, cfg.k_p2r,
                                        pn.block("fuse4.p2r"));
  if (fuse_df && cfg.enable_r2p)
    net.pcn_final = pixel_to_point_fuse(g, d2f, map_full, q2f, xyz0, cfg.k_r2p,
                                        pn.block("fuse4.r2p"));

  net.param_nodes = std::move(pn.ids);
  return net;
}

int head_mlp(Graph& g, ParamNodes& pn, int x, const std::string& name) {
  int cur = x;
  for (int layer = 0; layer < 3; ++layer) {
    const std::string p = name + "." + std::to_string(layer);
    cur = g.relu(g.linear(cur, pn(p + ".w"), pn(p + ".b")));
  }
  return g.linear(cur, pn(name + ".3.w"), pn(name + ".3.b"));
}

}  // namespace

Points estimate_normals(const Points& pts, int k) {
  const int n = static_cast<int>(pts.rows());
  Points normals(n, 3);
  if (n == 0) return normals;
  const int kk = std::min(k, n);
  const IndexMatrix nn = knn(pts, pts, kk);
  for (int i = 0; i < n; ++i) {
    Vec3 mean = Vec3::Zero();
    for (int j = 0; j < kk; ++j) mean += pts.row(nn(i, j)).transpose();
    mean /= kk;
    Mat3 cov = Mat3::Zero();
    for (int j = 0; j < kk; ++j) {
      const Vec3 d = pts.row(nn(i, j)).transpose() - mean;
      cov += d * d.transpose();
    }
    Vec3 normal(0, 0, -1);  // camera-facing fallback for degenerate patches
    if (kk >= 3 && cov.norm() > 0.0) {
      const Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
      normal = eig.eigenvectors().col(0);
    }
    if (normal.dot(pts.row(i).transpose()) > 0) normal = -normal;
    normals.row(i) = normal.transpose();
  }
  return normals;
}

SampledPoints sample_scene_points(const RgbdFrame& frame, int n, uint64_t seed) {
  frame.validate();
  std::vector<int> valid;
  Points coords;
  lift_depth(frame).collect_valid(valid, coords);
  if (n < 1 || n > static_cast<int>(valid.size()))
    throw InvalidArgumentError("sample_scene_points: need 1 <= n <= valid pixel count");
  const std::vector<int> picks =
      subsample_indices(static_cast<int>(valid.size()), n, seed);
  SampledPoints out;
  out.cloud.points.resize(n, 3);
  out.cloud.colors.resize(n, 3);
  out.flat_indices.resize(n);
  const int w = frame.width();
  for (int i = 0; i < n; ++i) {
    const int flat = valid[picks[i]];
    out.flat_indices[i] = flat;
    out.cloud.points.row(i) = coords.row(picks[i]);
    const int v = flat / w, u = flat % w;
    out.cloud.colors.row(i) << frame.red(v, u), frame.green(v, u), frame.blue(v, u);
  }
  out.cloud.normals = estimate_normals(out.cloud.points);
  return out;
}

ParamStore init_params(const FusionConfig& cfg, uint64_t seed) {
  cfg.validate();
  ParamStore store;
  Rng rng(seed);
  store.init_linear("cnn.enc1", 9 * 3, kCr, rng);
  store.init_linear("cnn.enc2", 9 * kCr, kCrMid, rng);
  store.init_linear("cnn.dec1", 9 * kCrMid, kCrMid, rng);
  store.init_linear("cnn.dec2", 9 * kCrMid, kCr, rng);
  store.init_linear("pcn.enc1", 9 + 3, kCp, rng);
  store.init_linear("pcn.enc2", kCp + 3, kCpMid, rng);
  store.init_linear("pcn.dec1", kCpMid, kCpMid, rng);
  store.init_linear("pcn.dec2", kCpMid, kCp, rng);
  const int cr[5] = {kCr, kCrMid, kCrMid, kCr, kCr};
  const int cp[5] = {kCp, kCpMid, kCpMid, kCp, kCp};
  for (int st = 0; st < 5; ++st) {
    const std::string p = "fuse" + std::to_string(st);
    store.init_linear(p + ".r2p.squeeze", cr[st], cp[st], rng);
    store.init_linear(p + ".r2p.fuse", 2 * cp[st], cp[st], rng);
    store.init_linear(p + ".p2r.squeeze", cp[st], cr[st], rng);
    store.init_linear(p + ".p2r.fuse", 2 * cr[st], cr[st], rng);
  }
  const int fused_width = kCr + kCp;
  const struct {
    const char* name;
    int out;
  } heads[3] = {{"head.sem", cfg.n_cls}, {"head.ctr", 3}, {"head.kp", 3 * cfg.n_keypoints}};
  for (const auto& hd : heads) {
    store.init_linear(std::string(hd.name) + ".0", fused_width, kHead, rng);
    store.init_linear(std::string(hd.name) + ".1", kHead, kHead, rng);
    store.init_linear(std::string(hd.name) + ".2", kHead, kHead, rng);
    store.init_linear(std::string(hd.name) + ".3", kHead, hd.out, rng);
  }
  return store;
}

ForwardResult forward(Graph& g, const RgbdFrame& frame, const SampledPoints& pts,
                      const FusionConfig& cfg, const ParamStore& params,
                      uint64_t subsample_seed) {
  NetBuild net = build_network(g, &frame, &pts, cfg, params, subsample_seed,
                               /*with_cnn=*/true, /*with_pcn=*/true);
  ParamNodes pn{g, params, std::move(net.param_nodes)};

  // Projection correspondence: each sampled point reads the CNN feature of
  // the pixel it was lifted from, then both modalities feed the heads.
  const int rgb_at_points = g.gather_rows(net.cnn_final, pts.flat_indices);
  const int fused = g.concat_cols(rgb_at_points, net.pcn_final);

  ForwardResult out;
  out.logits = head_mlp(g, pn, fused, "head.sem");
  out.centers = head_mlp(g, pn, fused, "head.ctr");
  out.keypoints = head_mlp(g, pn, fused, "head.kp");
  out.fused = fused;
  out.cnn_pre_fusion = net.cnn_pre;
  out.pcn_pre_fusion = net.pcn_pre;
  out.param_nodes = std::move(pn.ids);

  out.output.semantic_logits = g.value(out.logits);
  out.output.center_offsets = g.value(out.centers);
  out.output.keypoint_offsets = g.value(out.keypoints);
  out.output.fused_features = g.value(fused);
  for (int id : out.cnn_pre_fusion) out.output.cnn_stage_activations.push_back(g.value(id));
  for (int id : out.pcn_pre_fusion) out.output.pcn_stage_activations.push_back(g.value(id));
  return out;
}

Tensor run_cnn_branch(const RgbdFrame& frame, const FusionConfig& cfg,
                      const ParamStore& params) {
  Graph g;
  const NetBuild net = build_network(g, &frame, nullptr, cfg, params, 0,
                                     /*with_cnn=*/true, /*with_pcn=*/false);
  return g.value(net.cnn_final);
}

Tensor run_pcn_branch(const SampledPoints& pts, const FusionConfig& cfg,
                      const ParamStore& params, uint64_t subsample_seed) {
  Graph g;
  const NetBuild net = build_network(g, nullptr, &pts, cfg, params, subsample_seed,
                                     /*with_cnn=*/false, /*with_pcn=*/true);
  return g.value(net.pcn_final);
}

}  // namespace pose6d
