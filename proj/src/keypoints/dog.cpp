#include "pose6d/keypoints/dog.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "pose6d/core/error.hpp"

namespace pose6d {

namespace {

constexpr double kBaseSigma = 1.6;    // blur of pyramid level 0
constexpr double kAssumedBlur = 0.5;  // blur already present in the input
constexpr int kBorder = 5;            // extrema exclusion margin per octave
constexpr int kMaxRefineIters = 5;

ImagePlane blur_axis(const ImagePlane& img, const std::vector<double>& kernel,
                     bool horizontal) {
  const int radius = static_cast<int>(kernel.size()) / 2;
  const int h = static_cast<int>(img.rows());
  const int w = static_cast<int>(img.cols());
  ImagePlane out(h, w);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      double acc = 0.0;
      for (int t = -radius; t <= radius; ++t) {
        int vv = v, uu = u;
        if (horizontal) {
          uu = std::clamp(u + t, 0, w - 1);
        } else {
          vv = std::clamp(v + t, 0, h - 1);
        }
        acc += kernel[t + radius] * img(vv, uu);
      }
      out(v, u) = acc;
    }
  }
  return out;
}

}  // namespace

ImagePlane gaussian_blur(const ImagePlane& image, double sigma) {
  if (!(sigma > 0.0)) return image;
  const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int t = -radius; t <= radius; ++t) {
    kernel[t + radius] = std::exp(-0.5 * t * t / (sigma * sigma));
    sum += kernel[t + radius];
  }
  for (double& k : kernel) k /= sum;
  return blur_axis(blur_axis(image, kernel, true), kernel, false);
}

namespace {

struct RawDetection {
  double u, v, scale, response;
};

/// Refine one extremum by the usual iterative 3D quadratic fit. Returns false
/// if the fit diverges, leaves the valid region, or fails the contrast or
/// edge-ratio tests.
bool refine_extremum(const std::vector<ImagePlane>& dog, int layer, int r,
                     int c, const DogParams& params, int octave,
                     RawDetection* out) {
  const int h = static_cast<int>(dog[0].rows());
  const int w = static_cast<int>(dog[0].cols());
  const int max_layer = static_cast<int>(dog.size()) - 2;
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();
  Eigen::Vector3d grad = Eigen::Vector3d::Zero();

  for (int iter = 0;; ++iter) {
    const ImagePlane& d0 = dog[layer - 1];
    const ImagePlane& d1 = dog[layer];
    const ImagePlane& d2 = dog[layer + 1];

    grad << (d1(r, c + 1) - d1(r, c - 1)) / 2.0,
        (d1(r + 1, c) - d1(r - 1, c)) / 2.0, (d2(r, c) - d0(r, c)) / 2.0;

    Eigen::Matrix3d hess;
    const double dxx = d1(r, c + 1) + d1(r, c - 1) - 2.0 * d1(r, c);
    const double dyy = d1(r + 1, c) + d1(r - 1, c) - 2.0 * d1(r, c);
    const double dss = d2(r, c) + d0(r, c) - 2.0 * d1(r, c);
    const double dxy =
        (d1(r + 1, c + 1) - d1(r + 1, c - 1) - d1(r - 1, c + 1) + d1(r - 1, c - 1)) / 4.0;
    const double dxs = (d2(r, c + 1) - d2(r, c - 1) - d0(r, c + 1) + d0(r, c - 1)) / 4.0;
    const double dys = (d2(r + 1, c) - d2(r - 1, c) - d0(r + 1, c) + d0(r - 1, c)) / 4.0;
    hess << dxx, dxy, dxs, dxy, dyy, dys, dxs, dys, dss;

    const Eigen::FullPivLU<Eigen::Matrix3d> lu(hess);
    if (!lu.isInvertible()) return false;
    offset = lu.solve(-grad);

    if (std::abs(offset.x()) < 0.5 && std::abs(offset.y()) < 0.5 &&
        std::abs(offset.z()) < 0.5) {
      break;
    }
    if (iter + 1 >= kMaxRefineIters) return false;
    c += static_cast<int>(std::lround(std::clamp(offset.x(), -1.0, 1.0)));
    r += static_cast<int>(std::lround(std::clamp(offset.y(), -1.0, 1.0)));
    layer += static_cast<int>(std::lround(std::clamp(offset.z(), -1.0, 1.0)));
    if (layer < 1 || layer > max_layer || r < kBorder || r >= h - kBorder ||
        c < kBorder || c >= w - kBorder) {
      return false;
    }
  }

  const ImagePlane& d1 = dog[layer];
  const double peak = d1(r, c) + 0.5 * grad.dot(offset);
  if (std::abs(peak) < params.contrast_thresh) return false;

  // Principal-curvature (edge) test on the 2x2 spatial Hessian.
  const double dxx = d1(r, c + 1) + d1(r, c - 1) - 2.0 * d1(r, c);
  const double dyy = d1(r + 1, c) + d1(r - 1, c) - 2.0 * d1(r, c);
  const double dxy =
      (d1(r + 1, c + 1) - d1(r + 1, c - 1) - d1(r - 1, c + 1) + d1(r - 1, c - 1)) / 4.0;
  const double tr = dxx + dyy;
  const double det = dxx * dyy - dxy * dxy;
  const double ratio = params.edge_ratio;
  if (det <= 0.0 || tr * tr * ratio >= (ratio + 1.0) * (ratio + 1.0) * det) {
    return false;
  }

  const double cell = static_cast<double>(1 << octave);
  out->u = (c + offset.x()) * cell;
  out->v = (r + offset.y()) * cell;
  out->scale = kBaseSigma * cell *
               std::pow(2.0, (layer + offset.z()) / params.scales_per_octave);
  out->response = std::abs(peak);
  return true;
}

}  // namespace

std::vector<Keypoint2D> detect_dog_keypoints(const ImagePlane& image,
                                             const DogParams& params) {
  const int h = static_cast<int>(image.rows());
  const int w = static_cast<int>(image.cols());
  if (h < 16 || w < 16) {
    throw InvalidArgumentError("detect_dog_keypoints: image must be at least 16x16");
  }
  if (params.octaves < 1 || params.scales_per_octave < 1) {
    throw InvalidArgumentError("detect_dog_keypoints: counts must be positive");
  }
  if (!(params.contrast_thresh > 0.0) || !(params.edge_ratio >= 1.0)) {
    throw InvalidArgumentError("detect_dog_keypoints: bad filter thresholds");
  }

  const int s = params.scales_per_octave;
  const double k = std::pow(2.0, 1.0 / s);

  std::vector<RawDetection> raw;
  ImagePlane base = gaussian_blur(
      image, std::sqrt(std::max(0.01, kBaseSigma * kBaseSigma - kAssumedBlur * kAssumedBlur)));

  for (int octave = 0; octave < params.octaves; ++octave) {
    const int oh = static_cast<int>(base.rows());
    const int ow = static_cast<int>(base.cols());
    if (oh < 2 * kBorder + 3 || ow < 2 * kBorder + 3) break;

    // s + 3 progressively blurred levels; level i carries blur sigma0 * k^i.
    std::vector<ImagePlane> gauss;
    gauss.reserve(s + 3);
    gauss.push_back(base);
    for (int i = 1; i < s + 3; ++i) {
      const double prev = kBaseSigma * std::pow(k, i - 1);
      gauss.push_back(gaussian_blur(gauss.back(), prev * std::sqrt(k * k - 1.0)));
    }
    std::vector<ImagePlane> dog;
    dog.reserve(s + 2);
    for (int i = 0; i + 1 < static_cast<int>(gauss.size()); ++i) {
      dog.push_back(gauss[i + 1] - gauss[i]);
    }

    for (int layer = 1; layer <= s; ++layer) {
      const ImagePlane& d0 = dog[layer - 1];
      const ImagePlane& d1 = dog[layer];
      const ImagePlane& d2 = dog[layer + 1];
      for (int r = kBorder; r < oh - kBorder; ++r) {
        for (int c = kBorder; c < ow - kBorder; ++c) {
          const double val = d1(r, c);
          if (std::abs(val) <= 0.5 * params.contrast_thresh) continue;
          bool is_max = val > 0.0, is_min = val < 0.0;
          for (int dr = -1; dr <= 1 && (is_max || is_min); ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
              if (dr == 0 && dc == 0) {
                if (val <= d0(r, c) || val <= d2(r, c)) is_max = false;
                if (val >= d0(r, c) || val >= d2(r, c)) is_min = false;
              } else {
                const double lo = std::min({d0(r + dr, c + dc), d1(r + dr, c + dc),
                                            d2(r + dr, c + dc)});
                const double hi = std::max({d0(r + dr, c + dc), d1(r + dr, c + dc),
                                            d2(r + dr, c + dc)});
                if (val <= hi) is_max = false;
                if (val >= lo) is_min = false;
              }
            }
          }
          if (!is_max && !is_min) continue;
          RawDetection det;
          if (refine_extremum(dog, layer, r, c, params, octave, &det)) {
            if (det.u >= 0.0 && det.u < w && det.v >= 0.0 && det.v < h) {
              raw.push_back(det);
            }
          }
        }
      }
    }

    // Next octave: every other pixel of the level whose blur is 2 * sigma0.
    const ImagePlane& top = gauss[s];
    ImagePlane down((oh + 1) / 2, (ow + 1) / 2);
    for (int r = 0; r < down.rows(); ++r)
      for (int c = 0; c < down.cols(); ++c) down(r, c) = top(2 * r, 2 * c);
    base = down;
  }

  // The half-layer overlap between adjacent octaves can report the same blob
  // twice; keep only the strongest of near-coincident detections.
  std::stable_sort(raw.begin(), raw.end(), [](const RawDetection& a, const RawDetection& b) {
    if (a.response != b.response) return a.response > b.response;
    if (a.v != b.v) return a.v < b.v;
    if (a.u != b.u) return a.u < b.u;
    return a.scale < b.scale;
  });
  std::vector<Keypoint2D> out;
  for (const RawDetection& cand : raw) {
    bool duplicate = false;
    for (const Keypoint2D& kept : out) {
      const double du = cand.u - kept.u, dv = cand.v - kept.v;
      const double scale_ratio = std::max(cand.scale, kept.scale) /
                                 std::min(cand.scale, kept.scale);
      if (du * du + dv * dv < 1.5 * 1.5 && scale_ratio < 1.8) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) {
      out.push_back({cand.u, cand.v, cand.scale, cand.response});
    }
  }
  return out;
}

}  // namespace pose6d
