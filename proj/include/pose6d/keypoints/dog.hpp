#pragma once

#include <vector>

#include "pose6d/core/types.hpp"

namespace pose6d {

/// Scale-space blob detection result in sub-pixel image coordinates.
struct Keypoint2D {
  double u = 0.0;
  double v = 0.0;
  double scale = 0.0;     // Gaussian scale in input pixels
  double response = 0.0;  // |interpolated DoG extremum|
};

struct DogParams {
  int octaves = 3;
  int scales_per_octave = 3;
  double contrast_thresh = 0.03;  // on [0,1] intensities
  double edge_ratio = 10.0;       // max principal-curvature ratio
};

/// Separable Gaussian blur with replicate edge handling, radius ceil(4*sigma).
/// sigma <= 0 returns the input unchanged.
ImagePlane gaussian_blur(const ImagePlane& image, double sigma);

/// Difference-of-Gaussians keypoint detector (detection stage of SIFT only:
/// no orientations, no descriptors). Scale-space extrema over strict 3x3x3
/// neighborhoods, iterative quadratic sub-pixel refinement, contrast and
/// principal-curvature edge filtering, then suppression of near-coincident
/// detections across octaves (keep the strongest response).
std::vector<Keypoint2D> detect_dog_keypoints(const ImagePlane& image,
                                             const DogParams& params = {});

}  // namespace pose6d
