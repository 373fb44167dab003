#pragma once

#include <vector>

#include "pose6d/core/types.hpp"

namespace pose6d {

struct MeanShiftResult {
  Points modes;                 // one row per merged mode, founder order
  std::vector<int> assignment;  // sample -> mode row
  std::vector<int> support;     // samples assigned to each mode
};

/// Gaussian-kernel mean shift started from every sample. Each trajectory runs
/// until the shift drops below `tol` or `max_iter` is reached; converged
/// positions within bandwidth/2 of an earlier mode are merged into it (the
/// earlier founder's position is kept, so reported modes remain fixed points
/// of the iteration within tol).
MeanShiftResult mean_shift(const Points& samples, double bandwidth,
                           double tol = 1e-5, int max_iter = 100);

}  // namespace pose6d
