#include "pose6d/voting/mean_shift.hpp"

#include <cmath>

#include "pose6d/core/error.hpp"
#include "pose6d/core/parallel.hpp"

namespace pose6d {

MeanShiftResult mean_shift(const Points& samples, double bandwidth, double tol,
                           int max_iter) {
  const int m = static_cast<int>(samples.rows());
  if (m < 1) throw InvalidArgumentError("mean_shift: need at least one sample");
  if (!(bandwidth > 0.0)) throw InvalidArgumentError("mean_shift: bandwidth must be positive");
  if (!samples.allFinite()) throw InvalidArgumentError("mean_shift: non-finite samples");

  const double inv_two_bw2 = 1.0 / (2.0 * bandwidth * bandwidth);
  Points converged(m, 3);
  parallel_for(m, [&](int i) {
    Eigen::RowVector3d x = samples.row(i);
    for (int iter = 0; iter < max_iter; ++iter) {
      const VecX d2 = (samples.rowwise() - x).rowwise().squaredNorm();
      const VecX w = (-d2 * inv_two_bw2).array().exp();
      const Eigen::RowVector3d next = (w.transpose() * samples) / w.sum();
      const double shift = (next - x).norm();
      x = next;
      if (shift < tol) break;
    }
    converged.row(i) = x;
  });

  MeanShiftResult out;
  out.assignment.resize(m);
  std::vector<Eigen::RowVector3d> modes;
  const double merge2 = (bandwidth / 2.0) * (bandwidth / 2.0);
  for (int i = 0; i < m; ++i) {
    int found = -1;
    for (int j = 0; j < static_cast<int>(modes.size()); ++j) {
      if ((converged.row(i) - modes[j]).squaredNorm() < merge2) {
        found = j;
        break;
      }
    }
    if (found < 0) {
      found = static_cast<int>(modes.size());
      modes.push_back(converged.row(i));
      out.support.push_back(0);
    }
    out.assignment[i] = found;
    ++out.support[found];
  }
  out.modes.resize(static_cast<int>(modes.size()), 3);
  for (int j = 0; j < out.modes.rows(); ++j) out.modes.row(j) = modes[j];
  return out;
}

}  // namespace pose6d
