#pragma once

#include <functional>
#include <vector>

#include "pose6d/net/graph.hpp"

namespace pose6d {

/// Builds a fresh graph around the given leaf ids (one per input tensor, in
/// order) and returns the scalar output node.
using GraphBuilder = std::function<int(Graph&, const std::vector<int>&)>;

/// One scalar entry of one input tensor.
struct CoordRef {
  int input = 0;
  int offset = 0;
};

/// Worst relative disagreement between reverse-mode gradients and central
/// finite differences f(x+h) - f(x-h) over 2h, with the relative error
/// denominator floored at 1e-4. Checks the listed coordinates, or every
/// coordinate of every input when the list is empty. The builder runs once
/// per probe, so it must be deterministic.
double max_grad_rel_err(std::vector<Tensor> inputs, const GraphBuilder& build,
                        const std::vector<CoordRef>& coords = {}, double h = 1e-6);

struct GradCheckSummary {
  double per_op_max = 0;       // worst rel. err across the op-level probes
  double end_to_end_max = 0;   // worst rel. err over sampled network params
};

/// Seeded sweep: every graph op probed in isolation (scalarized through a
/// random rank-1 readout), then the full forward + multi-task loss on a tiny
/// synthetic frame, finite-differenced at 20 random parameter coordinates.
GradCheckSummary run_gradcheck_suite(uint64_t seed);

}  // namespace pose6d
