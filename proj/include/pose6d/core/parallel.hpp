#pragma once

#include <functional>

namespace pose6d {

/// Worker count: POSE6D_THREADS caps parallelism, 0 or unset means auto
/// (hardware concurrency).
int worker_count();

/// Run fn(i) for i in [0, n) across worker_count() threads. Each index is
/// processed exactly once; callers must write only to per-index slots so the
/// result is independent of scheduling.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace pose6d
