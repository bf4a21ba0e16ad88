#pragma once

#include <functional>

namespace topopump {

/// Worker count: TOPOPUMP_THREADS if set to a positive integer, else all hardware threads.
int thread_count();

/// Runs body(i) for i in [0, n). Each index is processed exactly once; callers write
/// results into per-index slots so output does not depend on scheduling. The first
/// exception thrown by any worker is rethrown on the calling thread.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace topopump
