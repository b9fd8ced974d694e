#pragma once

#include <functional>

namespace csos {

// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is handled by
// exactly one worker; callers write into per-index slots and reduce sequentially, so the
// result never depends on the thread count. The first exception is rethrown after joining.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

}  // namespace csos
