#pragma once

#include <cstddef>
#include <functional>

namespace convwave {

/// Worker count for parallel sections: CONVWAVE_WORKERS if set to a
/// positive integer, otherwise the machine's hardware concurrency.
unsigned worker_count();

/// Runs fn(i) for i in [0, count) on up to worker_count() threads.
/// fn must be safe to call concurrently for distinct i. The first
/// exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}
