#pragma once

#include <cstddef>
#include <functional>

namespace moire {

/// Runs body(i) for i in [0, count). `workers <= 0` means all available cores.
/// Tasks must write only to their own output slot; result placement is by task
/// index, so artifact content does not depend on the worker count.
/// The first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace moire
