#pragma once

#include <cstddef>
#include <functional>

namespace mfc {

// Runs fn(i) for i in [0, count) across `workers` threads. Callers must write
// results only into index-addressed slots, which keeps the outcome identical
// for any worker count. The first failure (lowest item index) is rethrown.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace mfc
