#pragma once

#include <cstddef>
#include <functional>

namespace smoothkl {

// Runs body(i) for i in [0, count) on up to `threads` workers (0 = hardware
// concurrency). Work items must write only to their own slots. The first
// exception thrown by any item is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

unsigned default_threads();

}  // namespace smoothkl
