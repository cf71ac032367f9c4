#pragma once

#include <cstddef>
#include <functional>

namespace skelmap {

// Worker count used by parallel loops: SKELMAP_THREADS when set to a positive
// integer, otherwise the hardware concurrency (at least 1).
std::size_t thread_count();

// Runs body(i) for every i in [0, n). Each index is visited exactly once, so
// writing results into slot i keeps outputs independent of scheduling. The
// exception thrown for the lowest index (if any) is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace skelmap
