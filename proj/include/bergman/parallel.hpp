#pragma once

#include <cstddef>
#include <functional>

namespace bergman {

// Worker cap from BERGMAN_FORGE_THREADS (default: hardware concurrency).
unsigned thread_count();

// Runs body(k) for k in [0, count). Work items must write disjoint outputs;
// results are then combined by the caller in index order, so the outcome
// does not depend on the number of threads.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace bergman
