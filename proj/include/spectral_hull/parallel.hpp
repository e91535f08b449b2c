#pragma once

#include <cstddef>
#include <functional>

namespace spectral_hull {

// Thread cap from SPECTRAL_HULL_THREADS (default 1). Overridable for tests.
int thread_count();
void set_thread_count(int n);  // n <= 0 restores the environment value

// Runs body(i) for i in [begin, end). Each index is handled by exactly one
// thread; callers must only write to slots owned by i.
void parallel_for(std::ptrdiff_t begin, std::ptrdiff_t end,
                  const std::function<void(std::ptrdiff_t)>& body);

}  // namespace spectral_hull
