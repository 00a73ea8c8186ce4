#pragma once

#include <cstddef>
#include <functional>

namespace clustsel::threading {

// Worker thread count used by parallel regions. Defaults to the
// CLUSTSEL_THREADS environment variable, or the hardware concurrency when it
// is unset. set_max_threads(0) restores that default.
unsigned max_threads();
void set_max_threads(unsigned n);

// Runs fn(begin, end) over a static partition of [0, n). Callers write into
// per-index slots, so the result is identical for every thread count.
void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace clustsel::threading
