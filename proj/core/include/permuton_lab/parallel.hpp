#pragma once

#include <cstddef>
#include <functional>

namespace permuton_lab {

/// Worker count: `requested` if positive, else $PERMUTON_LAB_THREADS, else
/// the hardware concurrency.
std::size_t resolve_threads(std::size_t requested = 0);

/// Calls body(i) for i in [0, n) on `threads` workers.  Each index runs
/// exactly once; callers write results into slot i so that reductions can
/// proceed in index order independent of scheduling.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace permuton_lab
