#pragma once

#include <functional>

namespace volterra {

// Worker count: explicit override > VOLTERRA_THREADS env > hardware concurrency.
int worker_count();
void set_worker_override(int workers);  // 0 clears the override

// Static block split of [begin, end) over workers. Bodies must write only to
// per-index slots; reductions happen sequentially afterwards, so results are
// identical for any worker count.
void parallel_for(int begin, int end, const std::function<void(int)>& body);

}  // namespace volterra
