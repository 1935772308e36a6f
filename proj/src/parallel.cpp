#include "volterra/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace volterra {

namespace {
std::atomic<int> g_override{0};
}

void set_worker_override(int workers) { g_override.store(workers); }

int worker_count() {
    const int forced = g_override.load();
    if (forced > 0)
        return forced;
    if (const char* env = std::getenv("VOLTERRA_THREADS")) {
        const int w = std::atoi(env);
        if (w > 0)
            return w;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int begin, int end, const std::function<void(int)>& body) {
    const int n = end - begin;
    if (n <= 0)
        return;
    const int workers = std::min(worker_count(), n);
    if (workers <= 1) {
        for (int i = begin; i < end; ++i)
            body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    for (int w = 0; w < workers; ++w) {
        const int lo = begin + static_cast<int>(static_cast<long long>(n) * w / workers);
        const int hi = begin + static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
        pool.emplace_back([&, lo, hi] {
            try {
                for (int i = lo; i < hi; ++i)
                    body(i);
            } catch (...) {
                if (!failed.exchange(true))
                    error = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (failed.load())
        std::rethrow_exception(error);
}

}  // namespace volterra
