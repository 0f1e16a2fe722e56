#ifndef DIMER_PARALLEL_HPP
#define DIMER_PARALLEL_HPP

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dimer {

/** Number of workers actually used for a requested thread count (0 = auto). */
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/**
 * Runs fn(i) for i = 0..count-1 across `threads` workers (0 = hardware).
 * Work items must write to disjoint locations; the dynamic schedule makes
 * no ordering promise, so determinism must come from the items themselves
 * (each i produces the same bytes regardless of which worker runs it).
 * The first exception thrown by any item is rethrown on the caller.
 */
template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
    const int nw = std::min(resolve_threads(threads), count > 0 ? count : 1);
    if (nw <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

} // namespace dimer

#endif
