#ifndef GSCP_PARALLEL_HPP
#define GSCP_PARALLEL_HPP

#include <atomic>
#include <thread>
#include <vector>

namespace gscp {

/// Worker count: GSCP_THREADS when set, hardware concurrency otherwise.
int default_thread_count();

/// Run fn(i) for i in [0, n). Each index runs exactly once; callers keep
/// determinism by writing to per-index slots.
template <class F>
void parallel_for(int n, F&& fn, int threads = 0) {
    if (threads <= 0) threads = default_thread_count();
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> pool;
    int count = std::min(threads, n);
    pool.reserve(count);
    for (int k = 0; k < count; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

}  // namespace gscp

#endif
