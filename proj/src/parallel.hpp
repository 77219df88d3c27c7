#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace falldet {

/// Run fn(i) for i in [0, n). Each index must write only its own output slot,
/// which keeps results independent of the thread count.
template <typename Fn>
void parallel_for(int n, int n_threads, Fn&& fn) {
    if (n <= 0) return;
    if (n_threads <= 1 || n == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    };
    const int workers = std::min(n_threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

}  // namespace falldet
