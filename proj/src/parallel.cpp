#include "limeout/parallel.hpp"

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace limeout {

namespace {
thread_local bool g_in_parallel = false;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    std::size_t n_threads = hw == 0 ? 1 : hw;
    if (n_threads > n) n_threads = n;

    if (g_in_parallel || n_threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};

    auto worker = [&] {
        g_in_parallel = true;
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n || failed.load()) break;
            try {
                fn(i);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                break;
            }
        }
        g_in_parallel = false;
    };

    std::vector<std::thread> threads;
    threads.reserve(n_threads - 1);
    for (std::size_t t = 1; t < n_threads; ++t) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();

    if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace limeout
