#include "phi4/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>

namespace phi4 {

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    const int w = std::max(1, workers);
    if (w == 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> threads;
    const std::size_t chunk = (n + static_cast<std::size_t>(w) - 1) / static_cast<std::size_t>(w);
    std::exception_ptr err;
    std::mutex err_mtx;
    for (int t = 0; t < w; ++t) {
        const std::size_t lo = static_cast<std::size_t>(t) * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        threads.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mtx);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : threads) th.join();
    if (err) std::rethrow_exception(err);
}

double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.subspan(0, half)) + pairwise_sum(xs.subspan(half));
}

int default_workers() {
    if (const char* env = std::getenv("PHI4_WORKERS")) {
        const int w = std::atoi(env);
        if (w >= 1) return w;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace phi4
