#include "spectral_hull/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace spectral_hull {

namespace {
std::atomic<int> g_override{0};

int env_threads() {
    const char* s = std::getenv("SPECTRAL_HULL_THREADS");
    if (!s) return 1;
    int n = std::atoi(s);
    return n > 0 ? n : 1;
}
}  // namespace

int thread_count() {
    int o = g_override.load();
    return o > 0 ? o : env_threads();
}

void set_thread_count(int n) { g_override.store(n > 0 ? n : 0); }

void parallel_for(std::ptrdiff_t begin, std::ptrdiff_t end,
                  const std::function<void(std::ptrdiff_t)>& body) {
    std::ptrdiff_t n = end - begin;
    if (n <= 0) return;
    int nt = static_cast<int>(std::min<std::ptrdiff_t>(thread_count(), n));
    if (nt <= 1) {
        for (std::ptrdiff_t i = begin; i < end; ++i) body(i);
        return;
    }
    // static contiguous chunks: which thread runs an index never affects results
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    std::ptrdiff_t chunk = (n + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        std::ptrdiff_t lo = begin + t * chunk;
        std::ptrdiff_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::ptrdiff_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace spectral_hull
