#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace dsmooth {

// Evaluate fn(0..count-1) on up to `workers` threads. Items are claimed from a
// shared counter but every result lands in its own slot, so the output does not
// depend on the worker count or on scheduling. The first exception (by item
// index) is rethrown after all workers join.
template <class Fn>
auto parallel_map(std::size_t count, int workers, Fn&& fn)
    -> std::vector<decltype(fn(std::size_t(0)))>
{
    using R = decltype(fn(std::size_t(0)));
    std::vector<R> out(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t nthreads = std::min<std::size_t>(count, std::size_t(std::max(1, workers)));
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

} // namespace dsmooth
