#pragma once
// Tiny deterministic fork-join helper. Work is addressed by index; each index
// derives all of its randomness from its own seed, and results are merged in
// index order, so output never depends on the worker count.

#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

#include "galvin/mask.hpp"

namespace galvin {

// Calls fn(i) for every i in [0, total), spread over `threads` workers in
// contiguous chunks. fn must only write to per-index state. The first
// exception thrown by any worker is rethrown after all workers join.
template <class Fn>
void parallel_for_index(uint64_t total, int threads, Fn&& fn) {
    if (threads < 1) throw param_error("thread count must be >= 1");
    if (threads == 1 || total <= 1) {
        for (uint64_t i = 0; i < total; ++i) fn(i);
        return;
    }
    uint64_t workers = std::min<uint64_t>(uint64_t(threads), total);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(static_cast<size_t>(workers));
    uint64_t chunk = total / workers, extra = total % workers;
    uint64_t begin = 0;
    for (uint64_t w = 0; w < workers; ++w) {
        uint64_t end = begin + chunk + (w < extra ? 1 : 0);
        pool.emplace_back([&, w, begin, end] {
            try {
                for (uint64_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                errs[size_t(w)] = std::current_exception();
            }
        });
        begin = end;
    }
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace galvin
