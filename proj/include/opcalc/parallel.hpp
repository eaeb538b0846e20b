#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace opcalc {

/// Worker cap: MARKOV_OPCALC_THREADS if set (>= 1), else hardware concurrency.
unsigned thread_limit() noexcept;

/// Computes fn(i) for i in [0, count), possibly on several threads, and hands
/// every result to consume(i, value) strictly in index order. Output is
/// independent of the thread count. The first exception (by index) is rethrown.
template <class Fn, class Consume>
void ordered_map(std::size_t count, Fn&& fn, Consume&& consume, bool worth_parallel = true)
{
    using Value = std::invoke_result_t<Fn&, std::size_t>;
    const unsigned workers = worth_parallel ? thread_limit() : 1u;
    if (workers <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) consume(i, fn(i));
        return;
    }
    const std::size_t block = static_cast<std::size_t>(workers) * 2;
    std::vector<std::optional<Value>> slot(block);
    std::vector<std::exception_ptr> failure(block);
    for (std::size_t start = 0; start < count; start += block) {
        const std::size_t len = std::min(block, count - start);
        {
            std::vector<std::jthread> pool;
            pool.reserve(workers);
            for (unsigned w = 0; w < workers; ++w) {
                pool.emplace_back([&, w] {
                    for (std::size_t k = w; k < len; k += workers) {
                        try {
                            slot[k].emplace(fn(start + k));
                        } catch (...) {
                            failure[k] = std::current_exception();
                        }
                    }
                });
            }
        }
        for (std::size_t k = 0; k < len; ++k) {
            if (failure[k]) std::rethrow_exception(failure[k]);
            consume(start + k, std::move(*slot[k]));
            slot[k].reset();
        }
    }
}

}  // namespace opcalc
