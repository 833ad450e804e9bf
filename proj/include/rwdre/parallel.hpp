#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <thread>
#include <type_traits>
#include <vector>

namespace rwdre
{
    // Worker cap: RWDRE_THREADS if set and positive, else hardware threads.
    unsigned worker_cap();

    // Calls fn(i) for i in [0, n) and returns the results in index order.
    // Indices are handed out in contiguous batches of `batches` equal parts,
    // so the outcome never depends on the thread count. The exception from
    // the lowest failing index is rethrown.
    template <typename Fn>
    auto parallel_map(std::uint64_t n, Fn&& fn, unsigned batches = 0)
    {
        using R = decltype(fn(std::uint64_t{0}));
        static_assert(!std::is_same_v<R, bool>, "vector<bool> is not safe for concurrent writes");
        std::vector<R> out(n);
        if (n == 0)
            return out;
        if (batches == 0)
            batches = static_cast<unsigned>(std::min<std::uint64_t>(n, 4096));
        batches = static_cast<unsigned>(std::min<std::uint64_t>(batches, n));
        const unsigned workers = std::max(1u, std::min(worker_cap(), batches));
        std::vector<std::exception_ptr> errors(n);
        std::atomic<unsigned> next{0};
        auto body = [&] {
            for (;;)
            {
                const unsigned b = next.fetch_add(1);
                if (b >= batches)
                    return;
                const std::uint64_t lo = n * b / batches;
                const std::uint64_t hi = n * (b + 1) / batches;
                for (std::uint64_t i = lo; i < hi; ++i)
                {
                    try
                    {
                        out[i] = fn(i);
                    }
                    catch (...)
                    {
                        errors[i] = std::current_exception();
                    }
                }
            }
        };
        if (workers == 1)
            body();
        else
        {
            std::vector<std::thread> pool;
            pool.reserve(workers);
            for (unsigned w = 0; w < workers; ++w)
                pool.emplace_back(body);
            for (auto& t : pool)
                t.join();
        }
        for (auto& e : errors)
            if (e)
                std::rethrow_exception(e);
        return out;
    }
} // namespace rwdre
