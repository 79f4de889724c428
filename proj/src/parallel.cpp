#include "opcalc/parallel.hpp"

#include <atomic>
#include <condition_variable>
#include <mutex>
#include <thread>

namespace opcalc {

namespace {
int g_threads = 1;
}

void set_thread_count(int n) { g_threads = n < 1 ? 1 : n; }
int thread_count() { return g_threads; }

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn) {
    if (end <= begin) return;
    const std::size_t count = end - begin;
    const int nt = g_threads;
    if (nt <= 1 || count == 1) {
        for (std::size_t i = begin; i < end; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(nt, count);
    const std::size_t chunk = (count + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = begin + w * chunk;
        const std::size_t hi = std::min(lo + chunk, end);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

void parallel_for_checked(std::size_t begin, std::size_t end,
                          const std::function<void(std::size_t)>& fn) {
    if (end <= begin) return;
    std::vector<std::exception_ptr> errs(end - begin);
    parallel_for(begin, end, [&](std::size_t i) {
        try {
            fn(i);
        } catch (...) {
            errs[i - begin] = std::current_exception();
        }
    });
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

void run_blocks_ordered(std::size_t nblocks,
                        const std::function<void(std::size_t)>& run_block,
                        const std::function<void(std::size_t)>& consume) {
    const int nt = g_threads;
    if (nt <= 1 || nblocks == 1) {
        for (std::size_t b = 0; b < nblocks; ++b) {
            run_block(b);
            consume(b);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::vector<char> done(nblocks, 0);
    std::mutex mu;
    std::condition_variable cv;

    const std::size_t workers = std::min<std::size_t>(nt, nblocks);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t b = next.fetch_add(1);
                if (b >= nblocks) return;
                run_block(b);
                {
                    std::lock_guard<std::mutex> lk(mu);
                    done[b] = 1;
                }
                cv.notify_one();
            }
        });
    }

    // Consume in strict block order; workers may finish out of order but
    // the merge sequence below is fixed, so results do not depend on nt.
    for (std::size_t b = 0; b < nblocks; ++b) {
        std::unique_lock<std::mutex> lk(mu);
        cv.wait(lk, [&] { return done[b] != 0; });
        lk.unlock();
        consume(b);
    }
    for (auto& t : pool) t.join();
}

} // namespace opcalc
