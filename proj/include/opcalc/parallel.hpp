#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace opcalc {

// Global worker count used by parallel_for / parallel_reduce_blocks.
// 0 or 1 means serial execution. Set once at startup (CLI flag); not
// synchronized against concurrently running loops.
void set_thread_count(int n);
int thread_count();

// Runs fn(i) for i in [begin, end). Work is split into contiguous chunks,
// one per worker. No ordering guarantees between iterations; the caller's
// fn must only touch disjoint state per index.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

// parallel_for with exception propagation: a worker that throws would take
// the whole process down, so this wrapper captures one exception_ptr per
// index and rethrows the first one in index order (deterministic across
// thread counts) after the loop joins.
void parallel_for_checked(std::size_t begin, std::size_t end,
                          const std::function<void(std::size_t)>& fn);

// Deterministic parallel reduction. The index range [0, count) is cut into
// fixed blocks of `block` consecutive indices; each block is reduced
// serially in index order by `work` into a fresh accumulator created by
// `make`, and block results are merged by `merge` strictly in block-index
// order. The result is bit-identical for every thread count, because both
// the block boundaries and the merge order are independent of scheduling.
//
// Acc must be default-constructible via make(); work(acc, i) folds index i
// into acc; merge(total, acc) folds one finished block into the running
// total (called single-threaded, in order).
template <class Acc>
void reduce_blocks_ordered(std::size_t count, std::size_t block,
                           const std::function<Acc()>& make,
                           const std::function<void(Acc&, std::size_t)>& work,
                           const std::function<void(Acc&, Acc&)>& merge,
                           Acc& total);

// Implementation detail shared by the template: schedules `nblocks` jobs,
// runs `run_block(b)` on workers, and calls `consume(b)` in strict block
// order from the coordinating thread as soon as block b and all earlier
// blocks are finished.
void run_blocks_ordered(std::size_t nblocks,
                        const std::function<void(std::size_t)>& run_block,
                        const std::function<void(std::size_t)>& consume);

template <class Acc>
void reduce_blocks_ordered(std::size_t count, std::size_t block,
                           const std::function<Acc()>& make,
                           const std::function<void(Acc&, std::size_t)>& work,
                           const std::function<void(Acc&, Acc&)>& merge,
                           Acc& total) {
    if (count == 0) return;
    if (block == 0) block = 1;
    const std::size_t nblocks = (count + block - 1) / block;
    std::vector<Acc> partial;
    partial.reserve(nblocks);
    for (std::size_t b = 0; b < nblocks; ++b) partial.push_back(make());
    run_blocks_ordered(
        nblocks,
        [&](std::size_t b) {
            const std::size_t lo = b * block;
            const std::size_t hi = lo + block < count ? lo + block : count;
            for (std::size_t i = lo; i < hi; ++i) work(partial[b], i);
        },
        [&](std::size_t b) { merge(total, partial[b]); });
}

} // namespace opcalc
