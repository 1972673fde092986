#include "nldp/parallel.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace nldp {

namespace {
std::atomic<unsigned> g_threads{0};

unsigned resolve(unsigned requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}
} // namespace

void set_thread_count(unsigned n) { g_threads.store(n); }

unsigned thread_count() { return resolve(g_threads.load()); }

double reduce_blocks(std::size_t n_items, std::size_t block_size,
                     const std::function<double(std::size_t, std::size_t)>& block_sum) {
    if (n_items == 0) return 0.0;
    if (block_size == 0) block_size = 1;
    const std::size_t n_blocks = (n_items + block_size - 1) / block_size;
    std::vector<double> partial(n_blocks, 0.0);

    auto run_block = [&](std::size_t b) {
        const std::size_t begin = b * block_size;
        const std::size_t end = std::min(begin + block_size, n_items);
        partial[b] = block_sum(begin, end);
    };

    const unsigned workers = std::min<std::size_t>(thread_count(), n_blocks);
    if (workers <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1))
                    run_block(b);
            });
        }
        for (auto& th : pool) th.join();
    }

    KahanSum total;
    for (double v : partial) total.add(v);
    return total.value();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    const unsigned workers = std::min<std::size_t>(thread_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t chunk = 16;
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t begin = next.fetch_add(chunk);
                if (begin >= n) return;
                const std::size_t end = std::min(begin + chunk, n);
                for (std::size_t i = begin; i < end; ++i) fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace nldp
