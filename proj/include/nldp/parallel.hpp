#pragma once

#include <cstddef>
#include <functional>

namespace nldp {

// Worker-thread count used by the pair loops. 0 resets to hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

// Compensated (Kahan) accumulator.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

// Deterministic reduction over [0, n_items). The range is split into fixed-size
// blocks; block_sum(begin, end) must return the serial sum of one block. Blocks are
// evaluated by the worker pool in any order, but partials are combined in block
// order with compensated summation, so the result is bitwise identical for every
// thread count (including 1, which runs the same block decomposition).
double reduce_blocks(std::size_t n_items, std::size_t block_size,
                     const std::function<double(std::size_t, std::size_t)>& block_sum);

// Runs fn(i) for every i in [0, n). fn must write only to slots owned by i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace nldp
