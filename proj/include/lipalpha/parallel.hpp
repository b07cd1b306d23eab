#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "lipalpha/numerics.hpp"

namespace lipalpha {

// Deterministic parallel map: body(i) writes into index i of a
// preallocated result, so output does not depend on the thread count.
// The first exception thrown by any worker is rethrown on the caller.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
  threads = std::max(1u, threads);
  if (threads == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t nt = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex err_mutex;
  pool.reserve(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    pool.emplace_back([&, t]() {
      const std::size_t lo = n * t / nt;
      const std::size_t hi = n * (t + 1) / nt;
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Sum f(i) for i in [0,n). Blocks of fixed size are summed sequentially
// (compensated), then combined in block order, so the result is bitwise
// independent of the thread count.
template <class F>
double parallel_block_sum(std::size_t n, unsigned threads, F&& f) {
  constexpr std::size_t kBlock = 4096;
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(nblocks, 0.0);
  parallel_for(nblocks, threads, [&](std::size_t bi) {
    KahanSum acc;
    const std::size_t lo = bi * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    for (std::size_t i = lo; i < hi; ++i) acc.add(f(i));
    partial[bi] = acc.value();
  });
  KahanSum total;
  for (double p : partial) total.add(p);
  return total.value();
}

}  // namespace lipalpha
