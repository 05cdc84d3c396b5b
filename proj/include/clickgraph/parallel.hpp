#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace clickgraph {

inline unsigned default_thread_count() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

/// Number of workers parallel_for_workers will use for n items.
inline std::size_t worker_count(std::size_t n, unsigned threads) {
  return std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
}

// Runs body(worker, i) for i in [0, n), worker in [0, worker_count(n, threads)).
// Work is handed out in contiguous chunks; the first exception thrown is
// rethrown on the caller.
template <typename Body>
void parallel_for_workers(std::size_t n, unsigned threads, Body&& body) {
  const std::size_t workers = worker_count(n, threads);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(std::size_t{0}, i);
    return;
  }
  const std::size_t chunk = std::max<std::size_t>(1, n / (workers * 8));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&](std::size_t w) {
    try {
      for (;;) {
        std::size_t begin = next.fetch_add(chunk);
        if (begin >= n) break;
        std::size_t end = std::min(n, begin + chunk);
        for (std::size_t i = begin; i < end; ++i) body(w, i);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(n);
    }
  };

  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker, t);
    worker(0);
  }
  if (failure) std::rethrow_exception(failure);
}

template <typename Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  parallel_for_workers(n, threads, [&](std::size_t, std::size_t i) { body(i); });
}

}  // namespace clickgraph
