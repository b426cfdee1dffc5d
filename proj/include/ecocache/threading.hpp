// Chunked parallel loop with a partition that is independent of the number
// of worker threads, so per-chunk accumulators can be reduced in chunk order
// and results stay bit-identical on any machine.
#pragma once

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <thread>
#include <utility>
#include <vector>

namespace ecocache {

inline std::size_t chunk_count(std::size_t items, std::size_t chunk_size) {
  return (items + chunk_size - 1) / chunk_size;
}

// Worker count: hardware concurrency, overridable with ECOCACHE_THREADS.
inline std::size_t worker_limit() {
  if (const char* env = std::getenv("ECOCACHE_THREADS")) {
    const long v = std::atol(env);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  const std::size_t hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// fn(chunk_index, begin, end) is invoked once per chunk, possibly from
// different threads.  Chunk boundaries depend only on (items, chunk_size).
template <typename Fn>
void for_each_chunk(std::size_t items, std::size_t chunk_size, Fn&& fn) {
  if (items == 0) return;
  const std::size_t chunks = chunk_count(items, chunk_size);
  const std::size_t limit = worker_limit();
  const std::size_t workers = limit < chunks ? limit : chunks;

  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      const std::size_t b = c * chunk_size;
      const std::size_t e = b + chunk_size < items ? b + chunk_size : items;
      fn(c, b, e);
    }
    return;
  }

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= chunks) return;
      const std::size_t b = c * chunk_size;
      const std::size_t e = b + chunk_size < items ? b + chunk_size : items;
      fn(c, b, e);
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 0; t + 1 < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
}

}  // namespace ecocache
