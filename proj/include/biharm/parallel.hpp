#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace biharm {

/// Process-wide worker count for cell loops. Defaults to 1.
inline std::atomic<int>& thread_count_storage() {
  static std::atomic<int> count{1};
  return count;
}
inline void set_thread_count(int n) { thread_count_storage() = std::max(1, n); }
inline int thread_count() { return thread_count_storage(); }

/// Fixed partition of [0, n) into chunks of `chunk` items. The partition does
/// not depend on the thread count, so a reduction that combines per-chunk
/// results in chunk order is bitwise reproducible for any number of workers.
inline constexpr std::size_t kCellChunk = 64;

/// Runs body(chunk_id, begin, end) for every chunk, possibly concurrently.
template <class Body>
void for_each_chunk(std::size_t n, std::size_t chunk, Body&& body) {
  const std::size_t chunks = (n + chunk - 1) / chunk;
  const auto workers = static_cast<std::size_t>(std::min<std::size_t>(thread_count(), chunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c, c * chunk, std::min(n, (c + 1) * chunk));
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < chunks; c = next++) {
        body(c, c * chunk, std::min(n, (c + 1) * chunk));
      }
    });
  }
  for (auto& t : pool) t.join();
}

/// Sum of item(i) over i in [0, n): items summed sequentially inside each
/// chunk, chunk partials summed in chunk order.
template <class Item>
double chunked_sum(std::size_t n, Item&& item) {
  const std::size_t chunks = (n + kCellChunk - 1) / kCellChunk;
  std::vector<double> partial(chunks, 0.0);
  for_each_chunk(n, kCellChunk, [&](std::size_t c, std::size_t b, std::size_t e) {
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) s += item(i);
    partial[c] = s;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace biharm
