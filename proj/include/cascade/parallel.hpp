#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cascade {

// Worker count from CASCADE_LAB_WORKERS, else the hardware concurrency.
unsigned default_workers();

/// Runs `body(worker_index, begin, end)` over [0, count) in fixed-size
/// chunks pulled from a shared counter. Chunk boundaries never depend on the
/// worker count; results that are merged commutatively are therefore
/// identical for any number of workers. The first exception is rethrown.
template <typename Body>
void for_each_chunk(std::uint64_t count, unsigned workers, std::uint64_t chunk, Body&& body) {
  workers = std::max(1u, workers);
  const std::uint64_t num_chunks = (count + chunk - 1) / chunk;
  if (workers == 1 || num_chunks <= 1) {
    for (std::uint64_t c = 0; c < num_chunks; ++c) body(0u, c * chunk, std::min(count, (c + 1) * chunk));
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  const unsigned used = static_cast<unsigned>(std::min<std::uint64_t>(workers, num_chunks));
  threads.reserve(used);
  for (unsigned w = 0; w < used; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::uint64_t c; (c = next.fetch_add(1)) < num_chunks;) body(w, c * chunk, std::min(count, (c + 1) * chunk));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = num_chunks;
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace cascade
