#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

namespace qpropsim {

/// Evaluates fn(i) for i in [0, count) on up to `jobs` threads. Results
/// come back in index order, so the schedule never shows in the output.
/// The exception from the lowest failing index is rethrown.
template <typename Result, typename Fn>
std::vector<Result> parallel_map(std::size_t count, int jobs, Fn&& fn) {
  std::vector<std::optional<Result>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), count);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<Result> results;
  results.reserve(count);
  for (auto& s : slots) results.push_back(std::move(*s));
  return results;
}

}  // namespace qpropsim
