#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace dirapprox::detail {

/// Splits [begin, end) into `threads` contiguous chunks and runs f(lo, hi) on each.
/// Results come back in chunk order; the first exception (by chunk) is rethrown.
template <class R, class F>
std::vector<R> run_chunks(std::uint64_t begin, std::uint64_t end, int threads, F f) {
  const std::uint64_t total = end > begin ? end - begin : 0;
  const std::uint64_t chunks =
      std::max<std::uint64_t>(1, std::min<std::uint64_t>(std::max(threads, 1), std::max<std::uint64_t>(total, 1)));
  std::vector<R> results(chunks);
  std::vector<std::exception_ptr> errors(chunks);
  auto work = [&](std::uint64_t c) {
    const std::uint64_t lo = begin + total * c / chunks;
    const std::uint64_t hi = begin + total * (c + 1) / chunks;
    try {
      results[c] = f(lo, hi);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };
  if (chunks == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::uint64_t c = 0; c < chunks; ++c) pool.emplace_back(work, c);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace dirapprox::detail
