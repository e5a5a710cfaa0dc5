#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

#include "thermofrac/fem.hpp"

namespace thermofrac::detail {

// Contiguous element ranges. Per-chunk outputs are concatenated in chunk
// order by the callers, so results do not depend on the thread count.
inline int chunk_count(Index n) {
  constexpr Index kMinChunk = 4096;
  const Index by_size = std::max<Index>(1, n / kMinChunk);
  return static_cast<int>(std::min<Index>(assembly_threads(), by_size));
}

template <class Fn>
void parallel_chunks(Index n, int chunks, Fn&& fn) {
  auto range = [&](int c) {
    return std::pair<Index, Index>{n * c / chunks, n * (c + 1) / chunks};
  };
  if (chunks <= 1) {
    fn(0, Index{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(chunks));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(chunks));
  for (int c = 0; c < chunks; ++c) {
    pool.emplace_back([&, c] {
      try {
        const auto [b, e] = range(c);
        fn(c, b, e);
      } catch (...) {
        errors[static_cast<std::size_t>(c)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace thermofrac::detail
