#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace rarebase {

/// Calls fn(begin, end) on `threads` contiguous chunks of [0, n). Each chunk
/// must write only to its own output slots; the first exception thrown by
/// any chunk is rethrown after all threads join.
template <class F>
void parallel_chunks(std::size_t n, unsigned threads, F&& fn) {
  if (threads <= 1 || n < 2) {
    fn(std::size_t{0}, n);
    return;
  }
  const std::size_t t = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(t);
  for (std::size_t c = 0; c < t; ++c) {
    const std::size_t b = n * c / t, e = n * (c + 1) / t;
    pool.emplace_back([&, b, e, c] {
      try {
        fn(b, e);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& ex : errors)
    if (ex) std::rethrow_exception(ex);
}

/// out[i] = fn(i), evaluated in parallel; order of results is by index.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, unsigned threads, F&& fn) {
  std::vector<T> out(n);
  parallel_chunks(n, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out[i] = fn(i);
  });
  return out;
}

}  // namespace rarebase
