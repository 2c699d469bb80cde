#ifndef FINSLER_PARALLEL_HPP
#define FINSLER_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace finsler {

// Worker count: hardware concurrency, capped by the FL_THREADS environment
// variable when set to a positive integer.
inline int worker_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* env = std::getenv("FL_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0 && cap < hw) hw = cap;
  }
  return hw;
}

namespace detail {
inline constexpr std::size_t kChunk = 1024;
}

// Deterministic parallel sum: terms are accumulated per fixed-size chunk in
// index order and chunks are combined in index order, so the result is
// independent of the worker count.
template <class TermFn>
double parallel_sum(std::size_t n, TermFn&& term) {
  if (n == 0) return 0.0;
  const std::size_t nchunks = (n + detail::kChunk - 1) / detail::kChunk;
  const int workers = worker_count();
  if (workers == 1 || nchunks == 1) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += term(i);
    return s;
  }
  std::vector<double> partial(nchunks, 0.0);
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= nchunks) return;
      const std::size_t lo = c * detail::kChunk;
      const std::size_t hi = std::min(n, lo + detail::kChunk);
      double s = 0;
      for (std::size_t i = lo; i < hi; ++i) s += term(i);
      partial[c] = s;
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  double s = 0;
  for (double p : partial) s += p;
  return s;
}

template <class BodyFn>
void parallel_for(std::size_t n, BodyFn&& body) {
  if (n == 0) return;
  const int workers = worker_count();
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c * detail::kChunk >= n) return;
      const std::size_t lo = c * detail::kChunk;
      const std::size_t hi = std::min(n, lo + detail::kChunk);
      for (std::size_t i = lo; i < hi; ++i) body(i);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
}

}  // namespace finsler

#endif
