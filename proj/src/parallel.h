// Index-parallel loop shared by the probe and prediction runners.

#ifndef XQA_SRC_PARALLEL_H_
#define XQA_SRC_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace xqa::detail {

// Runs fn(i) for every i in [0, n) on up to `workers` threads. After a
// failure at index f, indices above f are skipped but every index below f
// still runs, so the rethrown error is always the one at the smallest failing
// index whatever the thread count.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn &&fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> first_failure{n};

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      if (i > first_failure.load()) continue;
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        std::size_t seen = first_failure.load();
        while (i < seen && !first_failure.compare_exchange_weak(seen, i)) {
        }
      }
    }
  };

  std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, workers)), std::max<std::size_t>(n, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace xqa::detail

#endif  // XQA_SRC_PARALLEL_H_
