#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace friable {

// Parallel-map capability handed to the counting routines. Tasks are indexed;
// callers store per-index results and reduce them in index order, so output
// never depends on the number of workers.
class Executor {
 public:
  explicit Executor(unsigned threads = 1) : threads_(std::max(1u, threads)) {}

  unsigned threads() const { return threads_; }

  template <class Fn>
  void for_each_index(std::size_t count, Fn&& fn) const {
    if (count == 0) return;
    const auto workers = static_cast<unsigned>(std::min<std::size_t>(threads_, count));
    if (workers <= 1) {
      for (std::size_t i = 0; i < count; ++i) fn(i);
      return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(count);
          return;
        }
      }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }

  /// Maps fn over [0, count) and returns the results in index order.
  template <class T, class Fn>
  std::vector<T> map(std::size_t count, Fn&& fn) const {
    std::vector<T> out(count);
    for_each_index(count, [&](std::size_t i) { out[i] = fn(i); });
    return out;
  }

  static const Executor& serial() {
    static const Executor instance(1);
    return instance;
  }

 private:
  unsigned threads_;
};

}  // namespace friable
