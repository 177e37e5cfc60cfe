#pragma once

// Minimal blocking thread pool. Work is dispatched as run(n, fn) which
// executes fn(0..n-1) across the workers and returns when all are done;
// which thread runs which index is unspecified, so callers that need
// deterministic reductions must combine per-index results themselves after
// run() returns (see batched_loss: fixed chunks, combined in chunk order,
// giving bit-identical sums for any thread count).

#include <functional>

#include <condition_variable>
#include <mutex>
#include <thread>
#include <vector>

namespace plateau {

class ThreadPool {
 public:
  // n_threads <= 1 runs everything inline on the calling thread.
  explicit ThreadPool(int n_threads);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  int size() const { return static_cast<int>(workers_.size()) + 1; }

  void run(int n, const std::function<void(int)>& fn);

  // PLATEAU_THREADS if set (clamped to >= 1), else hardware concurrency.
  static int env_threads();

 private:
  void worker_loop();

  std::vector<std::thread> workers_;
  std::mutex mu_;
  std::condition_variable start_cv_, done_cv_;
  const std::function<void(int)>* job_ = nullptr;
  int job_size_ = 0;
  int next_index_ = 0;
  int active_ = 0;
  long generation_ = 0;
  bool stop_ = false;
};

}  // namespace plateau
