#include "plateau/threading.hpp"

#include <cstdlib>
#include <string>

namespace plateau {

ThreadPool::ThreadPool(int n_threads) {
  for (int i = 1; i < n_threads; ++i)
    workers_.emplace_back([this] { worker_loop(); });
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard<std::mutex> lk(mu_);
    stop_ = true;
  }
  start_cv_.notify_all();
  for (auto& w : workers_) w.join();
}

void ThreadPool::worker_loop() {
  long seen = 0;
  for (;;) {
    const std::function<void(int)>* job = nullptr;
    {
      std::unique_lock<std::mutex> lk(mu_);
      start_cv_.wait(lk, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      job = job_;
    }
    for (;;) {
      int i;
      {
        std::lock_guard<std::mutex> lk(mu_);
        if (next_index_ >= job_size_) break;
        i = next_index_++;
      }
      (*job)(i);
    }
    {
      std::lock_guard<std::mutex> lk(mu_);
      if (--active_ == 0) done_cv_.notify_one();
    }
  }
}

void ThreadPool::run(int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  if (workers_.empty() || n == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  {
    std::lock_guard<std::mutex> lk(mu_);
    job_ = &fn;
    job_size_ = n;
    next_index_ = 0;
    active_ = static_cast<int>(workers_.size());
    ++generation_;
  }
  start_cv_.notify_all();
  // The calling thread participates too.
  for (;;) {
    int i;
    {
      std::lock_guard<std::mutex> lk(mu_);
      if (next_index_ >= job_size_) break;
      i = next_index_++;
    }
    fn(i);
  }
  std::unique_lock<std::mutex> lk(mu_);
  done_cv_.wait(lk, [&] { return active_ == 0; });
  job_ = nullptr;
}

int ThreadPool::env_threads() {
  if (const char* s = std::getenv("PLATEAU_THREADS")) {
    try {
      const int n = std::stoi(s);
      return n < 1 ? 1 : n;
    } catch (...) {
    }
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace plateau
