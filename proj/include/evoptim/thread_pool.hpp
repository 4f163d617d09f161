#pragma once

#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace evoptim {

/// Fixed pool of workers executing indexed task batches. Indices are claimed
/// one at a time under a mutex, so scheduling varies run to run, but every
/// task writes only to its own index — callers get deterministic results for
/// any pool width. Width 1 (or a one-element batch) runs inline on the
/// caller. Tasks are expected to be coarse (a model's whole training round),
/// so per-claim locking is not a bottleneck.
class ThreadPool {
 public:
  explicit ThreadPool(unsigned width) : width_(width == 0 ? 1 : width) {
    for (unsigned i = 1; i < width_; ++i) {
      workers_.emplace_back([this] { worker_loop(); });
    }
  }

  ~ThreadPool() {
    {
      std::lock_guard<std::mutex> lock(mu_);
      stopping_ = true;
    }
    cv_.notify_all();
    for (auto& t : workers_) t.join();
  }

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  unsigned width() const { return width_; }

  /// Runs fn(0) .. fn(count-1), blocking until all are done. The first
  /// exception (by lowest index) is rethrown on the caller.
  void run_indexed(std::size_t count, const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    if (width_ == 1 || count == 1) {
      for (std::size_t i = 0; i < count; ++i) fn(i);
      return;
    }
    std::vector<std::exception_ptr> errors(count);
    std::uint64_t gen = 0;
    {
      std::lock_guard<std::mutex> lock(mu_);
      job_fn_ = &fn;
      job_errors_ = &errors;
      job_count_ = count;
      next_ = 0;
      pending_ = count;
      gen = ++generation_;
    }
    cv_.notify_all();
    run_job(gen);  // the caller works too
    {
      std::unique_lock<std::mutex> lock(mu_);
      done_cv_.wait(lock, [this] { return pending_ == 0; });
      job_fn_ = nullptr;
      job_errors_ = nullptr;
      job_count_ = 0;
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

 private:
  // Claims indices of job `gen` until the job runs out or a newer job starts.
  void run_job(std::uint64_t gen) {
    while (true) {
      std::size_t i = 0;
      const std::function<void(std::size_t)>* fn = nullptr;
      std::vector<std::exception_ptr>* errors = nullptr;
      {
        std::lock_guard<std::mutex> lock(mu_);
        if (generation_ != gen || next_ >= job_count_) return;
        i = next_++;
        fn = job_fn_;
        errors = job_errors_;
      }
      try {
        (*fn)(i);
      } catch (...) {
        (*errors)[i] = std::current_exception();
      }
      std::lock_guard<std::mutex> lock(mu_);
      if (generation_ == gen && --pending_ == 0) done_cv_.notify_all();
    }
  }

  void worker_loop() {
    while (true) {
      std::uint64_t gen = 0;
      {
        std::unique_lock<std::mutex> lock(mu_);
        cv_.wait(lock, [this] { return stopping_ || next_ < job_count_; });
        if (stopping_) return;
        gen = generation_;
      }
      run_job(gen);
    }
  }

  unsigned width_;
  std::vector<std::thread> workers_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable done_cv_;
  bool stopping_ = false;
  const std::function<void(std::size_t)>* job_fn_ = nullptr;
  std::vector<std::exception_ptr>* job_errors_ = nullptr;
  std::size_t job_count_ = 0;
  std::size_t next_ = 0;
  std::uint64_t generation_ = 0;
  std::size_t pending_ = 0;
};

}  // namespace evoptim
