#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "natalia/classifier/backend.hpp"
#include "natalia/service/study_service.hpp"

namespace natalia::service {

using BackendFactory = std::function<std::unique_ptr<classifier::ClassifierBackend>()>;

/// A fixed pool of worker threads, each owning one backend instance, that
/// drain the queue and then wait for notify() or the poll interval.
class WorkerPool {
 public:
  WorkerPool(StudyService& service, BackendFactory factory, std::size_t workers,
             std::chrono::milliseconds poll = std::chrono::milliseconds(500),
             std::string name_prefix = "worker");
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  /// Loads every backend on the calling thread (so load errors surface
  /// here), then starts the threads.
  void start();
  void stop();
  void notify();

  std::size_t size() const noexcept { return count_; }

 private:
  void run(std::size_t index, classifier::ClassifierBackend& backend);

  StudyService& service_;
  BackendFactory factory_;
  std::size_t count_;
  std::chrono::milliseconds poll_;
  std::string prefix_;

  std::mutex mutex_;
  std::condition_variable wake_;
  bool running_ = false;
  std::uint64_t signal_ = 0;
  std::vector<std::unique_ptr<classifier::ClassifierBackend>> backends_;
  std::vector<std::thread> threads_;
};

/// Calls `fn` every `interval` on its own thread until stopped.
class PeriodicTask {
 public:
  PeriodicTask(std::string name, std::function<void()> fn, std::chrono::milliseconds interval);
  ~PeriodicTask();

  PeriodicTask(const PeriodicTask&) = delete;
  PeriodicTask& operator=(const PeriodicTask&) = delete;

  void start();
  void stop();

 private:
  std::string name_;
  std::function<void()> fn_;
  std::chrono::milliseconds interval_;
  std::mutex mutex_;
  std::condition_variable wake_;
  bool running_ = false;
  std::thread thread_;
};

}  // namespace natalia::service
