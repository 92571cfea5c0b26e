#include "natalia/service/runtime.hpp"

#include <spdlog/spdlog.h>

#include "natalia/common/error.hpp"

namespace natalia::service {

WorkerPool::WorkerPool(StudyService& service, BackendFactory factory, std::size_t workers,
                       std::chrono::milliseconds poll, std::string name_prefix)
    : service_(service),
      factory_(std::move(factory)),
      count_(workers),
      poll_(poll),
      prefix_(std::move(name_prefix)) {
  if (workers == 0) throw Error(ErrorCode::InvalidArgument, "worker count must be >= 1");
}

WorkerPool::~WorkerPool() { stop(); }

void WorkerPool::start() {
  std::lock_guard lock(mutex_);
  if (running_) return;
  backends_.clear();
  for (std::size_t i = 0; i < count_; ++i) backends_.push_back(factory_());
  running_ = true;
  for (std::size_t i = 0; i < count_; ++i) {
    threads_.emplace_back([this, i] { run(i, *backends_[i]); });
  }
}

void WorkerPool::stop() {
  {
    std::lock_guard lock(mutex_);
    if (!running_) return;
    running_ = false;
  }
  wake_.notify_all();
  for (auto& t : threads_) t.join();
  threads_.clear();
}

void WorkerPool::notify() {
  {
    std::lock_guard lock(mutex_);
    ++signal_;
  }
  wake_.notify_all();
}

void WorkerPool::run(std::size_t index, classifier::ClassifierBackend& backend) {
  const std::string id = prefix_ + "-" + std::to_string(index);
  for (;;) {
    std::uint64_t seen;
    {
      std::lock_guard lock(mutex_);
      if (!running_) return;
      seen = signal_;
    }
    bool worked = false;
    try {
      worked = service_.run_once(id, backend);
    } catch (const std::exception& e) {
      spdlog::error("{}: {}", id, e.what());
    }
    if (worked) continue;
    std::unique_lock lock(mutex_);
    wake_.wait_for(lock, poll_, [&] { return !running_ || signal_ != seen; });
  }
}

PeriodicTask::PeriodicTask(std::string name, std::function<void()> fn,
                           std::chrono::milliseconds interval)
    : name_(std::move(name)), fn_(std::move(fn)), interval_(interval) {}

PeriodicTask::~PeriodicTask() { stop(); }

void PeriodicTask::start() {
  std::lock_guard lock(mutex_);
  if (running_) return;
  running_ = true;
  thread_ = std::thread([this] {
    std::unique_lock lock(mutex_);
    while (running_) {
      lock.unlock();
      try {
        fn_();
      } catch (const std::exception& e) {
        spdlog::error("{}: {}", name_, e.what());
      }
      lock.lock();
      wake_.wait_for(lock, interval_, [&] { return !running_; });
    }
  });
}

void PeriodicTask::stop() {
  {
    std::lock_guard lock(mutex_);
    if (!running_) return;
    running_ = false;
  }
  wake_.notify_all();
  if (thread_.joinable()) thread_.join();
}

}  // namespace natalia::service
