#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace netcrit::detail {

/// Fixed set of workers that repeatedly run `job(worker_index)` in lock step.
/// `run` returns once every worker has finished the current job.
class WorkerPool {
public:
    explicit WorkerPool(std::size_t workers) {
        for (std::size_t w = 1; w < workers; ++w) threads_.emplace_back([this, w] { loop(w); });
        size_ = workers == 0 ? 1 : workers;
    }

    ~WorkerPool() {
        {
            std::lock_guard lock(mutex_);
            stop_ = true;
            ++generation_;
        }
        wake_.notify_all();
        for (auto& t : threads_) t.join();
    }

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    std::size_t size() const noexcept { return size_; }

    void run(const std::function<void(std::size_t)>& job) {
        if (threads_.empty()) {
            job(0);
            return;
        }
        {
            std::lock_guard lock(mutex_);
            job_ = &job;
            pending_ = threads_.size();
            ++generation_;
        }
        wake_.notify_all();
        job(0);
        std::unique_lock lock(mutex_);
        done_.wait(lock, [this] { return pending_ == 0; });
        job_ = nullptr;
    }

private:
    void loop(std::size_t index) {
        std::size_t seen = 0;
        for (;;) {
            const std::function<void(std::size_t)>* job = nullptr;
            {
                std::unique_lock lock(mutex_);
                wake_.wait(lock, [&] { return generation_ != seen; });
                seen = generation_;
                if (stop_) return;
                job = job_;
            }
            (*job)(index);
            {
                std::lock_guard lock(mutex_);
                if (--pending_ == 0) done_.notify_one();
            }
        }
    }

    std::vector<std::thread> threads_;
    std::size_t size_ = 1;
    std::mutex mutex_;
    std::condition_variable wake_;
    std::condition_variable done_;
    const std::function<void(std::size_t)>* job_ = nullptr;
    std::size_t pending_ = 0;
    std::size_t generation_ = 0;
    bool stop_ = false;
};

}  // namespace netcrit::detail
