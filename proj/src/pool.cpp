#include "sgm/pool.hpp"

namespace sgm {

ThreadPool::ThreadPool(int threads) {
    if (threads < 1) threads = 1;
    workers_.reserve(static_cast<size_t>(threads - 1));
    for (int i = 1; i < threads; ++i)
        workers_.emplace_back([this, i] { worker_loop(i); });
}

ThreadPool::~ThreadPool() {
    {
        std::lock_guard<std::mutex> lk(mu_);
        stop_ = true;
    }
    wake_.notify_all();
    for (auto& w : workers_) w.join();
}

void ThreadPool::drive(int worker_id) {
    auto start = std::chrono::steady_clock::now();
    for (;;) {
        size_t i = cursor_.fetch_add(1, std::memory_order_relaxed);
        if (i >= job_count_) break;
        (*job_)(i, worker_id);
    }
    auto end = std::chrono::steady_clock::now();
    busy_ns_.fetch_add(static_cast<uint64_t>(
                           std::chrono::duration_cast<std::chrono::nanoseconds>(end - start).count()),
                       std::memory_order_relaxed);
}

void ThreadPool::worker_loop(int id) {
    uint64_t seen = 0;
    for (;;) {
        {
            std::unique_lock<std::mutex> lk(mu_);
            wake_.wait(lk, [&] { return stop_ || generation_ != seen; });
            if (stop_) return;
            seen = generation_;
        }
        drive(id);
        if (active_.fetch_sub(1, std::memory_order_acq_rel) == 1) {
            std::lock_guard<std::mutex> lk(mu_);
            done_.notify_all();
        }
    }
}

uint64_t ThreadPool::parallel_for(size_t count, const std::function<void(size_t, int)>& fn) {
    if (count == 0) return 0;
    busy_ns_.store(0, std::memory_order_relaxed);
    cursor_.store(0, std::memory_order_relaxed);
    job_ = &fn;
    job_count_ = count;
    if (workers_.empty()) {
        drive(0);
    } else {
        {
            std::lock_guard<std::mutex> lk(mu_);
            active_.store(static_cast<int>(workers_.size()), std::memory_order_relaxed);
            ++generation_;
        }
        wake_.notify_all();
        drive(0);
        std::unique_lock<std::mutex> lk(mu_);
        done_.wait(lk, [&] { return active_.load(std::memory_order_acquire) == 0; });
    }
    job_ = nullptr;
    return busy_ns_.load(std::memory_order_relaxed);
}

} // namespace sgm
