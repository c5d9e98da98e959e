#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace sgm {

// Fixed pool of workers created once and reused across batches. Work is pulled
// via a shared atomic cursor so long units do not serialize behind short ones.
class ThreadPool {
public:
    explicit ThreadPool(int threads);
    ~ThreadPool();

    int size() const { return static_cast<int>(workers_.size()) + 1; }

    // Runs fn(index, worker) for index in [0, count); blocks until done.
    // Returns the summed busy time across workers in nanoseconds.
    uint64_t parallel_for(size_t count, const std::function<void(size_t, int)>& fn);

private:
    void worker_loop(int id);
    void drive(int worker_id);

    std::vector<std::thread> workers_;
    std::mutex mu_;
    std::condition_variable wake_, done_;
    const std::function<void(size_t, int)>* job_ = nullptr;
    size_t job_count_ = 0;
    std::atomic<size_t> cursor_{0};
    std::atomic<uint64_t> busy_ns_{0};
    std::atomic<int> active_ = 0;
    uint64_t generation_ = 0;
    bool stop_ = false;
};

} // namespace sgm
