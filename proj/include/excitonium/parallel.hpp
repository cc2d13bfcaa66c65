#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace excitonium {

/// Worker count from EXCITONIUM_THREADS, else hardware concurrency (>= 1).
int configured_worker_count();

/// Persistent workers that split an index range into contiguous chunks.
/// Each index is handled by exactly one worker, so a body that writes only
/// its own outputs gives bit-identical results for any worker count.
class WorkerPool {
public:
    explicit WorkerPool(int workers = configured_worker_count());
    ~WorkerPool();
    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    int size() const { return static_cast<int>(threads_.size()) + 1; }

    /// Calls body(begin, end) over a partition of [0, count). Blocks until done.
    void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

private:
    void worker_loop(int id);

    std::vector<std::thread> threads_;
    std::mutex mutex_;
    std::condition_variable wake_;
    std::condition_variable done_;
    const std::function<void(std::size_t, std::size_t)>* body_ = nullptr;
    std::size_t count_ = 0;
    std::size_t generation_ = 0;
    int pending_ = 0;
    bool stop_ = false;
};

}  // namespace excitonium
