#include "excitonium/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace excitonium {

int configured_worker_count() {
    if (const char* env = std::getenv("EXCITONIUM_THREADS"); env != nullptr && *env != '\0') {
        try {
            const int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

WorkerPool::WorkerPool(int workers) {
    workers = std::max(1, workers);
    for (int id = 1; id < workers; ++id) threads_.emplace_back([this, id] { worker_loop(id); });
}

WorkerPool::~WorkerPool() {
    {
        std::lock_guard lock(mutex_);
        stop_ = true;
    }
    wake_.notify_all();
    for (auto& t : threads_) t.join();
}

namespace {

std::pair<std::size_t, std::size_t> chunk(std::size_t count, int parts, int id) {
    const std::size_t base = count / parts;
    const std::size_t extra = count % parts;
    const std::size_t begin = id * base + std::min<std::size_t>(id, extra);
    return {begin, begin + base + (static_cast<std::size_t>(id) < extra ? 1 : 0)};
}

}  // namespace

void WorkerPool::parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body) {
    if (threads_.empty() || count < 2) {
        body(0, count);
        return;
    }
    {
        std::lock_guard lock(mutex_);
        body_ = &body;
        count_ = count;
        pending_ = static_cast<int>(threads_.size());
        ++generation_;
    }
    wake_.notify_all();
    const auto [b, e] = chunk(count, size(), 0);
    body(b, e);
    std::unique_lock lock(mutex_);
    done_.wait(lock, [this] { return pending_ == 0; });
    body_ = nullptr;
}

void WorkerPool::worker_loop(int id) {
    std::size_t seen = 0;
    while (true) {
        const std::function<void(std::size_t, std::size_t)>* body = nullptr;
        std::size_t count = 0;
        {
            std::unique_lock lock(mutex_);
            wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
            if (stop_) return;
            seen = generation_;
            body = body_;
            count = count_;
        }
        const auto [b, e] = chunk(count, size(), id);
        if (b < e) (*body)(b, e);
        {
            std::lock_guard lock(mutex_);
            if (--pending_ == 0) done_.notify_one();
        }
    }
}

}  // namespace excitonium
