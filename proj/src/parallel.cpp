#include "discflow/parallel.hpp"

#include <algorithm>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <vector>

namespace discflow {

std::size_t max_threads() {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("NONLOCAL_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
    }
    return n;
}

namespace {

// Persistent pool; workers sleep between jobs, the caller thread runs chunk 0.
class Pool {
public:
    explicit Pool(std::size_t workers) {
        for (std::size_t i = 0; i < workers; ++i)
            threads_.emplace_back([this, i] { worker(i + 1); });
    }

    ~Pool() {
        {
            std::unique_lock lk(m_);
            stop_ = true;
            ++generation_;
        }
        cv_start_.notify_all();
        for (auto& t : threads_) t.join();
    }

    void run(std::size_t parts, std::size_t n,
             const std::function<void(std::size_t, std::size_t)>& body) {
        {
            std::unique_lock lk(m_);
            body_ = &body;
            parts_ = parts;
            n_ = n;
            pending_ = threads_.size();  // every worker acknowledges each job
            ++generation_;
        }
        cv_start_.notify_all();
        run_chunk(0);
        std::unique_lock lk(m_);
        cv_done_.wait(lk, [this] { return pending_ == 0; });
        body_ = nullptr;
    }

    std::size_t workers() const { return threads_.size(); }

private:
    void run_chunk(std::size_t k) {
        const std::size_t lo = n_ * k / parts_;
        const std::size_t hi = n_ * (k + 1) / parts_;
        if (lo < hi) (*body_)(lo, hi);
    }

    void worker(std::size_t id) {
        std::size_t seen = 0;
        while (true) {
            std::unique_lock lk(m_);
            cv_start_.wait(lk, [&] { return generation_ != seen; });
            seen = generation_;
            if (stop_) return;
            const bool mine = id < parts_;
            lk.unlock();
            if (mine) run_chunk(id);
            lk.lock();
            if (--pending_ == 0) cv_done_.notify_one();
        }
    }

    std::mutex m_;
    std::condition_variable cv_start_, cv_done_;
    const std::function<void(std::size_t, std::size_t)>* body_ = nullptr;
    std::size_t parts_ = 0, n_ = 0, pending_ = 0, generation_ = 0;
    bool stop_ = false;
    std::vector<std::thread> threads_;
};

}  // namespace

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    const std::size_t want = max_threads();
    if (n == 0) return;
    if (n < 256 || want == 1) {
        body(0, n);
        return;
    }
    static Pool pool(max_threads() - 1);
    const std::size_t parts = std::min(want, pool.workers() + 1);
    if (parts == 1) {
        body(0, n);
        return;
    }
    pool.run(parts, n, body);
}

} // namespace discflow
