#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>

#include "types.hpp"

namespace dsvp {

// Governs connection establishment for one remote create, and optionally
// bounds the whole create..sync interval. Once the Create frame is fully
// sent no automatic re-execution happens; re-running a possibly-started
// family is the caller's decision.
struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds backoff_base{50};
    double backoff_mult = 2.0;
    std::chrono::milliseconds connect_timeout{1000};
    std::chrono::milliseconds overall_deadline{0}; // 0: unbounded

    static RetryPolicy one_shot(std::chrono::milliseconds connect_timeout) {
        RetryPolicy p;
        p.max_attempts = 1;
        p.connect_timeout = connect_timeout;
        return p;
    }

    std::chrono::milliseconds backoff_for(int attempt) const {
        double d = static_cast<double>(backoff_base.count());
        for (int i = 1; i < attempt; ++i) d *= backoff_mult;
        return std::chrono::milliseconds(static_cast<int64_t>(d));
    }
};

// Shared timer facility for watchdogs and sync deadlines. Keyed entries
// replace any pending entry under the same key, so re-arming a watchdog
// moves its deadline. Callbacks run on the timer thread, outside the
// service lock; they must not block for long.
class TimerService {
public:
    using Clock = std::chrono::steady_clock;

    TimerService() : worker_([this] { loop(); }) {}

    ~TimerService() {
        {
            std::lock_guard<std::mutex> lk(mu_);
            stop_ = true;
        }
        cv_.notify_all();
        worker_.join();
    }

    TimerService(const TimerService &) = delete;
    TimerService &operator=(const TimerService &) = delete;

    void schedule_keyed(const std::string &key, Clock::time_point when,
                        std::function<void()> fn) {
        {
            std::lock_guard<std::mutex> lk(mu_);
            entries_[key] = Entry{when, std::move(fn)};
        }
        cv_.notify_all();
    }

    void schedule_in(const std::string &key, std::chrono::milliseconds delay,
                     std::function<void()> fn) {
        schedule_keyed(key, Clock::now() + delay, std::move(fn));
    }

    void cancel(const std::string &key) {
        std::lock_guard<std::mutex> lk(mu_);
        entries_.erase(key);
    }

private:
    struct Entry {
        Clock::time_point when;
        std::function<void()> fn;
    };

    void loop() {
        std::unique_lock<std::mutex> lk(mu_);
        while (!stop_) {
            if (entries_.empty()) {
                cv_.wait(lk);
                continue;
            }
            auto next = entries_.begin();
            for (auto it = entries_.begin(); it != entries_.end(); ++it)
                if (it->second.when < next->second.when) next = it;
            auto now = Clock::now();
            if (next->second.when > now) {
                cv_.wait_until(lk, next->second.when);
                continue;
            }
            auto fn = std::move(next->second.fn);
            entries_.erase(next);
            lk.unlock();
            try {
                fn();
            } catch (...) {
            }
            lk.lock();
        }
    }

    std::mutex mu_;
    std::condition_variable cv_;
    std::map<std::string, Entry> entries_;
    bool stop_ = false;
    std::thread worker_;
};

} // namespace dsvp
