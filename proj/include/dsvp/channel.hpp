#pragma once

#include <atomic>
#include <condition_variable>
#include <memory>
#include <mutex>

#include "error.hpp"
#include "value.hpp"

namespace dsvp {

// Cancellation signal shared by a family and everything that can block
// on its behalf.
struct KillSignal {
    std::atomic<bool> raised{false};
    bool is_raised() const noexcept { return raised.load(std::memory_order_acquire); }
    void raise() noexcept { raised.store(true, std::memory_order_release); }
};

// Write-once synchronization cell: empty -> full exactly once. Writes
// never block; reads block until full and do not consume the value, so
// one consumer may read it repeatedly. Safe for one writer plus one
// reader; interrupt() wakes a blocked reader after a kill.
class ChannelCell {
public:
    ChannelCell() = default;

    void write(Value v) {
        std::lock_guard<std::mutex> lk(mu_);
        if (full_) fail(Errc::write_once_violation, "second write to a full cell");
        value_ = std::move(v);
        full_ = true;
        cv_.notify_all();
    }

    // Pre-fill at family construction time (parent initials); same
    // write-once rule as write().
    void prefill(Value v) { write(std::move(v)); }

    bool full() const {
        std::lock_guard<std::mutex> lk(mu_);
        return full_;
    }

    // Blocks until the cell is full; unwinds if the family dies first.
    const Value &read_blocking(const KillSignal &kill) {
        std::unique_lock<std::mutex> lk(mu_);
        cv_.wait(lk, [&] { return full_ || kill.is_raised(); });
        if (!full_) throw ThreadUnwind{};
        return value_;
    }

    // Sequential schedule: the value must already be there.
    const Value &read_now() {
        std::lock_guard<std::mutex> lk(mu_);
        if (!full_)
            fail(Errc::sequential_deadlock, "read of an empty cell in the sequential schedule");
        return value_;
    }

    // Peek after family termination (no blocking, no error).
    Value peek() const {
        std::lock_guard<std::mutex> lk(mu_);
        return full_ ? value_ : Value();
    }

    void interrupt() {
        std::lock_guard<std::mutex> lk(mu_);
        cv_.notify_all();
    }

private:
    mutable std::mutex mu_;
    std::condition_variable cv_;
    bool full_ = false;
    Value value_;
};

} // namespace dsvp
