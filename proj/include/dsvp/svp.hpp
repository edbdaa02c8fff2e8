#pragma once

#include <atomic>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "channel.hpp"
#include "error.hpp"
#include "types.hpp"
#include "value.hpp"

namespace dsvp {

class Runtime;
class Family;
class ThreadContext;

using ThreadFn = std::function<void(ThreadContext &)>;

// A registered thread function and its declared channel signature.
// Channel arity and types are checked at every create.
struct FunctionEntry {
    ThreadFn fn;
    std::vector<TypeCode> shared_types;
    std::vector<TypeCode> global_types;
};

enum class KillReason { api, watchdog, break_action, cascade };

// Uniform face of a created family, local or remote. sync() may be
// called exactly once; kill() and await() any number of times.
class FamilyControl {
public:
    virtual ~FamilyControl() = default;
    virtual const FamilyId &fid() const = 0;
    virtual SyncResult sync() = 0;
    virtual void kill(KillReason reason = KillReason::api) = 0;
    virtual void await() = 0;
    virtual bool finished() const = 0;
};

using FamilyHandle = std::shared_ptr<FamilyControl>;
using Router = std::function<FamilyHandle(FamilyDescriptor)>;

// Pre-resolved family used for nested creates under the sequential
// schedule: the child already ran to completion inline.
class CompletedHandle final : public FamilyControl {
public:
    CompletedHandle(FamilyId fid, SyncResult r) : fid_(std::move(fid)), result_(std::move(r)) {}
    const FamilyId &fid() const override { return fid_; }
    SyncResult sync() override {
        if (synced_.exchange(true)) fail(Errc::double_sync, "sync already consumed");
        return result_;
    }
    void kill(KillReason) override {}
    void await() override {}
    bool finished() const override { return true; }

private:
    FamilyId fid_;
    SyncResult result_;
    std::atomic<bool> synced_{false};
};

namespace detail {

// FIFO turnstile backing one exclusive place. Tickets are issued in
// create arrival order; a killed family abandons its ticket without
// blocking the queue.
class PlaceQueue {
public:
    uint64_t enqueue() {
        std::lock_guard<std::mutex> lk(mu_);
        return next_++;
    }

    bool acquire(uint64_t ticket, const KillSignal &kill) {
        std::unique_lock<std::mutex> lk(mu_);
        for (;;) {
            skip_abandoned();
            if (serving_ == ticket) return true;
            if (kill.is_raised()) {
                abandoned_.insert(ticket);
                cv_.notify_all();
                return false;
            }
            cv_.wait(lk);
        }
    }

    void release(uint64_t ticket) {
        std::lock_guard<std::mutex> lk(mu_);
        if (serving_ == ticket) ++serving_;
        skip_abandoned();
        cv_.notify_all();
    }

    void interrupt() {
        std::lock_guard<std::mutex> lk(mu_);
        cv_.notify_all();
    }

private:
    void skip_abandoned() {
        while (abandoned_.count(serving_)) {
            abandoned_.erase(serving_);
            ++serving_;
        }
    }

    std::mutex mu_;
    std::condition_variable cv_;
    uint64_t next_ = 0;
    uint64_t serving_ = 0;
    std::set<uint64_t> abandoned_;
};

struct ActiveCounter {
    std::mutex mu;
    std::condition_variable cv;
    int64_t n = 0;

    void inc() {
        std::lock_guard<std::mutex> lk(mu);
        ++n;
    }
    void dec() {
        std::lock_guard<std::mutex> lk(mu);
        if (--n == 0) cv.notify_all();
    }
    void wait_zero() {
        std::unique_lock<std::mutex> lk(mu);
        cv.wait(lk, [&] { return n == 0; });
    }
};

} // namespace detail

// Per-thread view handed to a thread function: index, channel endpoints,
// nested create, and the kill poll point.
class ThreadContext {
public:
    int64_t index() const noexcept { return index_; }
    size_t position() const noexcept { return pos_; }
    size_t shared_arity() const noexcept { return shared_in_.size(); }
    size_t global_arity() const noexcept { return globals_->size(); }
    bool sequential_schedule() const noexcept { return fam_ == nullptr; }

    const Value &read_shared(size_t channel);
    void write_shared(size_t channel, Value v);
    const Value &read_global(size_t channel) const;

    Buffer &global_buffer(size_t channel) const { return *read_global(channel).buffer(); }

    // Nested create routed like any other (local or remote place).
    FamilyHandle create(FamilyDescriptor desc);

    // Cooperative cancellation point.
    void poll_kill();

    // Ends this thread's own family as a kill scoped to it. Applies only
    // to the family it is executed in; recursion to child families
    // behaves as a kill.
    [[noreturn]] void break_family();

private:
    friend class Family;
    friend class Runtime;

    ThreadContext() = default;

    Runtime *rt_ = nullptr;
    Family *fam_ = nullptr; // null under the sequential schedule
    const FunctionEntry *entry_ = nullptr;
    std::vector<ChannelCell *> shared_in_;
    std::vector<ChannelCell *> shared_out_;
    const std::vector<Value> *globals_ = nullptr;
    int64_t index_ = 0;
    size_t pos_ = 0;
    bool *seq_break_ = nullptr; // sequential schedule: break indicator
};

// One created family executing locally: channel fabric, member threads
// in index order bounded by the activation window, terminal status.
class Family final : public FamilyControl, public std::enable_shared_from_this<Family> {
public:
    Family(Runtime *rt, FamilyDescriptor desc, std::shared_ptr<const FunctionEntry> entry,
           std::shared_ptr<detail::ActiveCounter> active, size_t window)
        : rt_(rt), desc_(std::move(desc)), entry_(std::move(entry)), active_(std::move(active)),
          window_(window) {
        count_ = desc_.range.thread_count();
        size_t arity = entry_->shared_types.size();
        cells_.resize(arity);
        for (size_t c = 0; c < arity; ++c) {
            cells_[c].reserve(static_cast<size_t>(count_) + 1);
            for (int64_t k = 0; k <= count_; ++k)
                cells_[c].push_back(std::make_unique<ChannelCell>());
            cells_[c][0]->prefill(desc_.shareds[c]);
        }
    }

    const FamilyId &fid() const override { return desc_.fid; }

    SyncResult sync() override {
        if (synced_.exchange(true)) fail(Errc::double_sync, "sync already consumed");
        await();
        std::lock_guard<std::mutex> lk(mu_);
        return result_;
    }

    void await() override {
        std::unique_lock<std::mutex> lk(mu_);
        cv_.wait(lk, [&] { return terminal_; });
    }

    bool finished() const override {
        std::lock_guard<std::mutex> lk(mu_);
        return terminal_;
    }

    void kill(KillReason reason = KillReason::api) override {
        {
            std::lock_guard<std::mutex> lk(mu_);
            if (terminal_) return; // completion already recorded wins
        }
        int want = cause_none;
        cause_.compare_exchange_strong(want, reason == KillReason::break_action ? cause_break
                                             : reason == KillReason::watchdog   ? cause_watchdog
                                                                                : cause_kill);
        kill_.raise();
        for (auto &chan : cells_)
            for (auto &cell : chan) cell->interrupt();
        if (queue_) queue_->interrupt();
        // Recurse right away so members blocked in a child's sync wake up.
        std::vector<FamilyHandle> kids;
        {
            std::lock_guard<std::mutex> lk(mu_);
            kids = children_;
        }
        for (auto &k : kids) k->kill(KillReason::cascade);
    }

    bool killed() const noexcept { return kill_.is_raised(); }

private:
    friend class Runtime;
    friend class ThreadContext;

    static constexpr int cause_none = 0;
    static constexpr int cause_kill = 1;
    static constexpr int cause_break = 2;
    static constexpr int cause_watchdog = 3;
    static constexpr int cause_fail = 4;

    void start(detail::PlaceQueue *queue) {
        queue_ = queue;
        if (queue_) ticket_ = queue_->enqueue();
        auto self = shared_from_this();
        std::thread([self] { self->run(); }).detach();
    }

    void run();
    void member_main(int64_t pos);
    void record_failure(const std::string &what) {
        {
            std::lock_guard<std::mutex> lk(mu_);
            if (fail_detail_.empty()) fail_detail_ = what;
        }
        int want = cause_none;
        cause_.compare_exchange_strong(want, cause_fail);
        kill(KillReason::cascade); // unwind the rest of the family
    }

    void add_child(FamilyHandle h) {
        std::lock_guard<std::mutex> lk(mu_);
        children_.push_back(std::move(h));
    }

    void finish();

    Runtime *rt_;
    FamilyDescriptor desc_;
    std::shared_ptr<const FunctionEntry> entry_;
    std::shared_ptr<detail::ActiveCounter> active_;
    size_t window_;
    int64_t count_ = 0;

    std::vector<std::vector<std::unique_ptr<ChannelCell>>> cells_; // [channel][count+1]
    KillSignal kill_;
    std::atomic<int> cause_{cause_none};

    detail::PlaceQueue *queue_ = nullptr;
    uint64_t ticket_ = 0;

    mutable std::mutex mu_;
    std::condition_variable cv_;
    bool terminal_ = false;
    SyncResult result_;
    std::string fail_detail_;
    std::vector<FamilyHandle> children_;
    std::atomic<bool> synced_{false};
};

// The local SVP execution engine of one node: function registry, family
// lifecycle, exclusive-place turnstiles, and the sequential-schedule
// oracle. Thread-safe for concurrent creates from any thread.
class Runtime {
public:
    explicit Runtime(std::string node_id = kLocalNode, size_t default_block = 128)
        : node_id_(std::move(node_id)), default_block_(default_block ? default_block : 1),
          active_(std::make_shared<detail::ActiveCounter>()) {
        router_ = [this](FamilyDescriptor d) { return create(std::move(d)); };
    }

    Runtime(const Runtime &) = delete;
    Runtime &operator=(const Runtime &) = delete;

    ~Runtime() {
        kill_all();
        active_->wait_zero();
    }

    const std::string &node_id() const noexcept { return node_id_; }
    size_t default_block() const noexcept { return default_block_; }
    void set_default_block(size_t w) { default_block_ = w ? w : 1; }

    void register_function(const std::string &name, FunctionEntry entry) {
        if (!entry.fn) fail(Errc::unknown_function, "entry has no thread function");
        std::lock_guard<std::mutex> lk(reg_mu_);
        auto [it, fresh] =
            registry_.emplace(name, std::make_shared<const FunctionEntry>(std::move(entry)));
        (void)it;
        if (!fresh) fail(Errc::duplicate_function, name);
    }

    bool has_function(const std::string &name) const {
        std::lock_guard<std::mutex> lk(reg_mu_);
        return registry_.count(name) != 0;
    }

    std::shared_ptr<const FunctionEntry> find_function(const std::string &name) const {
        std::lock_guard<std::mutex> lk(reg_mu_);
        auto it = registry_.find(name);
        if (it == registry_.end()) fail(Errc::unknown_function, name);
        return it->second;
    }

    FamilyId next_fid() { return FamilyId{node_id_, serial_.fetch_add(1) + 1}; }

    // Starts a family on this node. Returns immediately with a handle;
    // thread 0's shared-in cells are pre-filled with desc.shareds and all
    // global cells with desc.globals.
    FamilyHandle create(FamilyDescriptor desc) {
        auto entry = prepare(desc);
        size_t window = desc.range.block > 0 ? static_cast<size_t>(desc.range.block)
                                             : default_block_;
        auto fam = std::make_shared<Family>(this, std::move(desc), std::move(entry), active_,
                                            window);
        detail::PlaceQueue *queue =
            fam->desc_.place.exclusive ? &place_queue(fam->desc_.place.resource_id) : nullptr;
        {
            std::lock_guard<std::mutex> lk(fam_mu_);
            families_[fam->fid()] = fam;
        }
        active_->inc();
        fam->start(queue);
        return fam;
    }

    // Executes the family one thread at a time in index order in the
    // calling thread, channel cells short-circuited. For programs free of
    // exclusive-place races this must equal the concurrent result; it is
    // the oracle for equivalence testing. Nested creates run inline the
    // same way.
    SyncResult run_sequential(FamilyDescriptor desc) {
        auto entry = prepare(desc);
        int64_t n = desc.range.thread_count();
        size_t arity = entry->shared_types.size();

        std::vector<std::unique_ptr<ChannelCell>> in(arity), out(arity);
        for (size_t c = 0; c < arity; ++c) {
            in[c] = std::make_unique<ChannelCell>();
            in[c]->prefill(desc.shareds[c]);
        }

        detail::PlaceQueue *queue =
            desc.place.exclusive ? &place_queue(desc.place.resource_id) : nullptr;
        uint64_t ticket = 0;
        KillSignal no_kill;
        if (queue) {
            ticket = queue->enqueue();
            queue->acquire(ticket, no_kill);
        }

        SyncResult res;
        bool broke = false;
        std::string fail_detail;
        for (int64_t pos = 0; pos < n; ++pos) {
            for (size_t c = 0; c < arity; ++c) out[c] = std::make_unique<ChannelCell>();
            ThreadContext ctx;
            ctx.rt_ = this;
            ctx.entry_ = entry.get();
            ctx.globals_ = &desc.globals;
            ctx.index_ = desc.range.index_at(pos);
            ctx.pos_ = static_cast<size_t>(pos);
            ctx.seq_break_ = &broke;
            for (size_t c = 0; c < arity; ++c) {
                ctx.shared_in_.push_back(in[c].get());
                ctx.shared_out_.push_back(out[c].get());
            }
            try {
                entry->fn(ctx);
            } catch (const ThreadUnwind &) {
                broke = true;
            } catch (const std::exception &e) {
                fail_detail = e.what();
            }
            if (broke || !fail_detail.empty()) break;
            in.swap(out);
        }
        if (queue) queue->release(ticket);

        if (!fail_detail.empty()) {
            res.status = FamilyStatus::failed;
            res.failure = FailureKind::remote_error;
            res.detail = std::move(fail_detail);
        } else if (broke) {
            res.status = FamilyStatus::killed;
            res.break_hit = true;
        } else {
            res.status = FamilyStatus::completed;
            res.outputs_applied = true;
            for (size_t c = 0; c < arity; ++c) res.final_shareds.push_back(in[c]->peek());
        }
        return res;
    }

    FamilyHandle find_family(const FamilyId &fid) {
        std::lock_guard<std::mutex> lk(fam_mu_);
        auto it = families_.find(fid);
        if (it == families_.end()) return nullptr;
        return it->second.lock();
    }

    // Kills a family by identity; unknown families are a no-op.
    void kill_family(const FamilyId &fid, KillReason reason = KillReason::api) {
        if (auto h = find_family(fid)) h->kill(reason);
    }

    void kill_all() {
        std::vector<FamilyHandle> live;
        {
            std::lock_guard<std::mutex> lk(fam_mu_);
            for (auto &[fid, weak] : families_)
                if (auto h = weak.lock()) live.push_back(std::move(h));
        }
        for (auto &h : live) h->kill(KillReason::cascade);
    }

    // Nested creates and remote routing: replaced by the node runtime so
    // that a thread's create may target any place.
    void set_router(Router r) { router_ = std::move(r); }
    FamilyHandle route(FamilyDescriptor desc) { return router_(std::move(desc)); }

    static void validate_channels(const std::vector<TypeCode> &declared,
                                  const std::vector<Value> &given, const char *what) {
        if (declared.size() != given.size())
            fail(Errc::bad_channel, std::string(what) + " arity mismatch: declared " +
                                        std::to_string(declared.size()) + ", given " +
                                        std::to_string(given.size()));
        for (size_t i = 0; i < declared.size(); ++i)
            if (given[i].type() != declared[i])
                fail(Errc::type_mismatch, std::string(what) + " channel " + std::to_string(i) +
                                              ": declared " + type_name(declared[i]) + ", given " +
                                              type_name(given[i].type()));
    }

private:
    friend class Family;

    std::shared_ptr<const FunctionEntry> prepare(FamilyDescriptor &desc) {
        auto entry = find_function(desc.function);
        desc.range.thread_count(); // validates step and block
        validate_channels(entry->shared_types, desc.shareds, "shared");
        validate_channels(entry->global_types, desc.globals, "global");
        if (desc.fid.origin_node.empty()) desc.fid = next_fid();
        return entry;
    }

    detail::PlaceQueue &place_queue(const std::string &resource) {
        std::lock_guard<std::mutex> lk(queue_mu_);
        auto &q = queues_[resource];
        if (!q) q = std::make_unique<detail::PlaceQueue>();
        return *q;
    }

    void forget(const FamilyId &fid) {
        std::lock_guard<std::mutex> lk(fam_mu_);
        families_.erase(fid);
    }

    std::string node_id_;
    size_t default_block_;
    std::shared_ptr<detail::ActiveCounter> active_;
    Router router_;

    mutable std::mutex reg_mu_;
    std::unordered_map<std::string, std::shared_ptr<const FunctionEntry>> registry_;

    std::mutex queue_mu_;
    std::unordered_map<std::string, std::unique_ptr<detail::PlaceQueue>> queues_;

    std::mutex fam_mu_;
    std::unordered_map<FamilyId, std::weak_ptr<Family>, FamilyIdHash> families_;

    std::atomic<uint64_t> serial_{0};
};

// --- Family execution -------------------------------------------------------

inline void Family::run() {
    bool acquired = true;
    if (queue_) acquired = queue_->acquire(ticket_, kill_);

    if (acquired && !kill_.is_raised()) {
        int64_t pos = 0;
        std::vector<std::thread> batch;
        while (pos < count_) {
            int64_t end = pos + static_cast<int64_t>(window_);
            if (end > count_) end = count_;
            if (end - pos == 1) {
                member_main(pos);
            } else {
                batch.clear();
                try {
                    for (int64_t p = pos; p < end; ++p)
                        batch.emplace_back([this, p] { member_main(p); });
                } catch (const std::exception &e) {
                    record_failure(std::string("thread activation: ") + e.what());
                }
                for (auto &t : batch) t.join();
            }
            pos = end;
            if (kill_.is_raised()) break;
        }
    }

    if (queue_ && acquired) queue_->release(ticket_);
    finish();
    rt_->forget(desc_.fid);
    auto counter = active_; // survives *this and the runtime
    counter->dec();
}

inline void Family::member_main(int64_t pos) {
    ThreadContext ctx;
    ctx.rt_ = rt_;
    ctx.fam_ = this;
    ctx.entry_ = entry_.get();
    ctx.globals_ = &desc_.globals;
    ctx.index_ = desc_.range.index_at(pos);
    ctx.pos_ = static_cast<size_t>(pos);
    for (size_t c = 0; c < cells_.size(); ++c) {
        ctx.shared_in_.push_back(cells_[c][static_cast<size_t>(pos)].get());
        ctx.shared_out_.push_back(cells_[c][static_cast<size_t>(pos) + 1].get());
    }
    try {
        entry_->fn(ctx);
    } catch (const ThreadUnwind &) {
        // killed at a cancellation point
    } catch (const std::exception &e) {
        record_failure(e.what());
    } catch (...) {
        record_failure("unknown exception in thread function");
    }
}

inline void Family::finish() {
    int cause = cause_.load();
    SyncResult res;
    if (cause == cause_none) {
        res.status = FamilyStatus::completed;
        res.outputs_applied = true;
        for (auto &chan : cells_) res.final_shareds.push_back(chan[chan.size() - 1]->peek());
    } else if (cause == cause_fail) {
        res.status = FamilyStatus::failed;
        res.failure = FailureKind::remote_error;
        std::lock_guard<std::mutex> lk(mu_);
        res.detail = fail_detail_;
    } else {
        res.status = FamilyStatus::killed;
        if (cause == cause_break) res.break_hit = true;
        if (cause == cause_watchdog) res.failure = FailureKind::killed_by_watchdog;
    }

    // A dying family takes its descendants with it before the parent's
    // sync is released.
    if (res.status != FamilyStatus::completed) {
        std::vector<FamilyHandle> kids;
        {
            std::lock_guard<std::mutex> lk(mu_);
            kids = children_;
        }
        for (auto &k : kids) {
            k->kill(KillReason::cascade);
            k->await();
        }
    }

    {
        std::lock_guard<std::mutex> lk(mu_);
        result_ = std::move(res);
        terminal_ = true;
    }
    cv_.notify_all();
}

// --- ThreadContext ----------------------------------------------------------

inline const Value &ThreadContext::read_shared(size_t channel) {
    if (channel >= shared_in_.size()) fail(Errc::bad_channel, "shared index out of range");
    if (!fam_) return shared_in_[channel]->read_now();
    return shared_in_[channel]->read_blocking(fam_->kill_);
}

inline void ThreadContext::write_shared(size_t channel, Value v) {
    if (channel >= shared_out_.size()) fail(Errc::bad_channel, "shared index out of range");
    if (v.type() != entry_->shared_types[channel])
        fail(Errc::type_mismatch, std::string("shared channel ") + std::to_string(channel) +
                                      " carries " + type_name(entry_->shared_types[channel]));
    shared_out_[channel]->write(std::move(v));
}

inline const Value &ThreadContext::read_global(size_t channel) const {
    if (channel >= globals_->size()) fail(Errc::bad_channel, "global index out of range");
    return (*globals_)[channel];
}

inline FamilyHandle ThreadContext::create(FamilyDescriptor desc) {
    poll_kill();
    if (!fam_) {
        // Sequential schedule: the child family runs inline, right now.
        SyncResult r = rt_->run_sequential(desc);
        return std::make_shared<CompletedHandle>(rt_->next_fid(), std::move(r));
    }
    FamilyHandle h = rt_->route(std::move(desc));
    fam_->add_child(h);
    if (fam_->killed()) h->kill(KillReason::cascade); // kill raced the registration
    return h;
}

inline void ThreadContext::poll_kill() {
    if (fam_ && fam_->killed()) throw ThreadUnwind{};
}

inline void ThreadContext::break_family() {
    if (fam_) {
        fam_->kill(KillReason::break_action);
    } else {
        *seq_break_ = true;
    }
    throw ThreadUnwind{};
}

} // namespace dsvp
