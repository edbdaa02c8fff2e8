#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "config.hpp"
#include "datadesc.hpp"
#include "fault.hpp"
#include "log.hpp"
#include "net.hpp"
#include "svp.hpp"
#include "wire.hpp"

namespace dsvp {

class NodeRuntime;
class Connection;

// Every frame that crosses a transport, as seen by this runtime instance.
struct FrameEvent {
    enum class Dir { sent, received };
    Dir dir;
    wire::MsgKind kind;
    FamilyId fid;
    std::string peer;
};
using FrameObserver = std::function<void(const FrameEvent &)>;

// One outstanding remote create. Resolution is at-most-once: whichever of
// the remote Sync frame, a kill, a transport failure or a deadline gets
// here first decides the result; everything later is discarded. Output
// regions are applied to the caller's buffers before sync is released,
// and only on the first resolution.
class RemoteFamilyRecord final : public FamilyControl,
                                 public std::enable_shared_from_this<RemoteFamilyRecord> {
public:
    RemoteFamilyRecord(FamilyId fid, TransferSet ts, std::vector<Value> args)
        : fid_(std::move(fid)), ts_(std::move(ts)), args_(std::move(args)) {}

    const FamilyId &fid() const override { return fid_; }

    void set_connection(std::shared_ptr<Connection> conn) { conn_ = std::move(conn); }

    SyncResult sync() override {
        if (synced_.exchange(true)) fail(Errc::double_sync, "sync already consumed");
        await();
        std::lock_guard<std::mutex> lk(mu_);
        return result_;
    }

    void await() override {
        std::unique_lock<std::mutex> lk(mu_);
        cv_.wait(lk, [&] { return resolved_; });
    }

    bool finished() const override {
        std::lock_guard<std::mutex> lk(mu_);
        return resolved_;
    }

    // Sends a Kill frame (fire and forget) and marks the record killed.
    // A completion that was already recorded wins over the kill.
    void kill(KillReason reason = KillReason::api) override;

    // Deadline expiry: best-effort kill, then resolve as timed out.
    void resolve_timeout();

    void on_sync_frame(const wire::SyncBody &b) {
        std::lock_guard<std::mutex> lk(mu_);
        if (resolved_) return; // duplicate or superseded frame: discard
        SyncResult r;
        r.status = b.status;
        r.break_hit = b.break_hit;
        r.detail = b.detail;
        if (b.status == FamilyStatus::completed) {
            try {
                apply_outputs(b.output_payload, args_);
                r.final_shareds = b.final_shareds;
                r.outputs_applied = true;
            } catch (const std::exception &e) {
                r = SyncResult{};
                r.status = FamilyStatus::failed;
                r.failure = FailureKind::remote_error;
                r.detail = std::string("bad output payload: ") + e.what();
            }
        } else if (b.status == FamilyStatus::failed) {
            r.failure = FailureKind::remote_error;
        }
        finish_locked(std::move(r));
    }

    void fail_transport(FailureKind kind, const std::string &why) {
        std::lock_guard<std::mutex> lk(mu_);
        if (resolved_) return;
        SyncResult r;
        r.status = kind == FailureKind::timeout ? FamilyStatus::timed_out : FamilyStatus::failed;
        r.failure = kind;
        r.detail = why;
        finish_locked(std::move(r));
    }

private:
    void finish_locked(SyncResult r) {
        result_ = std::move(r);
        resolved_ = true;
        cv_.notify_all();
    }

    void send_kill_frame();

    FamilyId fid_;
    TransferSet ts_;
    std::vector<Value> args_; // aliases the caller's buffers
    std::weak_ptr<Connection> conn_;

    mutable std::mutex mu_;
    std::condition_variable cv_;
    bool resolved_ = false;
    SyncResult result_;
    std::atomic<bool> synced_{false};
};

// One reliable ordered byte stream to a peer node, multiplexing all
// families this runtime created there. A reader thread resolves inbound
// Sync frames; writes are serialized so frames never interleave.
class Connection : public std::enable_shared_from_this<Connection> {
public:
    Connection(net::Socket sock, std::string peer, FrameObserver observer)
        : sock_(std::move(sock)), peer_(std::move(peer)), observer_(std::move(observer)) {}

    Connection(const Connection &) = delete;
    Connection &operator=(const Connection &) = delete;

    static std::shared_ptr<Connection> establish(const std::string &endpoint,
                                                 const RetryPolicy &policy,
                                                 FrameObserver observer) {
        net::Endpoint ep = net::Endpoint::parse(endpoint);
        int timeout = static_cast<int>(policy.connect_timeout.count());
        for (int attempt = 1;; ++attempt) {
            try {
                net::Socket s = net::dial(ep, timeout);
                auto conn =
                    std::make_shared<Connection>(std::move(s), endpoint, std::move(observer));
                conn->start_reader();
                return conn;
            } catch (const net::ConnectError &) {
                if (attempt >= policy.max_attempts) throw;
                std::this_thread::sleep_for(policy.backoff_for(attempt));
            }
        }
    }

    const std::string &peer() const noexcept { return peer_; }
    bool alive() const noexcept { return !dead_.load(); }

    bool attach(const std::shared_ptr<RemoteFamilyRecord> &rec) {
        std::lock_guard<std::mutex> lk(imu_);
        if (dead_.load()) return false;
        inflight_[rec->fid()] = rec;
        return true;
    }

    void send(const wire::WireMessage &m) {
        {
            std::lock_guard<std::mutex> lk(wmu_);
            if (dead_.load()) fail(Errc::io, "connection to " + peer_ + " is closed");
            net::write_frame(sock_, m);
        }
        observe(FrameEvent::Dir::sent, m.kind, m.fid());
    }

    void close() {
        dead_.store(true);
        sock_.shutdown_both();
    }

private:
    void start_reader() {
        std::thread([self = shared_from_this()] { self->reader_loop(); }).detach();
    }

    void reader_loop() {
        for (;;) {
            std::optional<wire::WireMessage> m;
            try {
                m = net::read_frame(sock_);
            } catch (const std::exception &e) {
                if (!dead_.load()) log_info("connection %s: %s", peer_.c_str(), e.what());
                break;
            }
            if (!m) break;
            observe(FrameEvent::Dir::received, m->kind, m->fid());
            if (m->kind != wire::MsgKind::sync) {
                log_warn("connection %s: unexpected %s frame", peer_.c_str(),
                         wire::kind_name(m->kind));
                continue;
            }
            std::shared_ptr<RemoteFamilyRecord> rec;
            {
                std::lock_guard<std::mutex> lk(imu_);
                auto it = inflight_.find(m->sync().fid);
                if (it != inflight_.end()) {
                    rec = it->second.lock();
                    inflight_.erase(it);
                }
            }
            if (rec)
                rec->on_sync_frame(m->sync());
            else
                log_debug("discarding sync for unknown family %s", m->sync().fid.str().c_str());
        }
        dead_.store(true);
        std::vector<std::shared_ptr<RemoteFamilyRecord>> pending;
        {
            std::lock_guard<std::mutex> lk(imu_);
            for (auto &[fid, weak] : inflight_)
                if (auto rec = weak.lock()) pending.push_back(std::move(rec));
            inflight_.clear();
        }
        for (auto &rec : pending)
            rec->fail_transport(FailureKind::connection_lost, "connection to " + peer_ + " lost");
    }

    void observe(FrameEvent::Dir dir, wire::MsgKind kind, const FamilyId &fid) {
        if (observer_) observer_(FrameEvent{dir, kind, fid, peer_});
    }

    net::Socket sock_;
    std::string peer_;
    FrameObserver observer_;
    std::mutex wmu_;
    std::atomic<bool> dead_{false};
    std::mutex imu_;
    std::unordered_map<FamilyId, std::weak_ptr<RemoteFamilyRecord>, FamilyIdHash> inflight_;
};

inline void RemoteFamilyRecord::send_kill_frame() {
    if (auto conn = conn_.lock()) {
        try {
            conn->send(wire::WireMessage::make_kill(fid_));
        } catch (const std::exception &e) {
            log_debug("kill frame for %s not sent: %s", fid_.str().c_str(), e.what());
        }
    }
}

inline void RemoteFamilyRecord::kill(KillReason reason) {
    {
        std::lock_guard<std::mutex> lk(mu_);
        if (resolved_) return;
    }
    send_kill_frame();
    std::lock_guard<std::mutex> lk(mu_);
    if (resolved_) return;
    SyncResult r;
    r.status = FamilyStatus::killed;
    if (reason == KillReason::watchdog) r.failure = FailureKind::killed_by_watchdog;
    finish_locked(std::move(r));
}

inline void RemoteFamilyRecord::resolve_timeout() {
    {
        std::lock_guard<std::mutex> lk(mu_);
        if (resolved_) return;
    }
    send_kill_frame();
    std::lock_guard<std::mutex> lk(mu_);
    if (resolved_) return;
    SyncResult r;
    r.status = FamilyStatus::timed_out;
    r.failure = FailureKind::timeout;
    r.detail = "deadline exceeded";
    finish_locked(std::move(r));
}

class NodeServer;

// The network face of one node: place table, description-function
// registry, client-side delegation and the daemon. route_create makes a
// create on a remote place a concurrent remote procedure call while a
// local place stays a plain in-process create; the handle is the same
// either way.
class NodeRuntime {
public:
    explicit NodeRuntime(NodeConfig cfg = NodeConfig())
        : cfg_(std::move(cfg)),
          core_(cfg_.node_id, static_cast<size_t>(cfg_.default_block)) {
        core_.set_router([this](FamilyDescriptor d) { return route_create(std::move(d)); });
        places_[kLocalNode] = Place::local();
        for (const auto &p : cfg_.places) {
            Place place = p.endpoint == kLocalNode
                              ? Place::local(p.resource, p.exclusive)
                              : Place::remote(p.endpoint, p.resource, p.exclusive);
            places_[p.name] = place;
            if (place.is_local() && place.exclusive) local_exclusive_.insert(place.resource_id);
        }
    }

    ~NodeRuntime();

    NodeRuntime(const NodeRuntime &) = delete;
    NodeRuntime &operator=(const NodeRuntime &) = delete;

    Runtime &core() noexcept { return core_; }
    const NodeConfig &config() const noexcept { return cfg_; }
    TimerService &timers() noexcept { return timers_; }

    RetryPolicy default_policy() const {
        RetryPolicy p;
        p.max_attempts = cfg_.retry_attempts;
        p.backoff_base = std::chrono::milliseconds(cfg_.retry_backoff_ms);
        p.backoff_mult = cfg_.retry_backoff_mult;
        p.connect_timeout = std::chrono::milliseconds(cfg_.connect_timeout_ms);
        return p;
    }

    // Registers a thread function; with a description function it becomes
    // distributable (creatable from remote nodes and on remote places).
    void register_thread_function(const std::string &name, FunctionEntry entry,
                                  DescribeFn describe = nullptr) {
        core_.register_function(name, std::move(entry));
        if (describe) {
            std::lock_guard<std::mutex> lk(desc_mu_);
            descs_[name] = std::move(describe);
        }
    }

    DescribeFn find_describe(const std::string &name) const {
        std::lock_guard<std::mutex> lk(desc_mu_);
        auto it = descs_.find(name);
        return it == descs_.end() ? nullptr : it->second;
    }

    bool distributable(const std::string &name) const { return find_describe(name) != nullptr; }

    void add_place(const std::string &name, Place place) {
        std::lock_guard<std::mutex> lk(place_mu_);
        places_[name] = std::move(place);
        const Place &p = places_[name];
        if (p.is_local() && p.exclusive) local_exclusive_.insert(p.resource_id);
    }

    Place resolve_place(const std::string &name) const {
        std::lock_guard<std::mutex> lk(place_mu_);
        auto it = places_.find(name);
        if (it == places_.end()) fail(Errc::unknown_place, name);
        return it->second;
    }

    bool local_exclusive(const std::string &resource) const {
        std::lock_guard<std::mutex> lk(place_mu_);
        return local_exclusive_.count(resource) != 0;
    }

    // Local place: direct create, no serialization, no bytes on any
    // transport. Remote place: delegation over the wire. The caller
    // cannot tell the handles apart.
    FamilyHandle route_create(FamilyDescriptor desc) {
        if (desc.place.is_local()) return core_.create(std::move(desc));
        return remote_create(std::move(desc),
                             RetryPolicy::one_shot(std::chrono::milliseconds(
                                 cfg_.connect_timeout_ms)));
    }

    FamilyHandle create_on(const std::string &place_name, const std::string &function,
                           RangeSpec range, std::vector<Value> shareds = {},
                           std::vector<Value> globals = {}) {
        FamilyDescriptor desc;
        desc.place = resolve_place(place_name);
        desc.range = range;
        desc.function = function;
        desc.shareds = std::move(shareds);
        desc.globals = std::move(globals);
        return route_create(std::move(desc));
    }

    // Delegation: describe + extract inputs, one Create frame, a record
    // that the connection's reader resolves on the matching Sync frame.
    // Returns after the frame is sent; the caller blocks only at sync.
    FamilyHandle remote_create(FamilyDescriptor desc, const RetryPolicy &policy) {
        auto entry = core_.find_function(desc.function);
        desc.range.thread_count();
        Runtime::validate_channels(entry->shared_types, desc.shareds, "shared");
        Runtime::validate_channels(entry->global_types, desc.globals, "global");
        for (const auto &v : desc.shareds)
            if (v.type() == TypeCode::bufref)
                fail(Errc::not_distributable,
                     "buffer references cannot travel on shared channels");
        DescribeFn dfn = find_describe(desc.function);
        if (!dfn)
            fail(Errc::not_distributable, desc.function + " has no description function");
        if (desc.fid.origin_node.empty()) desc.fid = core_.next_fid();

        auto args = build_args(desc.shareds, desc.globals);
        TransferSet ts = describe(dfn, args);
        std::vector<uint8_t> payload = extract_inputs(ts, args);
        auto rec =
            std::make_shared<RemoteFamilyRecord>(desc.fid, std::move(ts), std::move(args));

        std::shared_ptr<Connection> conn;
        try {
            conn = obtain_connection(desc.place.node_id, policy);
        } catch (const net::ConnectError &e) {
            rec->fail_transport(e.refused() ? FailureKind::connect_refused
                                            : FailureKind::connection_lost,
                                e.what());
            return rec;
        }
        rec->set_connection(conn);
        if (!conn->attach(rec)) {
            rec->fail_transport(FailureKind::connection_lost, "connection lost");
            return rec;
        }

        wire::CreateBody body;
        body.fid = desc.fid;
        body.function = desc.function;
        body.resource = desc.place.resource_id;
        body.exclusive = desc.place.exclusive;
        body.range = desc.range;
        body.shareds = desc.shareds;
        body.globals = desc.globals;
        body.input_payload = std::move(payload);
        try {
            conn->send(wire::WireMessage::make_create(std::move(body)));
        } catch (const std::exception &e) {
            rec->fail_transport(FailureKind::connection_lost, e.what());
            return rec;
        }

        if (policy.overall_deadline.count() > 0)
            timers_.schedule_in("deadline:" + desc.fid.str(), policy.overall_deadline,
                                [w = std::weak_ptr<RemoteFamilyRecord>(rec)] {
                                    if (auto r = w.lock()) r->resolve_timeout();
                                });
        return rec;
    }

    // Retried connection establishment per policy. Once the Create frame
    // is on the wire no re-execution happens here.
    FamilyHandle create_with_retry(FamilyDescriptor desc, const RetryPolicy &policy) {
        if (desc.place.is_local()) return core_.create(std::move(desc));
        return remote_create(std::move(desc), policy);
    }

    // Kills the family if it has not completed when the deadline expires;
    // the kill shows up in the sync status. Arming again replaces the
    // deadline; a finished family makes this a no-op.
    void arm_watchdog(const FamilyHandle &handle, std::chrono::milliseconds deadline) {
        timers_.schedule_in("watchdog:" + handle->fid().str(), deadline,
                            [w = std::weak_ptr<FamilyControl>(handle)] {
                                if (auto h = w.lock())
                                    if (!h->finished()) h->kill(KillReason::watchdog);
                            });
    }

    // Recovery: best-effort kill of the prior attempt, then the same
    // component on an alternate place. Inputs are re-serialized from the
    // caller's buffers as they are now.
    SyncResult restart_on(const Place &alternate, FamilyDescriptor desc,
                          const RetryPolicy &policy, const FamilyHandle &prior = nullptr) {
        if (prior) prior->kill();
        desc.place = alternate;
        desc.fid = FamilyId{};
        FamilyHandle h = create_with_retry(std::move(desc), policy);
        return h->sync();
    }

    void drop_connections() {
        std::lock_guard<std::mutex> lk(pool_mu_);
        for (auto &[ep, conn] : pool_) conn->close();
        pool_.clear();
    }

    void set_frame_observer(FrameObserver obs) {
        std::lock_guard<std::mutex> lk(obs_mu_);
        observer_ = std::move(obs);
    }

    void observe(const FrameEvent &ev) const {
        FrameObserver f;
        {
            std::lock_guard<std::mutex> lk(obs_mu_);
            f = observer_;
        }
        if (f) f(ev);
    }

    void start_server();
    void stop_server();
    net::Endpoint server_endpoint() const;

private:
    std::shared_ptr<Connection> obtain_connection(const std::string &endpoint,
                                                  const RetryPolicy &policy) {
        {
            std::lock_guard<std::mutex> lk(pool_mu_);
            auto it = pool_.find(endpoint);
            if (it != pool_.end() && it->second->alive()) return it->second;
        }
        FrameObserver obs;
        {
            std::lock_guard<std::mutex> lk(obs_mu_);
            obs = observer_;
        }
        auto conn = Connection::establish(endpoint, policy, std::move(obs));
        std::lock_guard<std::mutex> lk(pool_mu_);
        auto &slot = pool_[endpoint];
        if (slot && slot->alive()) {
            conn->close();
            return slot;
        }
        slot = conn;
        return conn;
    }

    NodeConfig cfg_;
    Runtime core_;
    TimerService timers_;

    mutable std::mutex desc_mu_;
    std::unordered_map<std::string, DescribeFn> descs_;

    mutable std::mutex place_mu_;
    std::unordered_map<std::string, Place> places_;
    std::unordered_set<std::string> local_exclusive_;

    std::mutex pool_mu_;
    std::unordered_map<std::string, std::shared_ptr<Connection>> pool_;

    mutable std::mutex obs_mu_;
    FrameObserver observer_;

    std::unique_ptr<NodeServer> server_;
};

// Daemon loop of a node: accepts connections, decodes Create and Kill
// frames, materializes inputs, runs families through the local core and
// answers each Create with exactly one Sync frame. Families from
// different connections execute concurrently; one bad peer never stops
// the daemon.
class NodeServer {
public:
    NodeServer(NodeRuntime &owner, const net::Endpoint &listen)
        : owner_(owner), listener_(listen) {}

    ~NodeServer() { stop(); }

    const net::Endpoint &local() const noexcept { return listener_.local(); }

    void start() {
        accept_thread_ = std::thread([this] { accept_loop(); });
    }

    void stop() {
        if (stopped_.exchange(true)) {
            if (accept_thread_.joinable()) accept_thread_.join();
            return;
        }
        listener_.stop();
        if (accept_thread_.joinable()) accept_thread_.join();
        {
            std::lock_guard<std::mutex> lk(peer_mu_);
            for (auto &weak : peers_)
                if (auto p = weak.lock()) p->sock.shutdown_both();
        }
        readers_.wait_zero();
        std::vector<FamilyHandle> live;
        {
            std::lock_guard<std::mutex> lk(inbound_mu_);
            stopping_ = true;
            for (auto &[fid, weak] : inbound_)
                if (auto h = weak.lock()) live.push_back(std::move(h));
        }
        for (auto &h : live) h->kill(KillReason::cascade);
        workers_.wait_zero();
    }

private:
    struct Peer {
        explicit Peer(net::Socket s) : sock(std::move(s)) {}
        net::Socket sock;
        std::mutex wmu;
    };

    void accept_loop() {
        for (;;) {
            std::optional<net::Socket> s;
            try {
                s = listener_.accept();
            } catch (const std::exception &e) {
                log_error("accept: %s", e.what());
                break;
            }
            if (!s) break;
            auto peer = std::make_shared<Peer>(std::move(*s));
            {
                std::lock_guard<std::mutex> lk(peer_mu_);
                peers_.push_back(peer);
            }
            readers_.inc();
            std::thread([this, peer] {
                serve_peer(peer);
                readers_.dec();
            }).detach();
        }
    }

    void serve_peer(const std::shared_ptr<Peer> &peer) {
        for (;;) {
            std::optional<wire::WireMessage> m;
            try {
                m = net::read_frame(peer->sock);
            } catch (const std::exception &e) {
                log_info("peer dropped: %s", e.what());
                break;
            }
            if (!m) break;
            owner_.observe(FrameEvent{FrameEvent::Dir::received, m->kind, m->fid(), "peer"});
            if (m->kind == wire::MsgKind::create) {
                workers_.inc();
                std::thread([this, peer, body = std::move(std::get<wire::CreateBody>(m->body))] {
                    run_inbound(peer, body);
                    workers_.dec();
                }).detach();
            } else if (m->kind == wire::MsgKind::kill) {
                owner_.core().kill_family(m->kill().fid); // unknown family: no-op
            } else {
                log_warn("peer sent an unexpected %s frame", wire::kind_name(m->kind));
                break;
            }
        }
        peer->sock.shutdown_both();
    }

    void run_inbound(const std::shared_ptr<Peer> &peer, const wire::CreateBody &b) {
        wire::SyncBody reply;
        reply.fid = b.fid;

        std::vector<Value> args;
        TransferSet ts;
        FamilyHandle handle;
        try {
            owner_.core().find_function(b.function);
            DescribeFn dfn = owner_.find_describe(b.function);
            if (!dfn)
                fail(Errc::not_distributable, b.function + " is not distributable on this node");
            args = build_args(b.shareds, b.globals);
            apply_inputs(b.input_payload, args);
            ts = describe(dfn, args);

            FamilyDescriptor desc;
            desc.fid = b.fid;
            desc.place = Place::local(b.resource,
                                      b.exclusive || owner_.local_exclusive(b.resource));
            desc.range = b.range;
            desc.function = b.function;
            desc.shareds.assign(args.begin(), args.begin() + b.shareds.size());
            desc.globals.assign(args.begin() + b.shareds.size(), args.end());
            handle = owner_.core().create(std::move(desc));
        } catch (const std::exception &e) {
            reply.status = FamilyStatus::failed;
            reply.detail = e.what();
            send_reply(peer, reply);
            return;
        }

        {
            std::lock_guard<std::mutex> lk(inbound_mu_);
            inbound_[b.fid] = handle;
            if (stopping_) handle->kill(KillReason::cascade);
        }

        SyncResult res = handle->sync();
        reply.status = res.status;
        reply.break_hit = res.break_hit;
        reply.detail = res.detail;
        if (res.completed()) {
            reply.final_shareds = res.final_shareds;
            try {
                reply.output_payload = extract_outputs(ts, args);
            } catch (const std::exception &e) {
                reply = wire::SyncBody{};
                reply.fid = b.fid;
                reply.status = FamilyStatus::failed;
                reply.detail = std::string("output extraction: ") + e.what();
            }
        }

        {
            std::lock_guard<std::mutex> lk(inbound_mu_);
            inbound_.erase(b.fid);
        }
        send_reply(peer, reply);
    }

    void send_reply(const std::shared_ptr<Peer> &peer, const wire::SyncBody &reply) {
        FamilyId fid = reply.fid;
        try {
            auto msg = wire::WireMessage::make_sync(reply);
            std::lock_guard<std::mutex> lk(peer->wmu);
            net::write_frame(peer->sock, msg);
        } catch (const std::exception &e) {
            log_info("sync for %s not delivered: %s", fid.str().c_str(), e.what());
            return;
        }
        owner_.observe(FrameEvent{FrameEvent::Dir::sent, wire::MsgKind::sync, fid, "peer"});
    }

    NodeRuntime &owner_;
    net::Listener listener_;
    std::thread accept_thread_;
    std::atomic<bool> stopped_{false};

    std::mutex peer_mu_;
    std::vector<std::weak_ptr<Peer>> peers_;

    detail::ActiveCounter readers_;
    detail::ActiveCounter workers_;

    std::mutex inbound_mu_;
    bool stopping_ = false;
    std::unordered_map<FamilyId, std::weak_ptr<FamilyControl>, FamilyIdHash> inbound_;
};

inline void NodeRuntime::start_server() {
    if (server_) fail(Errc::config, "server already running");
    if (cfg_.listen.empty()) fail(Errc::config, "no listen endpoint configured");
    server_ = std::make_unique<NodeServer>(*this, net::Endpoint::parse(cfg_.listen));
    server_->start();
    log_info("node %s listening on %s", cfg_.node_id.c_str(),
             server_->local().str().c_str());
}

inline void NodeRuntime::stop_server() {
    if (!server_) return;
    server_->stop();
    server_.reset();
}

inline net::Endpoint NodeRuntime::server_endpoint() const {
    if (!server_) fail(Errc::config, "server not running");
    return server_->local();
}

inline NodeRuntime::~NodeRuntime() {
    core_.kill_all();
    stop_server();
    drop_connections();
}

} // namespace dsvp
