#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "value.hpp"

namespace dsvp {

// Node address of the in-process runtime instance.
inline constexpr const char *kLocalNode = "local";

// Abstract resource identifier a family is bound to. node_id is either
// the local sentinel or a host:port endpoint of a node daemon.
// An exclusive place admits one executing family at a time; pending
// creates queue in arrival order at the place's node.
struct Place {
    std::string node_id = kLocalNode;
    std::string resource_id;
    bool exclusive = false;

    bool is_local() const { return node_id == kLocalNode; }

    static Place local(std::string resource = "", bool exclusive = false) {
        return Place{kLocalNode, std::move(resource), exclusive};
    }
    static Place remote(std::string endpoint, std::string resource = "", bool exclusive = false) {
        return Place{std::move(endpoint), std::move(resource), exclusive};
    }
};

// Index range of a family: threads get indices start, start+step, ...
// strictly below limit. block > 0 caps how many threads are activated
// at once; it is a scheduler hint and never changes results.
struct RangeSpec {
    int64_t start = 0;
    int64_t limit = 0;
    int64_t step = 1;
    int64_t block = 0;

    int64_t thread_count() const {
        if (step == 0) fail(Errc::invalid_range, "step must be nonzero");
        if (block < 0) fail(Errc::invalid_range, "block must be nonnegative");
        int64_t span = step > 0 ? limit - start : start - limit;
        int64_t mag = step > 0 ? step : -step;
        if (span <= 0) return 0;
        return (span + mag - 1) / mag;
    }

    int64_t index_at(int64_t position) const { return start + position * step; }
};

// Globally unique family identity: origin node plus a serial that only
// grows on that node.
struct FamilyId {
    std::string origin_node;
    uint64_t serial = 0;

    bool operator==(const FamilyId &o) const {
        return serial == o.serial && origin_node == o.origin_node;
    }
    std::string str() const { return origin_node + "/" + std::to_string(serial); }
};

struct FamilyIdHash {
    size_t operator()(const FamilyId &f) const {
        return std::hash<std::string>()(f.origin_node) ^ (std::hash<uint64_t>()(f.serial) << 1);
    }
};

// Full specification of one create.
struct FamilyDescriptor {
    FamilyId fid; // assigned by the runtime when left empty
    Place place;
    RangeSpec range;
    std::string function;
    std::vector<Value> globals;
    std::vector<Value> shareds;
};

enum class FamilyStatus : uint32_t {
    completed = 0,
    killed = 1,
    failed = 2,
    timed_out = 3,
};

inline const char *status_name(FamilyStatus s) {
    switch (s) {
    case FamilyStatus::completed: return "completed";
    case FamilyStatus::killed: return "killed";
    case FamilyStatus::failed: return "failed";
    case FamilyStatus::timed_out: return "timed-out";
    }
    return "?";
}

// Why a family did not complete. Every failed result carries exactly one;
// a watchdog kill is reported on a killed result.
enum class FailureKind : uint32_t {
    none = 0,
    connect_refused = 1,
    connection_lost = 2,
    timeout = 3,
    remote_error = 4,
    killed_by_watchdog = 5,
};

inline const char *failure_name(FailureKind k) {
    switch (k) {
    case FailureKind::none: return "none";
    case FailureKind::connect_refused: return "connect-refused";
    case FailureKind::connection_lost: return "connection-lost";
    case FailureKind::timeout: return "timeout";
    case FailureKind::remote_error: return "remote-error";
    case FailureKind::killed_by_watchdog: return "killed-by-watchdog";
    }
    return "?";
}

// Completion record of one family. final_shareds are meaningful only for
// status == completed; on anything else output data is undefined and
// outputs_applied stays false.
struct SyncResult {
    FamilyStatus status = FamilyStatus::completed;
    std::vector<Value> final_shareds;
    bool outputs_applied = false;
    FailureKind failure = FailureKind::none;
    bool break_hit = false;
    std::string detail;

    bool completed() const { return status == FamilyStatus::completed; }
};

} // namespace dsvp
