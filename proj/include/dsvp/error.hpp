#pragma once

#include <stdexcept>
#include <string>

namespace dsvp {

enum class Errc {
    unknown_function,
    duplicate_function,
    invalid_range,
    type_mismatch,
    bad_channel,
    write_once_violation,
    double_sync,
    outside_family,
    sequential_deadlock,
    unknown_place,
    not_distributable,
    region_overlap,
    region_extent,
    bad_region,
    codec,
    protocol,
    config,
    io,
};

inline const char *errc_name(Errc c) {
    switch (c) {
    case Errc::unknown_function: return "unknown-function";
    case Errc::duplicate_function: return "duplicate-function";
    case Errc::invalid_range: return "invalid-range";
    case Errc::type_mismatch: return "type-mismatch";
    case Errc::bad_channel: return "bad-channel";
    case Errc::write_once_violation: return "write-once-violation";
    case Errc::double_sync: return "double-sync";
    case Errc::outside_family: return "outside-family";
    case Errc::sequential_deadlock: return "sequential-deadlock";
    case Errc::unknown_place: return "unknown-place";
    case Errc::not_distributable: return "not-distributable";
    case Errc::region_overlap: return "region-overlap";
    case Errc::region_extent: return "region-extent";
    case Errc::bad_region: return "bad-region";
    case Errc::codec: return "codec";
    case Errc::protocol: return "protocol";
    case Errc::config: return "config";
    case Errc::io: return "io";
    }
    return "unknown";
}

class SvpError : public std::runtime_error {
public:
    SvpError(Errc code, const std::string &what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string &what) {
    throw SvpError(code, what);
}

// Thrown by cancellation points when the enclosing family is killed.
// Not derived from std::exception so ordinary handlers in thread
// functions do not swallow it by accident.
struct ThreadUnwind {};

} // namespace dsvp
