#pragma once

#include <atomic>
#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <variant>
#include <vector>

#include "types.hpp"
#include "value.hpp"

namespace dsvp::wire {

inline constexpr uint32_t kMagic = 0x44535650; // "DSVP"
inline constexpr uint8_t kVersion = 1;
inline constexpr size_t kHeaderSize = 12;
inline constexpr uint32_t kMaxBody = 1u << 30;

enum class MsgKind : uint8_t { create = 1, sync = 2, kill = 3 };

inline const char *kind_name(MsgKind k) {
    switch (k) {
    case MsgKind::create: return "create";
    case MsgKind::sync: return "sync";
    case MsgKind::kill: return "kill";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Canonical integer byte order.
//
// Two interchangeable implementations produce network (big-endian) order:
// a portable shift/mask composition that works on any host, and a
// byte-swapping fast path keyed on the host's native order. Tests force
// each path and require byte-identical output; production uses host_swap.
// ---------------------------------------------------------------------------

enum class EncodePath { portable_shift, host_swap };

inline std::atomic<EncodePath> &encode_path() {
    static std::atomic<EncodePath> p{EncodePath::host_swap};
    return p;
}

inline void force_encode_path(EncodePath p) { encode_path().store(p); }

namespace detail {

inline void store_be32_shift(uint8_t *d, uint32_t v) {
    d[0] = uint8_t(v >> 24);
    d[1] = uint8_t(v >> 16);
    d[2] = uint8_t(v >> 8);
    d[3] = uint8_t(v);
}

inline void store_be64_shift(uint8_t *d, uint64_t v) {
    store_be32_shift(d, uint32_t(v >> 32));
    store_be32_shift(d + 4, uint32_t(v));
}

inline void store_be32_swap(uint8_t *d, uint32_t v) {
    if constexpr (std::endian::native == std::endian::little) v = __builtin_bswap32(v);
    std::memcpy(d, &v, 4);
}

inline void store_be64_swap(uint8_t *d, uint64_t v) {
    if constexpr (std::endian::native == std::endian::little) v = __builtin_bswap64(v);
    std::memcpy(d, &v, 8);
}

inline void store_be32(uint8_t *d, uint32_t v) {
    if (encode_path().load(std::memory_order_relaxed) == EncodePath::portable_shift)
        store_be32_shift(d, v);
    else
        store_be32_swap(d, v);
}

inline void store_be64(uint8_t *d, uint64_t v) {
    if (encode_path().load(std::memory_order_relaxed) == EncodePath::portable_shift)
        store_be64_shift(d, v);
    else
        store_be64_swap(d, v);
}

inline uint32_t load_be32(const uint8_t *d) {
    return (uint32_t(d[0]) << 24) | (uint32_t(d[1]) << 16) | (uint32_t(d[2]) << 8) | uint32_t(d[3]);
}

inline uint64_t load_be64(const uint8_t *d) {
    return (uint64_t(load_be32(d)) << 32) | load_be32(d + 4);
}

} // namespace detail

inline size_t padded4(size_t n) { return (n + 3) & ~size_t(3); }

// Append-only canonical encoder. Every field lands on a 4-byte boundary.
class Writer {
public:
    std::vector<uint8_t> &out() { return buf_; }
    std::vector<uint8_t> take() { return std::move(buf_); }
    size_t size() const { return buf_.size(); }

    void u32(uint32_t v) {
        size_t at = grow(4);
        detail::store_be32(&buf_[at], v);
    }
    void u64(uint64_t v) {
        size_t at = grow(8);
        detail::store_be64(&buf_[at], v);
    }
    void i32(int32_t v) { u32(static_cast<uint32_t>(v)); }
    void i64(int64_t v) { u64(static_cast<uint64_t>(v)); }
    void f32(float v) { u32(std::bit_cast<uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<uint64_t>(v)); }

    // Length-prefixed opaque bytes, zero-padded to a 4-byte boundary.
    void bytes(const uint8_t *p, size_t n) {
        if (n > kMaxBody) fail(Errc::codec, "byte string too long");
        u32(static_cast<uint32_t>(n));
        size_t at = grow(padded4(n));
        if (n) std::memcpy(&buf_[at], p, n);
    }
    void bytes(const std::vector<uint8_t> &b) { bytes(b.data(), b.size()); }
    void str(std::string_view s) { bytes(reinterpret_cast<const uint8_t *>(s.data()), s.size()); }

    // Overwrites a previously written u32 (for back-patched lengths).
    void patch_u32(size_t at, uint32_t v) { detail::store_be32(&buf_[at], v); }

private:
    size_t grow(size_t n) {
        size_t at = buf_.size();
        buf_.resize(at + n, 0);
        return at;
    }
    std::vector<uint8_t> buf_;
};

// Bounds-checked canonical decoder. Strict: nonzero padding is rejected
// and callers must consume input exactly.
class Reader {
public:
    Reader(const uint8_t *p, size_t n) : p_(p), n_(n) {}
    explicit Reader(const std::vector<uint8_t> &b) : Reader(b.data(), b.size()) {}

    size_t remaining() const { return n_ - at_; }
    size_t consumed() const { return at_; }
    bool done() const { return at_ == n_; }

    void expect_done() const {
        if (!done()) fail(Errc::codec, std::to_string(remaining()) + " trailing bytes");
    }

    uint32_t u32() { return detail::load_be32(need(4)); }
    uint64_t u64() { return detail::load_be64(need(8)); }
    int32_t i32() { return static_cast<int32_t>(u32()); }
    int64_t i64() { return static_cast<int64_t>(u64()); }
    float f32() { return std::bit_cast<float>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }

    std::vector<uint8_t> bytes() {
        uint32_t n = u32();
        if (n > remaining()) fail(Errc::codec, "byte string truncated");
        const uint8_t *p = need(padded4(n));
        for (size_t i = n; i < padded4(n); ++i)
            if (p[i] != 0) fail(Errc::codec, "nonzero padding");
        return std::vector<uint8_t>(p, p + n);
    }
    std::string str() {
        auto b = bytes();
        return std::string(b.begin(), b.end());
    }

    const uint8_t *need(size_t n) {
        if (n > remaining()) fail(Errc::codec, "truncated input");
        const uint8_t *p = p_ + at_;
        at_ += n;
        return p;
    }

private:
    const uint8_t *p_;
    size_t n_;
    size_t at_ = 0;
};

// ---------------------------------------------------------------------------
// Tagged values
// ---------------------------------------------------------------------------

// Canonical encoding of one tagged value: u32 type tag, then the payload.
// A bufref encodes as its shape (element tag + extent); contents travel
// separately in transfer payloads.
inline void encode_value(Writer &w, const Value &v) {
    w.u32(static_cast<uint32_t>(v.type()));
    switch (v.type()) {
    case TypeCode::none: fail(Errc::codec, "cannot encode empty value");
    case TypeCode::i32: w.i32(v.as_i32()); break;
    case TypeCode::i64: w.i64(v.as_i64()); break;
    case TypeCode::u32: w.u32(v.as_u32()); break;
    case TypeCode::u64: w.u64(v.as_u64()); break;
    case TypeCode::f32: w.f32(v.as_f32()); break;
    case TypeCode::f64: w.f64(v.as_f64()); break;
    case TypeCode::bytes: w.bytes(v.as_bytes()); break;
    case TypeCode::bufref:
        w.u32(static_cast<uint32_t>(v.buffer()->elem()));
        w.u64(v.buffer()->extent());
        break;
    }
}

inline std::vector<uint8_t> encode_value(const Value &v) {
    Writer w;
    encode_value(w, v);
    return w.take();
}

// Inverse of encode_value. Decoding a bufref materializes a fresh
// zero-filled buffer of the described shape.
inline Value decode_value(Reader &r) {
    auto tag = static_cast<TypeCode>(r.u32());
    switch (tag) {
    case TypeCode::i32: return Value::of_i32(r.i32());
    case TypeCode::i64: return Value::of_i64(r.i64());
    case TypeCode::u32: return Value::of_u32(r.u32());
    case TypeCode::u64: return Value::of_u64(r.u64());
    case TypeCode::f32: return Value::of_f32(r.f32());
    case TypeCode::f64: return Value::of_f64(r.f64());
    case TypeCode::bytes: return Value::of_bytes(r.bytes());
    case TypeCode::bufref: {
        auto elem = static_cast<TypeCode>(r.u32());
        uint64_t extent = r.u64();
        if (!is_scalar(elem)) fail(Errc::codec, "bufref with non-scalar element");
        if (extent > (uint64_t(1) << 32)) fail(Errc::codec, "bufref extent too large");
        return Value::of_buffer(Buffer::make(elem, static_cast<size_t>(extent)));
    }
    default: fail(Errc::codec, "unknown type tag " + std::to_string(static_cast<uint32_t>(tag)));
    }
}

inline Value decode_value(const std::vector<uint8_t> &b) {
    Reader r(b);
    Value v = decode_value(r);
    r.expect_done();
    return v;
}

// Canonical scalar element (no tag), used inside region payloads.
inline void encode_element(Writer &w, TypeCode t, const uint8_t *host) {
    switch (t) {
    case TypeCode::i32:
    case TypeCode::u32:
    case TypeCode::f32: {
        uint32_t v;
        std::memcpy(&v, host, 4);
        w.u32(v);
        break;
    }
    case TypeCode::i64:
    case TypeCode::u64:
    case TypeCode::f64: {
        uint64_t v;
        std::memcpy(&v, host, 8);
        w.u64(v);
        break;
    }
    default: fail(Errc::codec, "non-scalar element");
    }
}

inline void decode_element(Reader &r, TypeCode t, uint8_t *host) {
    switch (t) {
    case TypeCode::i32:
    case TypeCode::u32:
    case TypeCode::f32: {
        uint32_t v = r.u32();
        std::memcpy(host, &v, 4);
        break;
    }
    case TypeCode::i64:
    case TypeCode::u64:
    case TypeCode::f64: {
        uint64_t v = r.u64();
        std::memcpy(host, &v, 8);
        break;
    }
    default: fail(Errc::codec, "non-scalar element");
    }
}

// ---------------------------------------------------------------------------
// Messages
// ---------------------------------------------------------------------------

// Create: everything the target node needs to start the family, plus the
// encoded input payload produced by the data description machinery.
struct CreateBody {
    FamilyId fid;
    std::string function;
    std::string resource;
    bool exclusive = false;
    RangeSpec range;
    std::vector<Value> shareds;
    std::vector<Value> globals;
    std::vector<uint8_t> input_payload;
};

// Sync: completion report sent back by the executing node.
struct SyncBody {
    FamilyId fid;
    FamilyStatus status = FamilyStatus::completed;
    bool break_hit = false;
    std::string detail;
    std::vector<Value> final_shareds;
    std::vector<uint8_t> output_payload;
};

// Kill: just enough to identify the family; size independent of payloads.
struct KillBody {
    FamilyId fid;
};

struct WireMessage {
    MsgKind kind;
    std::variant<CreateBody, SyncBody, KillBody> body;

    const CreateBody &create() const { return std::get<CreateBody>(body); }
    const SyncBody &sync() const { return std::get<SyncBody>(body); }
    const KillBody &kill() const { return std::get<KillBody>(body); }

    const FamilyId &fid() const {
        switch (kind) {
        case MsgKind::create: return create().fid;
        case MsgKind::sync: return sync().fid;
        case MsgKind::kill: return kill().fid;
        }
        fail(Errc::protocol, "bad message kind");
    }

    static WireMessage make_create(CreateBody b) {
        return WireMessage{MsgKind::create, std::move(b)};
    }
    static WireMessage make_sync(SyncBody b) { return WireMessage{MsgKind::sync, std::move(b)}; }
    static WireMessage make_kill(FamilyId fid) {
        return WireMessage{MsgKind::kill, KillBody{std::move(fid)}};
    }
};

namespace detail {

inline void put_fid(Writer &w, const FamilyId &fid) {
    w.str(fid.origin_node);
    w.u64(fid.serial);
}

inline FamilyId get_fid(Reader &r) {
    FamilyId fid;
    fid.origin_node = r.str();
    fid.serial = r.u64();
    return fid;
}

inline void put_values(Writer &w, const std::vector<Value> &vs) {
    w.u32(static_cast<uint32_t>(vs.size()));
    for (const Value &v : vs) encode_value(w, v);
}

inline std::vector<Value> get_values(Reader &r) {
    uint32_t n = r.u32();
    if (n > 4096) fail(Errc::codec, "value list too long");
    std::vector<Value> vs;
    vs.reserve(n);
    for (uint32_t i = 0; i < n; ++i) vs.push_back(decode_value(r));
    return vs;
}

inline void put_payload(Writer &w, const std::vector<uint8_t> &p) {
    if (p.size() > kMaxBody) fail(Errc::codec, "payload too long");
    w.u32(static_cast<uint32_t>(p.size()));
    if (p.size() % 4 != 0) fail(Errc::codec, "payload not 4-byte aligned");
    w.out().insert(w.out().end(), p.begin(), p.end());
}

inline std::vector<uint8_t> get_payload(Reader &r) {
    uint32_t n = r.u32();
    if (n % 4 != 0) fail(Errc::codec, "payload length not 4-byte aligned");
    const uint8_t *p = r.need(n);
    return std::vector<uint8_t>(p, p + n);
}

} // namespace detail

inline std::vector<uint8_t> encode_body(const WireMessage &m) {
    Writer w;
    switch (m.kind) {
    case MsgKind::create: {
        const CreateBody &b = m.create();
        detail::put_fid(w, b.fid);
        w.str(b.function);
        w.str(b.resource);
        w.u32(b.exclusive ? 1 : 0);
        w.i64(b.range.start);
        w.i64(b.range.limit);
        w.i64(b.range.step);
        w.i64(b.range.block);
        detail::put_values(w, b.shareds);
        detail::put_values(w, b.globals);
        detail::put_payload(w, b.input_payload);
        break;
    }
    case MsgKind::sync: {
        const SyncBody &b = m.sync();
        detail::put_fid(w, b.fid);
        w.u32(static_cast<uint32_t>(b.status));
        w.u32(b.break_hit ? 1 : 0);
        w.str(b.detail);
        detail::put_values(w, b.final_shareds);
        detail::put_payload(w, b.output_payload);
        break;
    }
    case MsgKind::kill: detail::put_fid(w, m.kill().fid); break;
    }
    return w.take();
}

// Emits one complete frame: 12-byte header then the body.
inline std::vector<uint8_t> encode_message(const WireMessage &m) {
    std::vector<uint8_t> body = encode_body(m);
    if (body.size() > kMaxBody) fail(Errc::codec, "body exceeds frame limit");
    Writer w;
    w.u32(kMagic);
    uint32_t vk = (uint32_t(kVersion) << 24) | (uint32_t(m.kind) << 16);
    w.u32(vk); // version u8, kind u8, two reserved zero bytes
    w.u32(static_cast<uint32_t>(body.size()));
    w.out().insert(w.out().end(), body.begin(), body.end());
    return w.take();
}

struct FrameHeader {
    MsgKind kind;
    uint32_t body_len;
};

inline FrameHeader decode_header(const uint8_t *p) {
    Reader r(p, kHeaderSize);
    if (r.u32() != kMagic) fail(Errc::protocol, "bad magic");
    uint32_t vk = r.u32();
    uint8_t version = uint8_t(vk >> 24);
    uint8_t kind = uint8_t(vk >> 16);
    if ((vk & 0xFFFF) != 0) fail(Errc::protocol, "reserved header bytes nonzero");
    if (version != kVersion) fail(Errc::protocol, "unsupported version " + std::to_string(version));
    if (kind < 1 || kind > 3) fail(Errc::protocol, "unknown message kind " + std::to_string(kind));
    uint32_t len = r.u32();
    if (len > kMaxBody) fail(Errc::protocol, "body length too large");
    return FrameHeader{static_cast<MsgKind>(kind), len};
}

inline WireMessage decode_body(MsgKind kind, Reader &r) {
    WireMessage m;
    m.kind = kind;
    switch (kind) {
    case MsgKind::create: {
        CreateBody b;
        b.fid = detail::get_fid(r);
        b.function = r.str();
        b.resource = r.str();
        b.exclusive = r.u32() != 0;
        b.range.start = r.i64();
        b.range.limit = r.i64();
        b.range.step = r.i64();
        b.range.block = r.i64();
        b.shareds = detail::get_values(r);
        b.globals = detail::get_values(r);
        b.input_payload = detail::get_payload(r);
        m.body = std::move(b);
        break;
    }
    case MsgKind::sync: {
        SyncBody b;
        b.fid = detail::get_fid(r);
        uint32_t st = r.u32();
        if (st > 3) fail(Errc::protocol, "bad status code " + std::to_string(st));
        b.status = static_cast<FamilyStatus>(st);
        b.break_hit = r.u32() != 0;
        b.detail = r.str();
        b.final_shareds = detail::get_values(r);
        b.output_payload = detail::get_payload(r);
        m.body = std::move(b);
        break;
    }
    case MsgKind::kill: {
        KillBody b;
        b.fid = detail::get_fid(r);
        m.body = std::move(b);
        break;
    }
    }
    r.expect_done();
    return m;
}

// Parses one complete frame; the input must hold exactly one frame.
inline WireMessage decode_message(const uint8_t *p, size_t n) {
    if (n < kHeaderSize) fail(Errc::protocol, "short frame");
    FrameHeader h = decode_header(p);
    if (n != kHeaderSize + h.body_len) fail(Errc::protocol, "frame length mismatch");
    Reader r(p + kHeaderSize, h.body_len);
    return decode_body(h.kind, r);
}

inline WireMessage decode_message(const std::vector<uint8_t> &frame) {
    return decode_message(frame.data(), frame.size());
}

} // namespace dsvp::wire
