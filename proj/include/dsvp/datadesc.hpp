#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "error.hpp"
#include "value.hpp"
#include "wire.hpp"

namespace dsvp {

enum class Direction : uint8_t { input = 1, output = 2, inout = 3 };

inline const char *direction_name(Direction d) {
    switch (d) {
    case Direction::input: return "input";
    case Direction::output: return "output";
    case Direction::inout: return "inout";
    }
    return "?";
}

// One described memory region: elements [offset, offset+count) of the
// value in argument slot arg_slot. Scalars are whole-value regions with
// offset 0, count 1.
struct Region {
    uint32_t arg_slot = 0;
    uint64_t offset = 0;
    uint64_t count = 0;
    TypeCode elem = TypeCode::none;

    bool operator==(const Region &o) const {
        return arg_slot == o.arg_slot && offset == o.offset && count == o.count && elem == o.elem;
    }
    bool overlaps(const Region &o) const {
        return arg_slot == o.arg_slot && offset < o.offset + o.count && o.offset < offset + count;
    }
};

struct TransferDirective {
    Direction dir;
    Region region;

    bool operator==(const TransferDirective &o) const {
        return dir == o.dir && region == o.region;
    }
    bool is_input() const { return dir != Direction::output; }
    bool is_output() const { return dir != Direction::input; }
};

// The ordered directive list one description function produces.
// Immutable once built; no two directives may touch the same bytes
// (inout is the only sanctioned way to move a region both directions).
class TransferSet {
public:
    TransferSet() = default;
    explicit TransferSet(std::vector<TransferDirective> ds) : directives_(std::move(ds)) {}

    const std::vector<TransferDirective> &directives() const { return directives_; }
    bool operator==(const TransferSet &o) const { return directives_ == o.directives_; }

    size_t input_count() const {
        size_t n = 0;
        for (const auto &d : directives_) n += d.is_input();
        return n;
    }
    size_t output_count() const {
        size_t n = 0;
        for (const auto &d : directives_) n += d.is_output();
        return n;
    }

private:
    std::vector<TransferDirective> directives_;
};

// Evaluation context of a data description function. Exposes exactly the
// thread function's argument values (shareds first, then globals) and the
// input/output/inout statements; loops and conditionals around them are
// ordinary C++.
class DescribeContext {
public:
    explicit DescribeContext(const std::vector<Value> &args) : args_(args) {}

    const std::vector<Value> &args() const { return args_; }
    const Value &arg(size_t slot) const {
        if (slot >= args_.size()) fail(Errc::bad_region, "argument slot out of range");
        return args_[slot];
    }
    // Extent of a buffer-valued argument; description functions size
    // their loops from it.
    uint64_t extent(size_t slot) const { return arg(slot).buffer()->extent(); }

    void input(size_t slot) { add(Direction::input, whole(slot)); }
    void input(size_t slot, uint64_t offset, uint64_t count) {
        add(Direction::input, part(slot, offset, count));
    }
    void output(size_t slot) { add(Direction::output, whole(slot)); }
    void output(size_t slot, uint64_t offset, uint64_t count) {
        add(Direction::output, part(slot, offset, count));
    }
    void inout(size_t slot) { add(Direction::inout, whole(slot)); }
    void inout(size_t slot, uint64_t offset, uint64_t count) {
        add(Direction::inout, part(slot, offset, count));
    }

    TransferSet take() { return TransferSet(std::move(directives_)); }

private:
    Region whole(size_t slot) {
        const Value &v = arg(slot);
        if (v.type() == TypeCode::bufref)
            return Region{static_cast<uint32_t>(slot), 0, v.buffer()->extent(),
                          v.buffer()->elem()};
        if (is_scalar(v.type())) return Region{static_cast<uint32_t>(slot), 0, 1, v.type()};
        fail(Errc::bad_region,
             std::string("argument of type ") + type_name(v.type()) + " is not describable");
    }

    Region part(size_t slot, uint64_t offset, uint64_t count) {
        const Value &v = arg(slot);
        if (count < 1) fail(Errc::bad_region, "region count must be at least 1");
        if (v.type() == TypeCode::bufref) {
            v.buffer()->bounds(offset, count);
            return Region{static_cast<uint32_t>(slot), offset, count, v.buffer()->elem()};
        }
        if (is_scalar(v.type())) {
            if (offset != 0 || count != 1)
                fail(Errc::bad_region, "scalar argument only admits a whole-value region");
            return Region{static_cast<uint32_t>(slot), 0, 1, v.type()};
        }
        fail(Errc::bad_region,
             std::string("argument of type ") + type_name(v.type()) + " is not describable");
    }

    void add(Direction dir, Region region) {
        // Output data must land in caller-visible memory; by-value
        // scalars cannot be written back.
        if (dir != Direction::input && arg(region.arg_slot).type() != TypeCode::bufref)
            fail(Errc::bad_region, std::string(direction_name(dir)) +
                                       " requires a buffer-backed argument slot");
        for (const auto &d : directives_)
            if (d.region.overlaps(region))
                fail(Errc::region_overlap,
                     std::string(direction_name(dir)) + " region on slot " +
                         std::to_string(region.arg_slot) + " overlaps an earlier " +
                         direction_name(d.dir) + " region");
        directives_.push_back(TransferDirective{dir, region});
    }

    const std::vector<Value> &args_;
    std::vector<TransferDirective> directives_;
};

using DescribeFn = std::function<void(DescribeContext &)>;

// Evaluates a description function against concrete argument values.
// Deterministic: equal arguments yield an equal TransferSet.
inline TransferSet describe(const DescribeFn &fn, const std::vector<Value> &args) {
    if (!fn) fail(Errc::not_distributable, "no description function");
    DescribeContext ctx(args);
    fn(ctx);
    return ctx.take();
}

// The unified argument list a description function sees: shared-channel
// initials first, then globals.
inline std::vector<Value> build_args(const std::vector<Value> &shareds,
                                     const std::vector<Value> &globals) {
    std::vector<Value> args;
    args.reserve(shareds.size() + globals.size());
    args.insert(args.end(), shareds.begin(), shareds.end());
    args.insert(args.end(), globals.begin(), globals.end());
    return args;
}

namespace detail {

inline void extract_region(wire::Writer &w, const Region &r, const std::vector<Value> &args) {
    w.u32(r.arg_slot);
    w.u64(r.offset);
    w.u64(r.count);
    w.u32(static_cast<uint32_t>(r.elem));
    const Value &v = args.at(r.arg_slot);
    if (v.type() == TypeCode::bufref) {
        const Buffer &b = *v.buffer();
        b.bounds(r.offset, r.count);
        for (uint64_t i = 0; i < r.count; ++i)
            wire::encode_element(w, r.elem, b.at(static_cast<size_t>(r.offset + i)));
    } else {
        uint8_t host[8];
        v.store_host(host);
        wire::encode_element(w, r.elem, host);
    }
}

inline std::vector<uint8_t> extract(const TransferSet &ts, const std::vector<Value> &args,
                                    bool inputs) {
    wire::Writer w;
    for (const auto &d : ts.directives()) {
        if (inputs ? !d.is_input() : !d.is_output()) continue;
        if (d.region.arg_slot >= args.size()) fail(Errc::bad_region, "slot out of range");
        extract_region(w, d.region, args);
    }
    return w.take();
}

} // namespace detail

// Serializes every input/inout region, in directive order, into a
// self-describing payload of region records.
inline std::vector<uint8_t> extract_inputs(const TransferSet &ts,
                                           const std::vector<Value> &args) {
    return detail::extract(ts, args, true);
}

// Serializes every output/inout region from the completed environment.
inline std::vector<uint8_t> extract_outputs(const TransferSet &ts,
                                            const std::vector<Value> &args) {
    return detail::extract(ts, args, false);
}

// Materializes every region of a payload into the argument environment.
// Writes nothing outside the described regions; any malformation aborts
// before the first write of the offending region.
inline void apply_payload(const std::vector<uint8_t> &payload, std::vector<Value> &args) {
    wire::Reader r(payload);
    while (!r.done()) {
        Region reg;
        reg.arg_slot = r.u32();
        reg.offset = r.u64();
        reg.count = r.u64();
        reg.elem = static_cast<TypeCode>(r.u32());
        if (!is_scalar(reg.elem)) fail(Errc::bad_region, "region with non-scalar element type");
        if (reg.arg_slot >= args.size()) fail(Errc::bad_region, "region slot out of range");
        if (reg.count < 1) fail(Errc::bad_region, "region count must be at least 1");
        Value &v = args[reg.arg_slot];
        if (v.type() == TypeCode::bufref) {
            Buffer &b = *v.buffer();
            if (b.elem() != reg.elem)
                fail(Errc::type_mismatch, "region element type does not match buffer");
            if (reg.offset > b.extent() || reg.count > b.extent() - reg.offset)
                fail(Errc::region_extent, "region exceeds buffer extent");
            if (r.remaining() < reg.count * scalar_size(reg.elem))
                fail(Errc::codec, "truncated region payload");
            for (uint64_t i = 0; i < reg.count; ++i)
                wire::decode_element(r, reg.elem, b.at(static_cast<size_t>(reg.offset + i)));
        } else {
            if (v.type() != reg.elem)
                fail(Errc::type_mismatch, "region element type does not match scalar slot");
            if (reg.offset != 0 || reg.count != 1)
                fail(Errc::region_extent, "scalar slot only admits a whole-value region");
            uint8_t host[8];
            wire::decode_element(r, reg.elem, host);
            v = Value::load_host(reg.elem, host);
        }
    }
}

inline void apply_inputs(const std::vector<uint8_t> &payload, std::vector<Value> &args) {
    apply_payload(payload, args);
}

inline void apply_outputs(const std::vector<uint8_t> &payload, std::vector<Value> &args) {
    apply_payload(payload, args);
}

} // namespace dsvp
