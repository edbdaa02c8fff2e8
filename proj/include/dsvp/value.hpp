#pragma once

#include <cstdint>
#include <cstring>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "error.hpp"

namespace dsvp {

// Registry of distributable types. Scalars have a fixed canonical size;
// `bytes` is length-prefixed; `bufref` is a reference to a typed element
// buffer (the reference itself travels, contents travel via transfer sets).
enum class TypeCode : uint32_t {
    none = 0,
    i32 = 1,
    i64 = 2,
    u32 = 3,
    u64 = 4,
    f32 = 5,
    f64 = 6,
    bytes = 7,
    bufref = 8,
};

inline const char *type_name(TypeCode t) {
    switch (t) {
    case TypeCode::none: return "none";
    case TypeCode::i32: return "i32";
    case TypeCode::i64: return "i64";
    case TypeCode::u32: return "u32";
    case TypeCode::u64: return "u64";
    case TypeCode::f32: return "f32";
    case TypeCode::f64: return "f64";
    case TypeCode::bytes: return "bytes";
    case TypeCode::bufref: return "bufref";
    }
    return "invalid";
}

inline bool is_scalar(TypeCode t) {
    switch (t) {
    case TypeCode::i32:
    case TypeCode::i64:
    case TypeCode::u32:
    case TypeCode::u64:
    case TypeCode::f32:
    case TypeCode::f64: return true;
    default: return false;
    }
}

inline size_t scalar_size(TypeCode t) {
    switch (t) {
    case TypeCode::i32:
    case TypeCode::u32:
    case TypeCode::f32: return 4;
    case TypeCode::i64:
    case TypeCode::u64:
    case TypeCode::f64: return 8;
    default: fail(Errc::codec, std::string("not a scalar type: ") + type_name(t));
    }
}

class Buffer;
using BufferPtr = std::shared_ptr<Buffer>;

// A typed element array in node-local memory. Either owns its storage
// (remote-side materialization) or aliases caller memory (zero-copy on
// the creating side). Elements are host-representation scalars; the wire
// codec handles canonical byte order.
class Buffer {
public:
    Buffer(TypeCode elem, size_t extent)
        : elem_(elem), extent_(extent), owned_(extent * check_elem(elem)), data_(owned_.data()) {}

    static BufferPtr make(TypeCode elem, size_t extent) {
        return std::make_shared<Buffer>(elem, extent);
    }

    // Wraps caller-owned memory of `extent` elements. The caller keeps the
    // memory alive for the lifetime of every family that can reach it.
    static BufferPtr alias(TypeCode elem, void *data, size_t extent) {
        check_elem(elem);
        auto b = std::make_shared<Buffer>(Buffer());
        b->elem_ = elem;
        b->extent_ = extent;
        b->data_ = static_cast<uint8_t *>(data);
        return b;
    }

    TypeCode elem() const noexcept { return elem_; }
    size_t extent() const noexcept { return extent_; }
    size_t elem_size() const { return scalar_size(elem_); }
    size_t size_bytes() const { return extent_ * elem_size(); }

    uint8_t *data() noexcept { return data_; }
    const uint8_t *data() const noexcept { return data_; }

    uint8_t *at(size_t index) {
        bounds(index, 1);
        return data_ + index * elem_size();
    }
    const uint8_t *at(size_t index) const {
        bounds(index, 1);
        return data_ + index * elem_size();
    }

    void bounds(size_t offset, size_t count) const {
        if (offset > extent_ || count > extent_ - offset)
            fail(Errc::region_extent, "access [" + std::to_string(offset) + "," +
                                          std::to_string(offset + count) + ") exceeds extent " +
                                          std::to_string(extent_));
    }

    template <typename T> T get(size_t index) const {
        static_assert(std::is_trivially_copyable_v<T>);
        if (sizeof(T) != elem_size()) fail(Errc::type_mismatch, "element width mismatch");
        T v;
        std::memcpy(&v, at(index), sizeof(T));
        return v;
    }
    template <typename T> void set(size_t index, T v) {
        static_assert(std::is_trivially_copyable_v<T>);
        if (sizeof(T) != elem_size()) fail(Errc::type_mismatch, "element width mismatch");
        std::memcpy(at(index), &v, sizeof(T));
    }

    int64_t get_i64(size_t i) const { return get<int64_t>(i); }
    void set_i64(size_t i, int64_t v) { set(i, v); }
    uint64_t get_u64(size_t i) const { return get<uint64_t>(i); }
    void set_u64(size_t i, uint64_t v) { set(i, v); }
    double get_f64(size_t i) const { return get<double>(i); }
    void set_f64(size_t i, double v) { set(i, v); }

    bool bit_equal(const Buffer &o) const {
        return elem_ == o.elem_ && extent_ == o.extent_ &&
               (extent_ == 0 || std::memcmp(data_, o.data_, size_bytes()) == 0);
    }

private:
    Buffer() = default;

    static size_t check_elem(TypeCode t) { return scalar_size(t); }

    TypeCode elem_ = TypeCode::none;
    size_t extent_ = 0;
    std::vector<uint8_t> owned_;
    uint8_t *data_ = nullptr;
};

// One typed payload as carried by channels, descriptors and the codec.
// monostate marks "no value" (e.g. a shared channel nobody wrote).
class Value {
public:
    using Bytes = std::vector<uint8_t>;

    Value() = default;

    static Value of_i32(int32_t v) { return Value(v); }
    static Value of_i64(int64_t v) { return Value(v); }
    static Value of_u32(uint32_t v) { return Value(v); }
    static Value of_u64(uint64_t v) { return Value(v); }
    static Value of_f32(float v) { return Value(v); }
    static Value of_f64(double v) { return Value(v); }
    static Value of_bytes(Bytes b) { return Value(std::move(b)); }
    static Value of_string(std::string_view s) {
        return Value(Bytes(s.begin(), s.end()));
    }
    static Value of_buffer(BufferPtr b) {
        if (!b) fail(Errc::type_mismatch, "null buffer");
        return Value(std::move(b));
    }

    TypeCode type() const noexcept { return static_cast<TypeCode>(v_.index()); }
    bool empty() const noexcept { return v_.index() == 0; }

    int32_t as_i32() const { return pick<int32_t>(TypeCode::i32); }
    int64_t as_i64() const { return pick<int64_t>(TypeCode::i64); }
    uint32_t as_u32() const { return pick<uint32_t>(TypeCode::u32); }
    uint64_t as_u64() const { return pick<uint64_t>(TypeCode::u64); }
    float as_f32() const { return pick<float>(TypeCode::f32); }
    double as_f64() const { return pick<double>(TypeCode::f64); }
    const Bytes &as_bytes() const { return pickref<Bytes>(TypeCode::bytes); }
    std::string as_string() const {
        const Bytes &b = as_bytes();
        return std::string(b.begin(), b.end());
    }
    const BufferPtr &buffer() const { return pickref<BufferPtr>(TypeCode::bufref); }

    // Reads the scalar payload from its host representation.
    void store_host(uint8_t *dst) const {
        std::visit(
            [&](auto &&x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_arithmetic_v<T>)
                    std::memcpy(dst, &x, sizeof(T));
                else
                    fail(Errc::type_mismatch, "not a scalar value");
            },
            v_);
    }

    static Value load_host(TypeCode t, const uint8_t *src) {
        switch (t) {
        case TypeCode::i32: return of_i32(load<int32_t>(src));
        case TypeCode::i64: return of_i64(load<int64_t>(src));
        case TypeCode::u32: return of_u32(load<uint32_t>(src));
        case TypeCode::u64: return of_u64(load<uint64_t>(src));
        case TypeCode::f32: return of_f32(load<float>(src));
        case TypeCode::f64: return of_f64(load<double>(src));
        default: fail(Errc::type_mismatch, std::string("not a scalar type: ") + type_name(t));
        }
    }

    // Bit-for-bit equality; buffers compare deep (type, extent, contents).
    bool bit_equal(const Value &o) const {
        if (type() != o.type()) return false;
        switch (type()) {
        case TypeCode::none: return true;
        case TypeCode::i32: return as_i32() == o.as_i32();
        case TypeCode::i64: return as_i64() == o.as_i64();
        case TypeCode::u32: return as_u32() == o.as_u32();
        case TypeCode::u64: return as_u64() == o.as_u64();
        case TypeCode::f32: {
            uint32_t a, b;
            std::memcpy(&a, &std::get<float>(v_), 4);
            std::memcpy(&b, &std::get<float>(o.v_), 4);
            return a == b;
        }
        case TypeCode::f64: {
            uint64_t a, b;
            std::memcpy(&a, &std::get<double>(v_), 8);
            std::memcpy(&b, &std::get<double>(o.v_), 8);
            return a == b;
        }
        case TypeCode::bytes: return as_bytes() == o.as_bytes();
        case TypeCode::bufref: return buffer()->bit_equal(*o.buffer());
        }
        return false;
    }

    std::string repr() const {
        switch (type()) {
        case TypeCode::none: return "none";
        case TypeCode::i32: return "i32:" + std::to_string(as_i32());
        case TypeCode::i64: return "i64:" + std::to_string(as_i64());
        case TypeCode::u32: return "u32:" + std::to_string(as_u32());
        case TypeCode::u64: return "u64:" + std::to_string(as_u64());
        case TypeCode::f32: return "f32:" + std::to_string(as_f32());
        case TypeCode::f64: return "f64:" + std::to_string(as_f64());
        case TypeCode::bytes: return "bytes[" + std::to_string(as_bytes().size()) + "]";
        case TypeCode::bufref:
            return std::string("bufref<") + type_name(buffer()->elem()) + ">[" +
                   std::to_string(buffer()->extent()) + "]";
        }
        return "?";
    }

private:
    template <typename T> explicit Value(T v) : v_(std::move(v)) {}

    template <typename T> T pick(TypeCode want) const {
        if (type() != want)
            fail(Errc::type_mismatch,
                 std::string("have ") + type_name(type()) + ", want " + type_name(want));
        return std::get<T>(v_);
    }
    template <typename T> const T &pickref(TypeCode want) const {
        if (type() != want)
            fail(Errc::type_mismatch,
                 std::string("have ") + type_name(type()) + ", want " + type_name(want));
        return std::get<T>(v_);
    }

    template <typename T> static T load(const uint8_t *src) {
        T v;
        std::memcpy(&v, src, sizeof(T));
        return v;
    }

    // Variant index == TypeCode value; keep the orders in sync.
    std::variant<std::monostate, int32_t, int64_t, uint32_t, uint64_t, float, double, Bytes,
                 BufferPtr>
        v_;
};

} // namespace dsvp
