#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "expresso/util/error.hpp"

namespace expresso {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// SHA-256 output.
using Digest = std::array<std::uint8_t, 32>;

std::string to_hex(ByteView bytes);
Bytes from_hex(std::string_view hex);

std::string base64url_encode(ByteView bytes);
Bytes base64url_decode(std::string_view text);

inline ByteView as_bytes(std::string_view s)
{
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

/// Append-only little-endian encoder for the binary wire formats.
class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v)
    {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v)
    {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void raw(ByteView bytes) { buf_.insert(buf_.end(), bytes.begin(), bytes.end()); }
    /// u32 length prefix followed by the bytes.
    void blob(ByteView bytes)
    {
        u32(static_cast<std::uint32_t>(bytes.size()));
        raw(bytes);
    }
    void str(std::string_view s) { blob(as_bytes(s)); }

    const Bytes& bytes() const& { return buf_; }
    Bytes take() && { return std::move(buf_); }
    std::size_t size() const { return buf_.size(); }

private:
    Bytes buf_;
};

/// Bounds-checked decoder; every overrun raises MalformedEncoding.
class ByteReader {
public:
    explicit ByteReader(ByteView data) : data_(data) {}

    std::uint8_t u8() { return take(1)[0]; }
    std::uint32_t u32()
    {
        const auto b = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
        return v;
    }
    std::uint64_t u64()
    {
        const auto b = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        return v;
    }
    ByteView raw(std::size_t n) { return take(n); }
    ByteView blob() { return take(u32()); }
    std::string str()
    {
        const auto b = blob();
        return {b.begin(), b.end()};
    }
    /// Reads a u32 element count and rejects counts that cannot fit in the remaining input.
    std::size_t count(std::size_t min_element_size)
    {
        const std::size_t n = u32();
        if (min_element_size != 0 && n > remaining() / min_element_size) {
            throw Error(Errc::MalformedEncoding, "element count exceeds input");
        }
        return n;
    }

    std::size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return pos_ == data_.size(); }
    void expect_done() const
    {
        if (!done()) throw Error(Errc::MalformedEncoding, "trailing bytes");
    }

private:
    ByteView take(std::size_t n)
    {
        if (n > remaining()) throw Error(Errc::MalformedEncoding, "unexpected end of input");
        const ByteView out = data_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

    ByteView data_;
    std::size_t pos_ = 0;
};

}  // namespace expresso
