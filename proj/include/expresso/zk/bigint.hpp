#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace expresso::zk {

/// Little-endian 256-bit unsigned integer; limb 0 is least significant.
using Limbs = std::array<std::uint64_t, 4>;

using u128 = unsigned __int128;

constexpr int hex_digit(char c)
{
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

/// Parses a big-endian hex literal (optional 0x prefix) into limbs.
constexpr Limbs limbs_from_hex(std::string_view hex)
{
    if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) hex.remove_prefix(2);
    Limbs out{};
    int bit = 0;
    for (auto it = hex.rbegin(); it != hex.rend(); ++it) {
        const int d = hex_digit(*it);
        if (d < 0) continue;
        out[bit / 64] |= static_cast<std::uint64_t>(d) << (bit % 64);
        bit += 4;
    }
    return out;
}

constexpr bool limbs_is_zero(const Limbs& a)
{
    return (a[0] | a[1] | a[2] | a[3]) == 0;
}

/// Returns -1, 0, 1.
constexpr int limbs_compare(const Limbs& a, const Limbs& b)
{
    for (int i = 3; i >= 0; --i) {
        if (a[i] < b[i]) return -1;
        if (a[i] > b[i]) return 1;
    }
    return 0;
}

/// a += b, returns carry.
constexpr std::uint64_t limbs_add(Limbs& a, const Limbs& b)
{
    std::uint64_t carry = 0;
    for (int i = 0; i < 4; ++i) {
        const u128 t = static_cast<u128>(a[i]) + b[i] + carry;
        a[i] = static_cast<std::uint64_t>(t);
        carry = static_cast<std::uint64_t>(t >> 64);
    }
    return carry;
}

/// a -= b, returns borrow.
constexpr std::uint64_t limbs_sub(Limbs& a, const Limbs& b)
{
    std::uint64_t borrow = 0;
    for (int i = 0; i < 4; ++i) {
        const u128 t = static_cast<u128>(a[i]) - b[i] - borrow;
        a[i] = static_cast<std::uint64_t>(t);
        borrow = static_cast<std::uint64_t>(t >> 64) & 1;
    }
    return borrow;
}

constexpr void limbs_shr1(Limbs& a)
{
    for (int i = 0; i < 3; ++i) a[i] = (a[i] >> 1) | (a[i + 1] << 63);
    a[3] >>= 1;
}

constexpr bool limbs_bit(const Limbs& a, std::size_t i)
{
    return i < 256 && ((a[i / 64] >> (i % 64)) & 1) != 0;
}

constexpr std::size_t limbs_bit_length(const Limbs& a)
{
    for (int i = 3; i >= 0; --i) {
        if (a[i] != 0) return static_cast<std::size_t>(i) * 64 + 64 - static_cast<std::size_t>(__builtin_clzll(a[i]));
    }
    return 0;
}

/// a / small, returns remainder.
constexpr std::uint64_t limbs_div_small(Limbs& a, std::uint64_t d)
{
    u128 rem = 0;
    for (int i = 3; i >= 0; --i) {
        const u128 cur = (rem << 64) | a[i];
        a[i] = static_cast<std::uint64_t>(cur / d);
        rem = cur % d;
    }
    return static_cast<std::uint64_t>(rem);
}

std::string limbs_to_hex(const Limbs& a);
std::string limbs_to_dec(Limbs a);

}  // namespace expresso::zk
