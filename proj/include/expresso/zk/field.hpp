#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "expresso/zk/bigint.hpp"

namespace expresso::zk {

namespace detail {

constexpr std::uint64_t montgomery_inv(std::uint64_t m0)
{
    // Newton iteration for m0^-1 mod 2^64, then negate.
    std::uint64_t inv = 1;
    for (int i = 0; i < 7; ++i) inv *= 2 - m0 * inv;
    return ~inv + 1;
}

constexpr Limbs pow2_mod(const Limbs& m, int exponent)
{
    Limbs x{1, 0, 0, 0};
    for (int i = 0; i < exponent; ++i) {
        const std::uint64_t carry = limbs_add(x, x);
        if (carry != 0 || limbs_compare(x, m) >= 0) limbs_sub(x, m);
    }
    return x;
}

}  // namespace detail

/// Prime field element in Montgomery form over a modulus below 2^255.
///
/// `Params` provides `static constexpr Limbs kModulus`.
template <class Params>
class PrimeField {
public:
    static constexpr Limbs kModulus = Params::kModulus;
    static constexpr std::uint64_t kInv = detail::montgomery_inv(kModulus[0]);
    static constexpr Limbs kR = detail::pow2_mod(kModulus, 256);
    static constexpr Limbs kR2 = detail::pow2_mod(kModulus, 512);
    static constexpr Limbs kR3 = detail::pow2_mod(kModulus, 768);
    static constexpr std::size_t kBits = limbs_bit_length(kModulus);
    static constexpr std::size_t kBytes = 32;

    constexpr PrimeField() = default;

    static constexpr PrimeField zero() { return PrimeField{}; }
    static constexpr PrimeField one()
    {
        PrimeField r;
        r.mont_ = kR;
        return r;
    }

    static PrimeField from_u64(std::uint64_t v) { return from_canonical(Limbs{v, 0, 0, 0}); }
    static PrimeField from_i64(std::int64_t v)
    {
        return v >= 0 ? from_u64(static_cast<std::uint64_t>(v)) : -from_u64(static_cast<std::uint64_t>(-(v + 1)) + 1);
    }

    /// Requires `v < modulus`.
    static PrimeField from_canonical(const Limbs& v)
    {
        PrimeField r;
        r.mont_ = mont_mul(v, kR2);
        return r;
    }

    /// Reduces any 256-bit value modulo p.
    static PrimeField from_limbs_reduced(const Limbs& v) { return from_limbs_checked(v); }

    /// Reduces a 512-bit little-endian byte string modulo p.
    static PrimeField from_wide_bytes(std::span<const std::uint8_t, 64> bytes)
    {
        Limbs lo{}, hi{};
        for (int i = 0; i < 32; ++i) {
            lo[i / 8] |= static_cast<std::uint64_t>(bytes[i]) << (8 * (i % 8));
            hi[i / 8] |= static_cast<std::uint64_t>(bytes[32 + i]) << (8 * (i % 8));
        }
        while (limbs_compare(lo, kModulus) >= 0) limbs_sub(lo, kModulus);
        while (limbs_compare(hi, kModulus) >= 0) limbs_sub(hi, kModulus);
        PrimeField a, b;
        a.mont_ = mont_mul(lo, kR2);
        b.mont_ = mont_mul(hi, kR3);
        return a + b;
    }

    static PrimeField from_hex(std::string_view hex) { return from_limbs_checked(limbs_from_hex(hex)); }
    static PrimeField from_dec(std::string_view dec)
    {
        PrimeField acc = zero();
        const PrimeField ten = from_u64(10);
        for (char c : dec) {
            if (c < '0' || c > '9') continue;
            acc = acc * ten + from_u64(static_cast<std::uint64_t>(c - '0'));
        }
        return acc;
    }

    /// Canonical little-endian 32-byte encoding. Rejects values >= p.
    static std::optional<PrimeField> from_bytes(std::span<const std::uint8_t> bytes)
    {
        if (bytes.size() != kBytes) return std::nullopt;
        Limbs v{};
        for (std::size_t i = 0; i < 32; ++i) v[i / 8] |= static_cast<std::uint64_t>(bytes[i]) << (8 * (i % 8));
        if (limbs_compare(v, kModulus) >= 0) return std::nullopt;
        return from_canonical(v);
    }

    void to_bytes(std::span<std::uint8_t, 32> out) const
    {
        const Limbs v = to_canonical();
        for (std::size_t i = 0; i < 32; ++i) out[i] = static_cast<std::uint8_t>(v[i / 8] >> (8 * (i % 8)));
    }

    std::array<std::uint8_t, 32> to_bytes() const
    {
        std::array<std::uint8_t, 32> out{};
        to_bytes(std::span<std::uint8_t, 32>(out));
        return out;
    }

    Limbs to_canonical() const { return mont_mul(mont_, Limbs{1, 0, 0, 0}); }
    const Limbs& montgomery() const { return mont_; }

    std::string to_hex() const { return limbs_to_hex(to_canonical()); }
    std::string to_dec() const { return limbs_to_dec(to_canonical()); }

    bool is_zero() const { return limbs_is_zero(mont_); }
    bool is_one() const { return mont_ == kR; }

    /// True when the canonical value exceeds (p-1)/2; used as the sign bit in point compression.
    bool is_lexicographically_largest() const
    {
        Limbs half = kModulus;
        limbs_shr1(half);
        return limbs_compare(to_canonical(), half) > 0;
    }

    friend bool operator==(const PrimeField& a, const PrimeField& b) { return a.mont_ == b.mont_; }

    PrimeField& operator+=(const PrimeField& o)
    {
        limbs_add(mont_, o.mont_);
        reduce_once(mont_);
        return *this;
    }
    PrimeField& operator-=(const PrimeField& o)
    {
        if (limbs_sub(mont_, o.mont_) != 0) limbs_add(mont_, kModulus);
        return *this;
    }
    PrimeField& operator*=(const PrimeField& o)
    {
        mont_ = mont_mul(mont_, o.mont_);
        return *this;
    }

    friend PrimeField operator+(PrimeField a, const PrimeField& b) { return a += b; }
    friend PrimeField operator-(PrimeField a, const PrimeField& b) { return a -= b; }
    friend PrimeField operator*(PrimeField a, const PrimeField& b) { return a *= b; }
    PrimeField operator-() const
    {
        if (is_zero()) return *this;
        PrimeField r;
        r.mont_ = kModulus;
        limbs_sub(r.mont_, mont_);
        return r;
    }

    PrimeField square() const { return *this * *this; }
    PrimeField dbl() const { return *this + *this; }

    PrimeField pow(const Limbs& e) const
    {
        PrimeField acc = one();
        for (std::size_t i = limbs_bit_length(e); i-- > 0;) {
            acc = acc.square();
            if (limbs_bit(e, i)) acc *= *this;
        }
        return acc;
    }
    PrimeField pow(std::uint64_t e) const { return pow(Limbs{e, 0, 0, 0}); }

    /// Multiplicative inverse; the inverse of zero is zero.
    PrimeField inverse() const
    {
        Limbs e = kModulus;
        limbs_sub(e, Limbs{2, 0, 0, 0});
        return pow(e);
    }

    /// Legendre symbol: 1 for non-zero squares, -1 for non-squares, 0 for zero.
    int legendre() const
    {
        if (is_zero()) return 0;
        Limbs e = kModulus;
        limbs_shr1(e);
        const PrimeField r = pow(e);
        return r.is_one() ? 1 : -1;
    }

    /// Square root via Tonelli-Shanks; nullopt for non-residues.
    std::optional<PrimeField> sqrt() const
    {
        if (is_zero()) return zero();
        if (legendre() != 1) return std::nullopt;
        // p - 1 = q * 2^s with q odd
        Limbs q = kModulus;
        limbs_sub(q, Limbs{1, 0, 0, 0});
        std::size_t s = 0;
        while ((q[0] & 1) == 0) {
            limbs_shr1(q);
            ++s;
        }
        if (s == 1) {
            Limbs e = kModulus;
            limbs_add(e, Limbs{1, 0, 0, 0});
            limbs_shr1(e);
            limbs_shr1(e);
            return pow(e);
        }
        PrimeField z = from_u64(2);
        while (z.legendre() != -1) z += one();
        PrimeField c = z.pow(q);
        Limbs q1 = q;
        limbs_add(q1, Limbs{1, 0, 0, 0});
        limbs_shr1(q1);
        PrimeField x = pow(q1);
        PrimeField t = pow(q);
        std::size_t m = s;
        while (!t.is_one()) {
            std::size_t i = 0;
            PrimeField tt = t;
            while (!tt.is_one()) {
                tt = tt.square();
                ++i;
            }
            PrimeField b = c;
            for (std::size_t j = 0; j + i + 1 < m; ++j) b = b.square();
            x *= b;
            c = b.square();
            t *= c;
            m = i;
        }
        return x;
    }

private:
    static PrimeField from_limbs_checked(const Limbs& v)
    {
        Limbs r = v;
        while (limbs_compare(r, kModulus) >= 0) limbs_sub(r, kModulus);
        return from_canonical(r);
    }

    static_assert(Params::kModulus[3] < (1ULL << 62), "no-carry Montgomery requires a modulus below 2^254");

    static void reduce_once(Limbs& r)
    {
        // branch-light conditional subtraction of the modulus
        Limbs s = r;
        if (limbs_sub(s, kModulus) == 0) r = s;
    }

    static Limbs mont_mul(const Limbs& a, const Limbs& b)
    {
        // CIOS without the final carry word; valid because the top limb of p leaves two spare bits.
        std::uint64_t t0 = 0, t1 = 0, t2 = 0, t3 = 0;
        for (int i = 0; i < 4; ++i) {
            const std::uint64_t bi = b[i];
            u128 acc = static_cast<u128>(a[0]) * bi + t0;
            t0 = static_cast<std::uint64_t>(acc);
            std::uint64_t hi_a = static_cast<std::uint64_t>(acc >> 64);
            const std::uint64_t m = t0 * kInv;
            u128 red = static_cast<u128>(m) * kModulus[0] + t0;
            std::uint64_t hi_c = static_cast<std::uint64_t>(red >> 64);

            acc = static_cast<u128>(a[1]) * bi + t1 + hi_a;
            hi_a = static_cast<std::uint64_t>(acc >> 64);
            red = static_cast<u128>(m) * kModulus[1] + static_cast<std::uint64_t>(acc) + hi_c;
            t0 = static_cast<std::uint64_t>(red);
            hi_c = static_cast<std::uint64_t>(red >> 64);

            acc = static_cast<u128>(a[2]) * bi + t2 + hi_a;
            hi_a = static_cast<std::uint64_t>(acc >> 64);
            red = static_cast<u128>(m) * kModulus[2] + static_cast<std::uint64_t>(acc) + hi_c;
            t1 = static_cast<std::uint64_t>(red);
            hi_c = static_cast<std::uint64_t>(red >> 64);

            acc = static_cast<u128>(a[3]) * bi + t3 + hi_a;
            hi_a = static_cast<std::uint64_t>(acc >> 64);
            red = static_cast<u128>(m) * kModulus[3] + static_cast<std::uint64_t>(acc) + hi_c;
            t2 = static_cast<std::uint64_t>(red);
            hi_c = static_cast<std::uint64_t>(red >> 64);

            t3 = hi_c + hi_a;
        }
        Limbs r{t0, t1, t2, t3};
        reduce_once(r);
        return r;
    }

    Limbs mont_{};
};

/// Montgomery's trick: inverts every non-zero element in place with one field inversion.
template <class F>
void batch_inverse(std::span<F> values)
{
    std::vector<F> prefix(values.size());
    F acc = F::one();
    for (std::size_t i = 0; i < values.size(); ++i) {
        prefix[i] = acc;
        if (!values[i].is_zero()) acc *= values[i];
    }
    F inv = acc.inverse();
    for (std::size_t i = values.size(); i-- > 0;) {
        if (values[i].is_zero()) continue;
        const F v = values[i];
        values[i] = inv * prefix[i];
        inv *= v;
    }
}

}  // namespace expresso::zk
