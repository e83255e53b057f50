#pragma once

#include <optional>

#include "expresso/zk/field.hpp"

namespace expresso::zk {

struct FqParams {
    static constexpr Limbs kModulus =
        limbs_from_hex("30644e72e131a029b85045b68181585d97816a916871ca8d3c208c16d87cfd47");
};

struct FrParams {
    static constexpr Limbs kModulus =
        limbs_from_hex("30644e72e131a029b85045b68181585d2833e84879b9709143e1f593f0000001");
};

/// Base field of the pairing curve.
using Fq = PrimeField<FqParams>;
/// Scalar field of the pairing curve; also the base field of the embedded Edwards curve.
using Fr = PrimeField<FrParams>;

/// Fq2 = Fq[u] / (u^2 + 1).
struct Fq2 {
    Fq c0, c1;

    static Fq2 zero() { return {}; }
    static Fq2 one() { return {Fq::one(), Fq::zero()}; }

    bool is_zero() const { return c0.is_zero() && c1.is_zero(); }
    friend bool operator==(const Fq2&, const Fq2&) = default;

    friend Fq2 operator+(const Fq2& a, const Fq2& b) { return {a.c0 + b.c0, a.c1 + b.c1}; }
    friend Fq2 operator-(const Fq2& a, const Fq2& b) { return {a.c0 - b.c0, a.c1 - b.c1}; }
    Fq2 operator-() const { return {-c0, -c1}; }
    Fq2& operator+=(const Fq2& o) { return *this = *this + o; }
    Fq2& operator-=(const Fq2& o) { return *this = *this - o; }
    Fq2& operator*=(const Fq2& o) { return *this = *this * o; }

    friend Fq2 operator*(const Fq2& a, const Fq2& b)
    {
        const Fq v0 = a.c0 * b.c0;
        const Fq v1 = a.c1 * b.c1;
        return {v0 - v1, (a.c0 + a.c1) * (b.c0 + b.c1) - v0 - v1};
    }
    Fq2 scale(const Fq& s) const { return {c0 * s, c1 * s}; }

    Fq2 square() const
    {
        const Fq ab = c0 * c1;
        return {(c0 + c1) * (c0 - c1), ab + ab};
    }
    Fq2 dbl() const { return {c0.dbl(), c1.dbl()}; }
    Fq2 conjugate() const { return {c0, -c1}; }

    Fq2 inverse() const
    {
        const Fq t = (c0.square() + c1.square()).inverse();
        return {c0 * t, -(c1 * t)};
    }

    /// Multiplication by the non-residue xi = 9 + u used to build Fq6.
    Fq2 mul_by_nonresidue() const
    {
        const Fq nine = Fq::from_u64(9);
        return {c0 * nine - c1, c1 * nine + c0};
    }

    Fq2 pow(const Limbs& e) const
    {
        Fq2 acc = one();
        for (std::size_t i = limbs_bit_length(e); i-- > 0;) {
            acc = acc.square();
            if (limbs_bit(e, i)) acc = acc * *this;
        }
        return acc;
    }

    Fq2 frobenius() const { return conjugate(); }

    bool is_lexicographically_largest() const
    {
        return c1.is_zero() ? c0.is_lexicographically_largest() : c1.is_lexicographically_largest();
    }

    std::optional<Fq2> sqrt() const;
};

/// Fq6 = Fq2[v] / (v^3 - xi).
struct Fq6 {
    Fq2 c0, c1, c2;

    static Fq6 zero() { return {}; }
    static Fq6 one() { return {Fq2::one(), Fq2::zero(), Fq2::zero()}; }
    bool is_zero() const { return c0.is_zero() && c1.is_zero() && c2.is_zero(); }
    friend bool operator==(const Fq6&, const Fq6&) = default;

    friend Fq6 operator+(const Fq6& a, const Fq6& b) { return {a.c0 + b.c0, a.c1 + b.c1, a.c2 + b.c2}; }
    friend Fq6 operator-(const Fq6& a, const Fq6& b) { return {a.c0 - b.c0, a.c1 - b.c1, a.c2 - b.c2}; }
    Fq6 operator-() const { return {-c0, -c1, -c2}; }

    friend Fq6 operator*(const Fq6& a, const Fq6& b)
    {
        const Fq2 v0 = a.c0 * b.c0;
        const Fq2 v1 = a.c1 * b.c1;
        const Fq2 v2 = a.c2 * b.c2;
        return {
            ((a.c1 + a.c2) * (b.c1 + b.c2) - v1 - v2).mul_by_nonresidue() + v0,
            (a.c0 + a.c1) * (b.c0 + b.c1) - v0 - v1 + v2.mul_by_nonresidue(),
            (a.c0 + a.c2) * (b.c0 + b.c2) - v0 - v2 + v1,
        };
    }
    Fq6 square() const { return *this * *this; }

    /// Multiplication by v.
    Fq6 mul_by_nonresidue() const { return {c2.mul_by_nonresidue(), c0, c1}; }

    Fq6 inverse() const
    {
        const Fq2 t0 = c0.square() - (c1 * c2).mul_by_nonresidue();
        const Fq2 t1 = c2.square().mul_by_nonresidue() - c0 * c1;
        const Fq2 t2 = c1.square() - c0 * c2;
        const Fq2 d = (c0 * t0 + (c2 * t1).mul_by_nonresidue() + (c1 * t2).mul_by_nonresidue()).inverse();
        return {t0 * d, t1 * d, t2 * d};
    }
};

/// Fq12 = Fq6[w] / (w^2 - v).
struct Fq12 {
    Fq6 c0, c1;

    static Fq12 one() { return {Fq6::one(), Fq6::zero()}; }
    bool is_one() const { return *this == one(); }
    friend bool operator==(const Fq12&, const Fq12&) = default;

    friend Fq12 operator*(const Fq12& a, const Fq12& b)
    {
        const Fq6 v0 = a.c0 * b.c0;
        const Fq6 v1 = a.c1 * b.c1;
        return {v0 + v1.mul_by_nonresidue(), (a.c0 + a.c1) * (b.c0 + b.c1) - v0 - v1};
    }
    Fq12& operator*=(const Fq12& o) { return *this = *this * o; }

    Fq12 square() const
    {
        const Fq6 ab = c0 * c1;
        const Fq6 t = (c0 + c1) * (c0 + c1.mul_by_nonresidue());
        return {t - ab - ab.mul_by_nonresidue(), ab + ab};
    }
    Fq12 conjugate() const { return {c0, -c1}; }
    Fq12 inverse() const
    {
        const Fq6 d = (c0.square() - c1.square().mul_by_nonresidue()).inverse();
        return {c0 * d, -(c1 * d)};
    }

    /// Raises to p^power for power in {1, 2, 3}.
    Fq12 frobenius(int power) const;

    Fq12 pow(std::span<const std::uint64_t> exponent_le) const;
};

}  // namespace expresso::zk
