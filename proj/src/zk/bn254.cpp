#include "expresso/zk/bn254.hpp"

#include <algorithm>
#include <array>

#include "expresso/zk/curve.hpp"

namespace expresso::zk {

std::string limbs_to_hex(const Limbs& a)
{
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    for (int i = 3; i >= 0; --i) {
        for (int s = 60; s >= 0; s -= 4) out.push_back(kDigits[(a[i] >> s) & 0xF]);
    }
    const auto first = out.find_first_not_of('0');
    return first == std::string::npos ? "0" : out.substr(first);
}

std::string limbs_to_dec(Limbs a)
{
    if (limbs_is_zero(a)) return "0";
    std::string out;
    while (!limbs_is_zero(a)) out.push_back(static_cast<char>('0' + limbs_div_small(a, 10)));
    std::reverse(out.begin(), out.end());
    return out;
}

namespace {

Limbs p_minus(std::uint64_t k)
{
    Limbs e = Fq::kModulus;
    limbs_sub(e, Limbs{k, 0, 0, 0});
    return e;
}

/// xi^(i (p-1)/6) for i = 0..5, the Frobenius coefficients of the w-basis.
const std::array<Fq2, 6>& frobenius_coeffs()
{
    static const std::array<Fq2, 6> coeffs = [] {
        Limbs e = p_minus(1);
        limbs_div_small(e, 6);
        const Fq2 xi{Fq::from_u64(9), Fq::one()};
        const Fq2 g = xi.pow(e);
        std::array<Fq2, 6> out{};
        out[0] = Fq2::one();
        for (int i = 1; i < 6; ++i) out[i] = out[i - 1] * g;
        return out;
    }();
    return coeffs;
}

}  // namespace

std::optional<Fq2> Fq2::sqrt() const
{
    if (is_zero()) return zero();
    Limbs e1 = p_minus(3);
    limbs_shr1(e1);
    limbs_shr1(e1);
    const Fq2 a1 = pow(e1);
    const Fq2 alpha = a1 * (a1 * *this);
    const Fq2 a0 = alpha.conjugate() * alpha;
    const Fq2 minus_one{-Fq::one(), Fq::zero()};
    if (a0 == minus_one) return std::nullopt;
    const Fq2 x0 = a1 * *this;
    Fq2 x;
    if (alpha == minus_one) {
        x = Fq2{-x0.c1, x0.c0};
    } else {
        Limbs e2 = p_minus(1);
        limbs_shr1(e2);
        x = (Fq2::one() + alpha).pow(e2) * x0;
    }
    if (!(x.square() == *this)) return std::nullopt;
    return x;
}

Fq12 Fq12::frobenius(int power) const
{
    const auto& g = frobenius_coeffs();
    Fq12 r = *this;
    for (int k = 0; k < power; ++k) {
        // w-basis index: c0.cj <-> w^(2j), c1.cj <-> w^(2j+1)
        r.c0.c0 = r.c0.c0.conjugate();
        r.c0.c1 = r.c0.c1.conjugate() * g[2];
        r.c0.c2 = r.c0.c2.conjugate() * g[4];
        r.c1.c0 = r.c1.c0.conjugate() * g[1];
        r.c1.c1 = r.c1.c1.conjugate() * g[3];
        r.c1.c2 = r.c1.c2.conjugate() * g[5];
    }
    return r;
}

Fq12 Fq12::pow(std::span<const std::uint64_t> exponent_le) const
{
    Fq12 acc = one();
    for (std::size_t i = exponent_le.size() * 64; i-- > 0;) {
        acc = acc.square();
        if ((exponent_le[i / 64] >> (i % 64)) & 1) acc *= *this;
    }
    return acc;
}

Fq2 G2Traits::coeff_b()
{
    static const Fq2 b = Fq2{Fq::from_u64(3), Fq::zero()} * Fq2{Fq::from_u64(9), Fq::one()}.inverse();
    return b;
}

Fq2 G2Traits::generator_x()
{
    static const Fq2 x{
        Fq::from_dec("10857046999023057135944570762232829481370756359578518086990519993285655852781"),
        Fq::from_dec("11559732032986387107991004021392285783925812861821192530917403151452391805634")};
    return x;
}

Fq2 G2Traits::generator_y()
{
    static const Fq2 y{
        Fq::from_dec("8495653923123431417604973247489272438418190587263600148770280649306958101930"),
        Fq::from_dec("4082367875863433681332203403145435568316851327593401208105741076214120093531")};
    return y;
}

bool in_prime_subgroup(const G2& p)
{
    return p.mul(Fr::kModulus).is_identity();
}

}  // namespace expresso::zk
