#include "expresso/zk/pairing.hpp"

#include <array>
#include <vector>

namespace expresso::zk {
namespace {

// 6u + 2 for the curve parameter u = 4965661367192848881.
constexpr Limbs kAteLoopCount{0x9d797039be763ba8ULL, 0x1ULL, 0, 0};

// (p^4 - p^2 + 1) / r, little-endian limbs.
constexpr std::array<std::uint64_t, 12> kHardExponent{
    0xe81bb482ccdf42b1ULL, 0x5abf5cc4f49c36d4ULL, 0xf1154e7e1da014fdULL, 0xdcc7b44c87cdbacfULL,
    0xaaa441e3954bcf8aULL, 0x6b887d56d5095f23ULL, 0x79581e16f3fd90c6ULL, 0x3b1b1355d189227dULL,
    0x4e529a5861876f6bULL, 0x6c0eb522d5b12278ULL, 0x331ec15183177fafULL, 0x01baaa710b0759adULL};

struct TwistConstants {
    Fq2 frob_x;   // xi^((p-1)/3)
    Fq2 frob_y;   // xi^((p-1)/2)
    Fq2 frob2_x;  // xi^((p^2-1)/3)
    Fq2 frob2_y;  // xi^((p^2-1)/2)
};

const TwistConstants& twist_constants()
{
    static const TwistConstants c = [] {
        const Fq2 xi{Fq::from_u64(9), Fq::one()};
        Limbs e3 = Fq::kModulus;
        limbs_sub(e3, Limbs{1, 0, 0, 0});
        Limbs e2 = e3;
        limbs_div_small(e3, 3);
        limbs_div_small(e2, 2);
        TwistConstants out;
        out.frob_x = xi.pow(e3);
        out.frob_y = xi.pow(e2);
        // x^(p^2 - 1) = (x^(p-1))^(p+1) = conj(x^(p-1)) * x^(p-1)
        out.frob2_x = out.frob_x.conjugate() * out.frob_x;
        out.frob2_y = out.frob_y.conjugate() * out.frob_y;
        return out;
    }();
    return c;
}

/// Line through twist points with slope `lambda` passing through (xt, yt), evaluated at P.
/// The untwisted line is yP - lambda*xP*w + (lambda*xt - yt)*w^3.
Fq12 line_value(const Fq2& lambda, const Fq2& xt, const Fq2& yt, const G1Affine& p)
{
    Fq12 l = Fq12::one();
    l.c0.c0 = Fq2{p.y, Fq::zero()};
    l.c1.c0 = -lambda.scale(p.x);
    l.c1.c1 = lambda * xt - yt;
    return l;
}

/// Sparse product f * l where l only has c0.c0 (in Fq), c1.c0 and c1.c1 populated.
Fq12 mul_by_line(const Fq12& f, const Fq12& l)
{
    const Fq& y = l.c0.c0.c0;
    const Fq2& b0 = l.c1.c0;
    const Fq2& b1 = l.c1.c1;
    // f.c0 * y
    const Fq6 t0{f.c0.c0.scale(y), f.c0.c1.scale(y), f.c0.c2.scale(y)};
    // f.c1 * (b0 + b1 v)
    const Fq6& g = f.c1;
    const Fq6 t1{g.c0 * b0 + (g.c2 * b1).mul_by_nonresidue(), g.c0 * b1 + g.c1 * b0, g.c1 * b1 + g.c2 * b0};
    // (f.c0 + f.c1) * (y + b0 + b1 v) - t0 - t1
    const Fq6 s = f.c0 + f.c1;
    const Fq2 c0 = b0 + Fq2{y, Fq::zero()};
    const Fq6 t2{s.c0 * c0 + (s.c2 * b1).mul_by_nonresidue(), s.c0 * b1 + s.c1 * c0, s.c1 * b1 + s.c2 * c0};
    return {t0 + t1.mul_by_nonresidue(), t2 - t0 - t1};
}

struct MillerState {
    G1Affine p;
    G2Affine q;
    G2Affine t;
};

void double_step(MillerState& s, Fq12& f)
{
    const Fq2 x2 = s.t.x.square();
    const Fq2 lambda = (x2 + x2 + x2) * s.t.y.dbl().inverse();
    f = mul_by_line(f, line_value(lambda, s.t.x, s.t.y, s.p));
    const Fq2 x3 = lambda.square() - s.t.x.dbl();
    const Fq2 y3 = lambda * (s.t.x - x3) - s.t.y;
    s.t = G2Affine{x3, y3, false};
}

void add_step(MillerState& s, const G2Affine& q, Fq12& f)
{
    const Fq2 lambda = (q.y - s.t.y) * (q.x - s.t.x).inverse();
    f = mul_by_line(f, line_value(lambda, s.t.x, s.t.y, s.p));
    const Fq2 x3 = lambda.square() - s.t.x - q.x;
    const Fq2 y3 = lambda * (s.t.x - x3) - s.t.y;
    s.t = G2Affine{x3, y3, false};
}

}  // namespace

Fq12 miller_loop(std::span<const PairingInput> pairs)
{
    std::vector<MillerState> states;
    for (const auto& [p, q] : pairs) {
        if (p.infinity || q.infinity) continue;
        states.push_back({p, q, q});
    }
    Fq12 f = Fq12::one();
    if (states.empty()) return f;

    const std::size_t bits = limbs_bit_length(kAteLoopCount);
    for (std::size_t i = bits - 1; i-- > 0;) {
        f = f.square();
        for (auto& s : states) double_step(s, f);
        if (limbs_bit(kAteLoopCount, i)) {
            for (auto& s : states) add_step(s, s.q, f);
        }
    }
    const auto& c = twist_constants();
    for (auto& s : states) {
        const G2Affine q1{s.q.x.conjugate() * c.frob_x, s.q.y.conjugate() * c.frob_y, false};
        const G2Affine q2{s.q.x * c.frob2_x, -(s.q.y * c.frob2_y), false};
        add_step(s, q1, f);
        add_step(s, q2, f);
    }
    return f;
}

Fq12 final_exponentiation(const Fq12& f)
{
    // easy part: f^((p^6 - 1)(p^2 + 1))
    Fq12 r = f.conjugate() * f.inverse();
    r = r.frobenius(2) * r;
    return r.pow(kHardExponent);
}

Fq12 pairing(const G1& p, const G2& q)
{
    const PairingInput in{p.to_affine(), q.to_affine()};
    return final_exponentiation(miller_loop(std::span<const PairingInput>(&in, 1)));
}

bool pairing_product_is_one(std::span<const std::pair<G1, G2>> pairs)
{
    std::vector<PairingInput> in;
    in.reserve(pairs.size());
    for (const auto& [p, q] : pairs) in.emplace_back(p.to_affine(), q.to_affine());
    return final_exponentiation(miller_loop(in)).is_one();
}

bool same_ratio(const G1& a1, const G2& a2, const G1& b1, const G2& b2)
{
    const std::pair<G1, G2> pairs[2] = {{a1, a2}, {-b1, b2}};
    return pairing_product_is_one(pairs);
}

}  // namespace expresso::zk
