#include "expresso/zk/babyjubjub.hpp"

namespace expresso::zk {
namespace {

struct Extended {
    Fr x, y, z, t;
};

Extended to_extended(const EdwardsPoint& p) { return {p.x(), p.y(), Fr::one(), p.x() * p.y()}; }

EdwardsPoint to_affine(const Extended& e)
{
    const Fr zinv = e.z.inverse();
    return {e.x * zinv, e.y * zinv};
}

// add-2008-hwcd, complete because a is a square and d is not.
Extended add(const Extended& p, const Extended& q)
{
    static const Fr a = edwards_a();
    static const Fr d = edwards_d();
    const Fr A = p.x * q.x;
    const Fr B = p.y * q.y;
    const Fr C = p.t * d * q.t;
    const Fr D = p.z * q.z;
    const Fr E = (p.x + p.y) * (q.x + q.y) - A - B;
    const Fr F = D - C;
    const Fr G = D + C;
    const Fr H = B - a * A;
    return {E * F, G * H, F * G, E * H};
}

// dbl-2008-hwcd
Extended dbl_ext(const Extended& p)
{
    static const Fr a = edwards_a();
    const Fr A = p.x.square();
    const Fr B = p.y.square();
    const Fr C = p.z.square().dbl();
    const Fr D = a * A;
    const Fr E = (p.x + p.y).square() - A - B;
    const Fr G = D + B;
    const Fr F = G - C;
    const Fr H = D - B;
    return {E * F, G * H, F * G, E * H};
}

}  // namespace

Fr edwards_a() { return Fr::from_u64(EdwardsPoint::kA); }
Fr edwards_d() { return Fr::from_u64(EdwardsPoint::kD); }

const EdwardsPoint& EdwardsPoint::generator()
{
    static const EdwardsPoint g{
        Fr::from_dec("5299619240641551281634865583518297030282874472190772894086521144482721001553"),
        Fr::from_dec("16950150798460657717958625567821834550301663161624707787222815936182638968203")};
    return g;
}

bool EdwardsPoint::is_on_curve() const
{
    const Fr x2 = x_.square();
    const Fr y2 = y_.square();
    return edwards_a() * x2 + y2 == Fr::one() + edwards_d() * x2 * y2;
}

bool EdwardsPoint::in_subgroup() const
{
    return is_on_curve() && mul(JubScalar::kModulus).is_identity();
}

EdwardsPoint operator+(const EdwardsPoint& p, const EdwardsPoint& q)
{
    return to_affine(add(to_extended(p), to_extended(q)));
}

EdwardsPoint EdwardsPoint::mul(const Limbs& k) const
{
    Extended acc{Fr::zero(), Fr::one(), Fr::one(), Fr::zero()};
    const Extended base = to_extended(*this);
    for (std::size_t i = limbs_bit_length(k); i-- > 0;) {
        acc = dbl_ext(acc);
        if (limbs_bit(k, i)) acc = add(acc, base);
    }
    return to_affine(acc);
}

std::array<std::uint8_t, EdwardsPoint::kEncodedBytes> EdwardsPoint::to_bytes() const
{
    std::array<std::uint8_t, kEncodedBytes> out{};
    out[0] = x_.is_lexicographically_largest() ? 1 : 0;
    const auto y = y_.to_bytes();
    std::copy(y.begin(), y.end(), out.begin() + 1);
    return out;
}

std::optional<EdwardsPoint> EdwardsPoint::from_bytes(ByteView bytes)
{
    if (bytes.size() != kEncodedBytes || bytes[0] > 1) return std::nullopt;
    const auto y = Fr::from_bytes(bytes.subspan(1));
    if (!y) return std::nullopt;
    // x^2 = (1 - y^2) / (a - d y^2)
    const Fr y2 = y->square();
    const Fr den = edwards_a() - edwards_d() * y2;
    if (den.is_zero()) return std::nullopt;
    auto x = ((Fr::one() - y2) * den.inverse()).sqrt();
    if (!x) return std::nullopt;
    if (x->is_zero() && bytes[0] == 1) return std::nullopt;
    if (x->is_lexicographically_largest() != (bytes[0] == 1)) *x = -*x;
    return EdwardsPoint{*x, *y};
}

}  // namespace expresso::zk
