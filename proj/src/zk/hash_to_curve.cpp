#include "expresso/zk/hash_to_curve.hpp"

#include "expresso/util/crypto.hpp"
#include "expresso/zk/msm.hpp"
#include "expresso/zk/random.hpp"

namespace expresso::zk {
namespace {

// #E'(Fq2) / r = 2p - r
constexpr Limbs kG2Cofactor{0x345f2299c0f9fa8dULL, 0x06ceecda572a2489ULL, 0xb85045b68181585eULL,
                            0x30644e72e131a029ULL};

Fq wide_fq(ByteView msg, std::uint32_t counter, std::uint8_t lane)
{
    ByteWriter w;
    w.str("expresso.h2g2");
    w.blob(msg);
    w.u32(counter);
    w.u8(lane);
    const auto h = sha512(w.bytes());
    return Fq::from_wide_bytes(h);
}

}  // namespace

G2 hash_to_g2(ByteView message)
{
    for (std::uint32_t ctr = 0;; ++ctr) {
        const Fq2 x{wide_fq(message, ctr, 0), wide_fq(message, ctr, 1)};
        const Fq2 rhs = x.square() * x + G2::coeff_b();
        const auto y = rhs.sqrt();
        if (!y) continue;
        const bool flip = (wide_fq(message, ctr, 2).to_canonical()[0] & 1) != 0;
        const G2 p = G2Affine{x, flip ? -*y : *y, false};
        const G2 q = p.mul(kG2Cofactor);
        if (!q.is_identity()) return q;
    }
}

bool all_in_prime_subgroup(std::span<const G2Affine> points, ByteView check_seed, int rounds)
{
    if (points.empty()) return true;
    Rng rng(check_seed);
    std::vector<Fr> r(points.size());
    for (int k = 0; k < rounds; ++k) {
        for (auto& v : r) v = random_element<Fr>(rng);
        const G2 combo = msm<G2, Fr>(points, r);
        if (!combo.mul(Fr::kModulus).is_identity()) return false;
    }
    return true;
}

}  // namespace expresso::zk
