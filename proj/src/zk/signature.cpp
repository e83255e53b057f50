#include "expresso/zk/signature.hpp"

#include "expresso/util/crypto.hpp"
#include "expresso/zk/poseidon.hpp"

namespace expresso::zk {
namespace {

struct JubjubGroup {
    using Point = EdwardsPoint;
    using Scalar = Limbs;
    static const Point& generator() { return EdwardsPoint::generator(); }
    static bool on_curve(const Point& p) { return p.is_on_curve(); }
    static bool in_subgroup(const Point& p) { return p.in_subgroup(); }
    static bool scalar_in_range(const Scalar& s) { return limbs_compare(s, JubScalar::kModulus) < 0; }
    static Point mul(const Point& p, const Scalar& k) { return p.mul(k); }
    static Point add(const Point& p, const Point& q) { return p + q; }
};

JubScalar hash_to_scalar(std::string_view domain, ByteView a, ByteView b, std::uint32_t counter)
{
    ByteWriter w;
    w.str(domain);
    w.blob(a);
    w.blob(b);
    w.u32(counter);
    const auto wide = sha512(w.bytes());
    return JubScalar::from_wide_bytes(std::span<const std::uint8_t, 64>(wide.data(), 64));
}

}  // namespace

Bytes Signature::to_bytes() const
{
    ByteWriter w;
    w.raw(R.to_bytes());
    w.raw(S.to_bytes());
    return std::move(w).take();
}

std::optional<Signature> Signature::from_bytes(ByteView bytes)
{
    if (bytes.size() != kEncodedBytes) return std::nullopt;
    auto r = EdwardsPoint::from_bytes(bytes.first(EdwardsPoint::kEncodedBytes));
    auto s = JubScalar::from_bytes(bytes.subspan(EdwardsPoint::kEncodedBytes));
    if (!r || !s) return std::nullopt;
    return Signature{*r, *s};
}

SigningKeyPair keypair_from_scalar(const JubScalar& sk)
{
    if (sk.is_zero()) throw Error(Errc::InvalidArgument, "signing key must be non-zero");
    return {sk, EdwardsPoint::generator() * sk};
}

SigningKeyPair generate_signing_keypair(ByteView seed)
{
    if (seed.size() < 32) throw Error(Errc::InvalidArgument, "key seed shorter than 32 bytes");
    for (std::uint32_t counter = 0;; ++counter) {
        const JubScalar sk = hash_to_scalar("expresso.keygen", seed, {}, counter);
        if (!sk.is_zero()) return keypair_from_scalar(sk);
    }
}

Fr signature_challenge(const EdwardsPoint& R, const EdwardsPoint& pk, const Fr& message)
{
    return circuit_hash({R.x(), R.y(), pk.x(), pk.y(), message});
}

Signature sign(const JubScalar& sk, const Fr& message)
{
    const EdwardsPoint pk = EdwardsPoint::generator() * sk;
    const auto sk_bytes = sk.to_bytes();
    const auto m_bytes = message.to_bytes();
    JubScalar k;
    for (std::uint32_t counter = 0;; ++counter) {
        k = hash_to_scalar("expresso.nonce", sk_bytes, m_bytes, counter);
        if (!k.is_zero()) break;
    }
    const EdwardsPoint R = EdwardsPoint::generator() * k;
    const Fr h = signature_challenge(R, pk, message);
    const JubScalar h_mod = JubScalar::from_limbs_reduced(h.to_canonical());
    return {R, k + h_mod * sk};
}

bool verify_native(const EdwardsPoint& pk, const Fr& message, const Signature& sig)
{
    return schnorr_verify<JubjubGroup>(pk, sig.R, sig.S.to_canonical(), [&](const EdwardsPoint& R) {
        return signature_challenge(R, pk, message).to_canonical();
    });
}

}  // namespace expresso::zk
