#pragma once

#include <array>
#include <optional>

#include "expresso/util/bytes.hpp"
#include "expresso/zk/babyjubjub.hpp"

namespace expresso::zk {

struct SigningKeyPair {
    JubScalar sk;
    EdwardsPoint pk;
};

struct Signature {
    EdwardsPoint R;
    JubScalar S;

    static constexpr std::size_t kEncodedBytes = EdwardsPoint::kEncodedBytes + 32;
    Bytes to_bytes() const;
    /// Rejects malformed points and S >= subgroup order.
    static std::optional<Signature> from_bytes(ByteView bytes);
    friend bool operator==(const Signature&, const Signature&) = default;
};

/// Deterministic in the seed; the seed must carry at least 32 bytes.
SigningKeyPair generate_signing_keypair(ByteView seed);
SigningKeyPair keypair_from_scalar(const JubScalar& sk);

/// h = circuit_hash(R.x, R.y, pk.x, pk.y, M).
Fr signature_challenge(const EdwardsPoint& R, const EdwardsPoint& pk, const Fr& message);

/// Schnorr signature with a nonce derived from (sk, message).
Signature sign(const JubScalar& sk, const Fr& message);

/// True iff S*G == R + h*pk with R on the curve and in the prime subgroup.
bool verify_native(const EdwardsPoint& pk, const Fr& message, const Signature& sig);

/// Group-generic form of the verification equation, shared with the small-group tests.
/// `Group` supplies: Point, Scalar, generator(), on_curve(P), in_subgroup(P), scalar_in_range(S),
/// mul(P, scalar), add(P, Q).
template <class Group, class Hash>
bool schnorr_verify(const typename Group::Point& pk, const typename Group::Point& R,
                    const typename Group::Scalar& S, Hash&& challenge)
{
    if (!Group::on_curve(pk) || !Group::on_curve(R) || !Group::in_subgroup(R)) return false;
    if (!Group::scalar_in_range(S)) return false;
    const auto h = challenge(R);
    return Group::mul(Group::generator(), S) == Group::add(R, Group::mul(pk, h));
}

}  // namespace expresso::zk
