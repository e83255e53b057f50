#pragma once

#include "expresso/util/bytes.hpp"
#include "expresso/zk/curve.hpp"

namespace expresso::zk {

/// Try-and-increment hash onto the prime-order subgroup of G2 (cofactor cleared by
/// multiplication). Not constant time; inputs are public transcript data.
G2 hash_to_g2(ByteView message);

/// Batched prime-order-subgroup test for many G2 points: `rounds` independent random
/// combinations, each multiplied by r. A point with a cofactor component survives one round
/// with probability below 1/10069 (the smallest prime factor of the cofactor).
bool all_in_prime_subgroup(std::span<const G2Affine> points, ByteView check_seed, int rounds = 5);

}  // namespace expresso::zk
