#pragma once

#include <span>
#include <utility>

#include "expresso/zk/curve.hpp"

namespace expresso::zk {

using PairingInput = std::pair<G1Affine, G2Affine>;

/// Optimal ate Miller loop over a product of pairs; identity inputs contribute one.
Fq12 miller_loop(std::span<const PairingInput> pairs);

/// Maps a Miller loop output into the order-r subgroup of Fq12*.
Fq12 final_exponentiation(const Fq12& f);

/// Reduced pairing e(P, Q).
Fq12 pairing(const G1& p, const G2& q);

/// True iff the product of e(P_i, Q_i) equals one.
bool pairing_product_is_one(std::span<const std::pair<G1, G2>> pairs);

/// Checks e(a1, a2) == e(b1, b2).
bool same_ratio(const G1& a1, const G2& a2, const G1& b1, const G2& b2);

}  // namespace expresso::zk
