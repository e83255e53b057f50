#pragma once

#include <string>
#include <vector>

#include "expresso/util/bytes.hpp"
#include "expresso/zk/curve.hpp"

namespace expresso::ceremony {

using zk::Fr;
using zk::G1Affine;
using zk::G2Affine;

/// Circuit-independent powers-of-tau parameters for domains of size `degree`.
///
/// Besides the monomial powers the set carries their Lagrange-basis forms over the size-`degree`
/// evaluation domain, which phase 2 needs to build circuit-specific queries without tau.
struct Phase1Parameters {
    std::uint32_t degree = 0;
    std::vector<G1Affine> tau_powers_g1;  // tau^i G1, i < 2 * degree - 1
    std::vector<G2Affine> tau_powers_g2;  // tau^i G2, i < degree
    std::vector<G1Affine> alpha_tau_g1;   // alpha tau^i G1, i < degree
    std::vector<G1Affine> beta_tau_g1;    // beta tau^i G1, i < degree
    G2Affine beta_g2;
    std::vector<G1Affine> lagrange_g1;        // L_i(tau) G1
    std::vector<G2Affine> lagrange_g2;        // L_i(tau) G2
    std::vector<G1Affine> alpha_lagrange_g1;  // alpha L_i(tau) G1
    std::vector<G1Affine> beta_lagrange_g1;   // beta L_i(tau) G1

    Bytes serialize() const;
    static Phase1Parameters deserialize(ByteView bytes);
    Digest digest() const;
};

/// Desk-scale substitute for a public powers-of-tau transcript. `degree` must be a power of two
/// no larger than 2^28. tau, alpha and beta are derived from the seed and wiped before returning.
Phase1Parameters phase1_generate(std::uint32_t degree, ByteView rng_seed);

/// Structural and pairing consistency of a parameter set, using random linear combinations
/// drawn from `check_seed`. On failure returns false and names the failing check.
bool phase1_verify(const Phase1Parameters& params, ByteView check_seed, std::string* diagnostic = nullptr);

/// Spot-checks e(tau^i G1, G2) == e(G1, tau^i G2) at `count` random indices.
bool phase1_spot_check(const Phase1Parameters& params, std::size_t count, ByteView check_seed);

}  // namespace expresso::ceremony
