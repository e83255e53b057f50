#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "expresso/circuit/r1cs.hpp"
#include "expresso/util/crypto.hpp"
#include "expresso/zk/curve.hpp"

namespace expresso::zk {

struct Groth16Proof {
    G1Affine a;
    G2Affine b;
    G1Affine c;

    static constexpr std::size_t kEncodedBytes = 33 + 65 + 33;
    Bytes serialize() const;
    /// Rejects off-curve points and B outside the prime-order subgroup.
    static Groth16Proof deserialize(ByteView bytes);
    friend bool operator==(const Groth16Proof&, const Groth16Proof&) = default;
};

struct VerificationKey {
    G1Affine alpha_g1;
    G2Affine beta_g2;
    G2Affine gamma_g2;
    G2Affine delta_g2;
    std::vector<G1Affine> ic;  // one entry per public variable, including the constant one

    std::size_t num_public() const { return ic.empty() ? 0 : ic.size() - 1; }
    Bytes serialize() const;
    static VerificationKey deserialize(ByteView bytes);
    friend bool operator==(const VerificationKey&, const VerificationKey&) = default;
};

/// Proving key; carries the constraint system so a witness alone suffices to prove.
struct ProvingKey {
    std::shared_ptr<const circuit::ConstraintSystem> cs;
    std::uint32_t domain_size = 0;
    G1Affine alpha_g1, beta_g1, delta_g1;
    G2Affine beta_g2, delta_g2;
    std::vector<G1Affine> a_query;     // A_j(tau) G1, every variable
    std::vector<G1Affine> b_g1_query;  // B_j(tau) G1
    std::vector<G2Affine> b_g2_query;  // B_j(tau) G2
    std::vector<G1Affine> h_query;     // tau^i Z(tau) / delta G1, i < domain_size - 1
    std::vector<G1Affine> l_query;     // (beta A_j + alpha B_j + C_j)(tau) / delta G1, private variables

    Bytes serialize() const;
    static ProvingKey deserialize(ByteView bytes);
    bool same_elements(const ProvingKey& o) const;
};

/// Domain size used for a constraint system: constraints plus one input-consistency row per
/// public variable (and the constant), rounded up to a power of two.
std::size_t qap_domain_size(const circuit::ConstraintSystem& cs);

/// Groth16 prover. Errors: KeyMismatch (witness length), UnsatisfiedConstraints (first violated index).
Groth16Proof groth16_prove(const ProvingKey& pk, std::span<const Fr> witness, Rng& rng);

/// Pairing check e(A,B) = e(alpha,beta) e(IC(x),gamma) e(C,delta). Never throws; on failure
/// `diagnostic` (if given) says why.
bool groth16_verify(const VerificationKey& vk, std::span<const Fr> public_inputs, const Groth16Proof& proof,
                    std::string* diagnostic = nullptr);

/// Key pair for explicitly known trapdoor values. Only for tests and as an independent
/// cross-check of ceremony output; production keys come from the ceremony.
struct Trapdoor {
    Fr tau, alpha, beta, gamma, delta;
};
std::pair<ProvingKey, VerificationKey> setup_with_trapdoor(const circuit::ConstraintSystem& cs, const Trapdoor& t);

}  // namespace expresso::zk
