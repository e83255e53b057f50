#pragma once

#include <memory>
#include <vector>

#include "expresso/ceremony/phase2.hpp"

namespace expresso::ceremony {

struct Phase1SecretValues {
    Fr tau, alpha, beta;
};

Phase1SecretValues derive_phase1_secrets(std::uint32_t degree, ByteView seed);

struct ShareValues {
    std::array<Fr, 4> s;  // indexed by Share
    const Fr& operator[](Share k) const { return s[static_cast<std::size_t>(k)]; }
};

ShareValues derive_contribution_shares(ByteView entropy, const Digest& prev_running, std::uint32_t index);
ShareValues derive_beacon_shares(ByteView beacon, const Digest& prev_running, std::uint32_t index);

/// G2 base point for the knowledge proof of one share at one transcript slot.
G2 share_base_point(const Digest& prev_running, std::uint32_t index, Share share);

/// Circuit-specific values every ceremony on (phase1, cs) starts from. Cached.
struct Phase2Base {
    std::shared_ptr<const Phase1Parameters> phase1;
    std::shared_ptr<const circuit::ConstraintSystem> cs;
    Digest phase1_digest{};
    Digest circuit_digest{};
    std::uint32_t domain_size = 0;
    std::vector<G1Affine> a_query, b_g1_query;
    std::vector<G2Affine> b_g2_query;
    std::vector<G1Affine> x0, y0, z0, h0;
};

std::shared_ptr<const Phase2Base> phase2_base(std::shared_ptr<const Phase1Parameters> phase1,
                                              const circuit::ConstraintSystem& cs);

/// Per-variable column lists of the QAP matrices, including the input-consistency rows.
struct QapColumns {
    struct Entry {
        std::uint32_t row;
        Fr coeff;
    };
    std::vector<std::vector<Entry>> a, b, c;
};
QapColumns qap_columns(const circuit::ConstraintSystem& cs);

/// Lagrange-basis points for the size-n subdomain, derived from phase 1.
struct LagrangeView {
    std::vector<G1Affine> g1, alpha_g1, beta_g1;
    std::vector<G2Affine> g2;
};
LagrangeView lagrange_view(const Phase1Parameters& phase1, std::size_t n);

Digest combined_state_digest(const TrapdoorEncodings& enc, std::span<const G1Affine> ic,
                             std::span<const G1Affine> l, std::span<const G1Affine> h);

/// Sums x + y + z per variable and splits them into (ic, l).
std::pair<std::vector<G1Affine>, std::vector<G1Affine>> combine_queries(std::span<const G1Affine> x,
                                                                        std::span<const G1Affine> y,
                                                                        std::span<const G1Affine> z,
                                                                        std::size_t num_public);

/// Update-proof check of `rec` against the previous encodings; empty string when valid.
std::string check_record(const ContributionRecord& rec, const TrapdoorEncodings& prev, const Digest& prev_running);

Digest beacon_running_digest(const Digest& prev, const BeaconRecord& b);
Digest final_transcript_digest(const Digest& beacon_running);
TrapdoorEncodings initial_encodings(const Phase1Parameters& phase1);

struct CeremonyAccess {
    static const Phase2Base& base(const CeremonyState& s) { return *s.base_; }
    static const std::vector<G1Affine>& x(const CeremonyState& s) { return s.x_; }
    static const std::vector<G1Affine>& y(const CeremonyState& s) { return s.y_; }
    static const std::vector<G1Affine>& z(const CeremonyState& s) { return s.z_; }
    static const std::vector<G1Affine>& h(const CeremonyState& s) { return s.h_; }
    static CeremonyState apply(const CeremonyState& prev, const ShareValues& shares, std::string contributor_id,
                               std::uint32_t index, ContributionRecord& out);
};

}  // namespace expresso::ceremony
