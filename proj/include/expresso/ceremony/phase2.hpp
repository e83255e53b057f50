#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "expresso/ceremony/phase1.hpp"
#include "expresso/circuit/r1cs.hpp"

namespace expresso::ceremony {

using zk::G1;
using zk::G2;

/// Public encodings of the running trapdoor (alpha, beta, gamma, delta).
struct TrapdoorEncodings {
    G1Affine alpha_g1, beta_g1, delta_g1;
    G2Affine beta_g2, gamma_g2, delta_g2;

    void write(ByteWriter& w) const;
    static TrapdoorEncodings read(ByteReader& r);
    friend bool operator==(const TrapdoorEncodings&, const TrapdoorEncodings&) = default;
};

enum class Share : std::uint8_t { Alpha = 0, Beta = 1, Gamma = 2, Delta = 3 };
constexpr std::array<Share, 4> kShares{Share::Alpha, Share::Beta, Share::Gamma, Share::Delta};

/// Knowledge-of-exponent pair for one share s: s*G1 and s*H, where H is hashed onto G2 from
/// the transcript position so a proof cannot be lifted into another ceremony or slot.
struct ShareProof {
    G1Affine s_g1;
    G2Affine s_h;
    friend bool operator==(const ShareProof&, const ShareProof&) = default;
};

struct ContributionRecord {
    std::uint32_t index = 0;  // 1-based position in the transcript
    std::string contributor_id;
    TrapdoorEncodings update;  // encodings after this contribution
    std::array<ShareProof, 4> proofs;
    Digest state_digest{};    // commits to the combined query vectors after the update
    Digest running_digest{};  // H(previous running digest || body)

    Bytes body() const;
    void write(ByteWriter& w) const;
    static ContributionRecord read(ByteReader& r);
    friend bool operator==(const ContributionRecord&, const ContributionRecord&) = default;
};

/// Final public-randomness contribution; its shares are recomputable from `beacon`.
struct BeaconRecord {
    Bytes beacon;
    std::string source;
    ContributionRecord record;
};

struct CeremonyTranscript {
    Digest phase1_digest{};
    Digest circuit_digest{};
    std::uint32_t domain_size = 0;
    std::vector<ContributionRecord> records;
    std::optional<BeaconRecord> beacon;
    Digest final_digest{};

    /// Running digest before the first record.
    Digest chain_start() const;
    Bytes serialize() const;
    static CeremonyTranscript deserialize(ByteView bytes);
    /// Human-readable summary (one line per record), written next to the binary file.
    std::string manifest() const;
};

struct TranscriptCheck {
    enum class Where { None, Header, Record, Beacon, Footer };
    bool ok = true;
    Where where = Where::None;
    std::uint32_t record = 0;  // set when where == Record
    std::string reason;

    explicit operator bool() const { return ok; }
    std::string describe() const;
};

/// Checks the header against `phase1`, every record against its predecessor, the beacon and the
/// footer. Pure; stops at the first failure.
TranscriptCheck verify_transcript(const CeremonyTranscript& transcript, const Phase1Parameters& phase1);

struct Phase2Base;

/// Coordinator-held phase-2 state: the running trapdoor encodings, the trapdoor-dependent query
/// vectors and the transcript so far. Shares never enter this object.
class CeremonyState {
public:
    /// Errors: DegreeTooSmall when the circuit's QAP domain exceeds the phase-1 degree.
    static CeremonyState begin(std::shared_ptr<const Phase1Parameters> phase1, const circuit::ConstraintSystem& cs);

    const CeremonyTranscript& transcript() const { return transcript_; }
    const TrapdoorEncodings& encodings() const { return enc_; }
    const circuit::ConstraintSystem& constraint_system() const;
    bool finalized() const { return transcript_.beacon.has_value(); }
    /// Digest of the encodings and combined query vectors; recorded as state_digest.
    Digest state_digest() const;

private:
    friend std::pair<CeremonyState, ContributionRecord> contribute(const CeremonyState&, std::string, ByteView);
    friend struct CeremonyAccess;

    std::shared_ptr<const Phase2Base> base_;
    TrapdoorEncodings enc_;
    std::vector<G1Affine> x_, y_, z_;  // beta A_j, alpha B_j, C_j over gamma (public) or delta (private)
    std::vector<G1Affine> h_;          // tau^i Z(tau) / delta
    CeremonyTranscript transcript_;
};

/// Applies fresh shares derived from `entropy` (and the transcript position) and returns the new
/// state with its record. Errors: InvalidPriorState (finalized or internally inconsistent state),
/// InvalidArgument (empty entropy or contributor id).
std::pair<CeremonyState, ContributionRecord> contribute(const CeremonyState& prev, std::string contributor_id,
                                                        ByteView entropy);

}  // namespace expresso::ceremony
