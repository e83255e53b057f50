#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "expresso/ceremony/phase2.hpp"
#include "expresso/zk/groth16.hpp"

namespace expresso::ceremony {

/// Keys plus the provenance needed to check them. `artifact_digest` covers the canonical
/// encoding of every other field.
struct ZkArtifacts {
    std::uint64_t version = 0;
    Digest program_digest{};
    zk::ProvingKey proving_key;
    zk::VerificationKey verification_key;
    Digest transcript_digest{};
    Digest artifact_digest{};

    Bytes canonical_body() const;
    Digest compute_digest() const { return sha256(canonical_body()); }
    bool digest_valid() const { return compute_digest() == artifact_digest; }
    /// Copy stamped with a new version (and the matching digest).
    ZkArtifacts with_version(std::uint64_t v) const;

    /// Container: canonical body followed by the digest. Deserialization rejects a mismatch.
    Bytes serialize() const;
    static ZkArtifacts deserialize(ByteView bytes);
    /// Writes `path` and `path`.sha256 (hex digest).
    void save(const std::filesystem::path& path) const;
    static ZkArtifacts load(const std::filesystem::path& path);
};

struct FinalizedCeremony {
    ZkArtifacts artifacts;
    CeremonyTranscript transcript;
};

/// Applies the beacon as the last contribution and assembles the keys.
/// Errors: EmptyCeremony (no contributions), InvalidArgument (empty beacon or a different
/// constraint system), InvalidPriorState (already finalized).
FinalizedCeremony finalize(const CeremonyState& state, ByteView beacon, std::string beacon_source,
                           const circuit::ConstraintSystem& cs, std::uint64_t version);

/// Checks that the keys in `artifacts` are the ones the transcript and phase-1 parameters
/// determine for `cs`, using random linear combinations drawn from `check_seed`.
bool verify_artifacts(const ZkArtifacts& artifacts, const CeremonyTranscript& transcript,
                      const Phase1Parameters& phase1, const circuit::ConstraintSystem& cs, ByteView check_seed,
                      std::string* diagnostic = nullptr);

}  // namespace expresso::ceremony
