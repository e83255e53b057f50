#pragma once

// Test-only access to trapdoor values. Production code never includes this header.

#include "expresso/ceremony/phase2.hpp"

namespace expresso::ceremony::testing {

struct Phase1Secrets {
    Fr tau, alpha, beta;
};

/// Recomputes the values phase1_generate derived from the same seed and degree.
Phase1Secrets phase1_secrets_from_seed(std::uint32_t degree, ByteView seed);

struct Shares {
    Fr alpha, beta, gamma, delta;
};

/// Shares the contribution at `record` (1-based) used, given its entropy.
Shares contribution_shares(const CeremonyTranscript& transcript, std::uint32_t record, ByteView entropy);
/// Shares the beacon record used.
Shares beacon_shares(const CeremonyTranscript& transcript);

}  // namespace expresso::ceremony::testing
