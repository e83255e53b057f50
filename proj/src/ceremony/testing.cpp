#include "expresso/ceremony/testing.hpp"

#include "internal.hpp"

namespace expresso::ceremony::testing {

Phase1Secrets phase1_secrets_from_seed(std::uint32_t degree, ByteView seed)
{
    const auto v = derive_phase1_secrets(degree, seed);
    return {v.tau, v.alpha, v.beta};
}

Shares contribution_shares(const CeremonyTranscript& t, std::uint32_t record, ByteView entropy)
{
    if (record == 0 || record > t.records.size()) throw Error(Errc::InvalidArgument, "no such record");
    const Digest prev = record == 1 ? t.chain_start() : t.records[record - 2].running_digest;
    const auto s = derive_contribution_shares(entropy, prev, record);
    return {s.s[0], s.s[1], s.s[2], s.s[3]};
}

Shares beacon_shares(const CeremonyTranscript& t)
{
    if (!t.beacon || t.records.empty()) throw Error(Errc::InvalidArgument, "transcript has no beacon");
    const auto index = static_cast<std::uint32_t>(t.records.size() + 1);
    const auto s = derive_beacon_shares(t.beacon->beacon, t.records.back().running_digest, index);
    return {s.s[0], s.s[1], s.s[2], s.s[3]};
}

}  // namespace expresso::ceremony::testing
