#include "expresso/ceremony/artifacts.hpp"

#include "expresso/util/file.hpp"
#include "expresso/zk/encoding.hpp"
#include "expresso/zk/msm.hpp"
#include "expresso/zk/pairing.hpp"
#include "expresso/zk/random.hpp"
#include "internal.hpp"

namespace expresso::ceremony {

namespace {

constexpr std::uint32_t kArtifactMagic = 0x31415a58;  // "XZA1"

Digest read_digest(ByteReader& r)
{
    Digest d{};
    const auto b = r.raw(32);
    std::copy(b.begin(), b.end(), d.begin());
    return d;
}

}  // namespace

Bytes ZkArtifacts::canonical_body() const
{
    ByteWriter w;
    w.u32(kArtifactMagic);
    w.u64(version);
    w.raw(program_digest);
    w.blob(proving_key.serialize());
    w.blob(verification_key.serialize());
    w.raw(transcript_digest);
    return std::move(w).take();
}

ZkArtifacts ZkArtifacts::with_version(std::uint64_t v) const
{
    ZkArtifacts out = *this;
    out.version = v;
    out.artifact_digest = out.compute_digest();
    return out;
}

Bytes ZkArtifacts::serialize() const
{
    Bytes out = canonical_body();
    out.insert(out.end(), artifact_digest.begin(), artifact_digest.end());
    return out;
}

ZkArtifacts ZkArtifacts::deserialize(ByteView bytes)
{
    if (bytes.size() < 32) throw Error(Errc::MalformedEncoding, "artifact container too short");
    const ByteView body = bytes.first(bytes.size() - 32);
    ByteReader r(body);
    if (r.u32() != kArtifactMagic) throw Error(Errc::MalformedEncoding, "not an artifact container");
    ZkArtifacts a;
    a.version = r.u64();
    a.program_digest = read_digest(r);
    a.proving_key = zk::ProvingKey::deserialize(r.blob());
    a.verification_key = zk::VerificationKey::deserialize(r.blob());
    a.transcript_digest = read_digest(r);
    r.expect_done();
    std::copy(bytes.end() - 32, bytes.end(), a.artifact_digest.begin());
    if (sha256(body) != a.artifact_digest) throw Error(Errc::MalformedEncoding, "artifact digest mismatch");
    return a;
}

void ZkArtifacts::save(const std::filesystem::path& path) const
{
    write_file_atomic(path, serialize());
    auto sidecar = path;
    sidecar += ".sha256";
    write_file_atomic(sidecar, as_bytes(to_hex(artifact_digest) + "\n"));
}

ZkArtifacts ZkArtifacts::load(const std::filesystem::path& path)
{
    ZkArtifacts a = deserialize(read_file(path));
    auto sidecar = path;
    sidecar += ".sha256";
    if (std::filesystem::exists(sidecar)) {
        const Bytes text = read_file(sidecar);
        std::string hex(text.begin(), text.end());
        while (!hex.empty() && (hex.back() == '\n' || hex.back() == ' ')) hex.pop_back();
        if (hex != to_hex(a.artifact_digest)) throw Error(Errc::MalformedEncoding, "sidecar digest mismatch");
    }
    return a;
}

FinalizedCeremony finalize(const CeremonyState& state, ByteView beacon, std::string beacon_source,
                           const circuit::ConstraintSystem& cs, std::uint64_t version)
{
    if (state.finalized()) throw Error(Errc::InvalidPriorState, "ceremony already finalized");
    const auto& recs = state.transcript().records;
    if (recs.empty()) throw Error(Errc::EmptyCeremony, "at least one contribution is required before the beacon");
    if (beacon.empty()) throw Error(Errc::InvalidArgument, "beacon must not be empty");
    if (cs.digest() != state.transcript().circuit_digest) {
        throw Error(Errc::InvalidArgument, "constraint system differs from the ceremony's circuit");
    }

    const auto index = static_cast<std::uint32_t>(recs.size() + 1);
    const Digest prev_running = recs.back().running_digest;
    const ShareValues shares = derive_beacon_shares(beacon, prev_running, index);
    ContributionRecord rec;
    const CeremonyState last = CeremonyAccess::apply(state, shares, "beacon", index, rec);

    FinalizedCeremony out;
    out.transcript = state.transcript();
    BeaconRecord b{Bytes(beacon.begin(), beacon.end()), std::move(beacon_source), std::move(rec)};
    b.record.running_digest = beacon_running_digest(prev_running, b);
    out.transcript.final_digest = final_transcript_digest(b.record.running_digest);
    out.transcript.beacon = std::move(b);

    const Phase2Base& base = CeremonyAccess::base(last);
    const auto& enc = last.encodings();
    auto [ic, l] = combine_queries(CeremonyAccess::x(last), CeremonyAccess::y(last), CeremonyAccess::z(last),
                                   base.cs->num_public);

    zk::ProvingKey pk;
    pk.cs = base.cs;
    pk.domain_size = base.domain_size;
    pk.alpha_g1 = enc.alpha_g1;
    pk.beta_g1 = enc.beta_g1;
    pk.delta_g1 = enc.delta_g1;
    pk.beta_g2 = enc.beta_g2;
    pk.delta_g2 = enc.delta_g2;
    pk.a_query = base.a_query;
    pk.b_g1_query = base.b_g1_query;
    pk.b_g2_query = base.b_g2_query;
    pk.h_query = CeremonyAccess::h(last);
    pk.l_query = std::move(l);

    zk::VerificationKey vk;
    vk.alpha_g1 = enc.alpha_g1;
    vk.beta_g2 = enc.beta_g2;
    vk.gamma_g2 = enc.gamma_g2;
    vk.delta_g2 = enc.delta_g2;
    vk.ic = std::move(ic);

    ZkArtifacts& a = out.artifacts;
    a.version = version;
    a.program_digest = cs.program_digest;
    a.proving_key = std::move(pk);
    a.verification_key = std::move(vk);
    a.transcript_digest = out.transcript.final_digest;
    a.artifact_digest = a.compute_digest();
    return out;
}

bool verify_artifacts(const ZkArtifacts& artifacts, const CeremonyTranscript& transcript,
                      const Phase1Parameters& phase1, const circuit::ConstraintSystem& cs, ByteView check_seed,
                      std::string* diagnostic)
{
    auto fail = [&](const std::string& why) {
        if (diagnostic) *diagnostic = why;
        return false;
    };
    if (!artifacts.digest_valid()) return fail("artifact digest mismatch");
    if (const auto check = verify_transcript(transcript, phase1); !check) return fail(check.describe());
    const auto& pk = artifacts.proving_key;
    const auto& vk = artifacts.verification_key;
    if (!pk.cs) return fail("proving key without constraint system");
    const Digest cd = cs.digest();
    if (artifacts.program_digest != cs.program_digest) return fail("program digest mismatch");
    if (artifacts.transcript_digest != transcript.final_digest) return fail("transcript digest mismatch");
    if (transcript.circuit_digest != cd || pk.cs->digest() != cd) return fail("circuit digest mismatch");

    const std::size_t n = zk::qap_domain_size(cs);
    const std::size_t nv = cs.num_variables;
    const std::size_t np = cs.num_public;
    if (pk.domain_size != n || transcript.domain_size != n) return fail("domain size mismatch");
    if (pk.a_query.size() != nv || pk.b_g1_query.size() != nv || pk.b_g2_query.size() != nv ||
        pk.l_query.size() != nv - np - 1 || vk.ic.size() != np + 1 || pk.h_query.size() + 1 != n) {
        return fail("key lengths do not match the circuit");
    }

    const auto& enc = transcript.beacon->record.update;
    if (!(pk.alpha_g1 == enc.alpha_g1 && pk.beta_g1 == enc.beta_g1 && pk.delta_g1 == enc.delta_g1 &&
          pk.beta_g2 == enc.beta_g2 && pk.delta_g2 == enc.delta_g2 && vk.alpha_g1 == enc.alpha_g1 &&
          vk.beta_g2 == enc.beta_g2 && vk.gamma_g2 == enc.gamma_g2 && vk.delta_g2 == enc.delta_g2)) {
        return fail("key encodings differ from the transcript's final state");
    }
    if (combined_state_digest(enc, vk.ic, pk.l_query, pk.h_query) != transcript.beacon->record.state_digest) {
        return fail("query vectors differ from the transcript's final state digest");
    }

    const LagrangeView lag = lagrange_view(phase1, n);
    const QapColumns cols = qap_columns(cs);
    Rng rng(check_seed);
    std::vector<Fr> r(nv);
    for (auto& v : r) v = zk::random_element<Fr>(rng);

    // fold the per-variable combination onto the Lagrange rows
    std::vector<Fr> ca(n), cb(n), cc(n);
    for (std::size_t j = 0; j < nv; ++j) {
        for (const auto& e : cols.a[j]) ca[e.row] += r[j] * e.coeff;
        for (const auto& e : cols.b[j]) cb[e.row] += r[j] * e.coeff;
        for (const auto& e : cols.c[j]) cc[e.row] += r[j] * e.coeff;
    }
    const std::span<const Fr> rs(r);
    const G1 ra = zk::msm<G1, Fr>(pk.a_query, rs);
    const G1 rb1 = zk::msm<G1, Fr>(pk.b_g1_query, rs);
    const G2 rb2 = zk::msm<G2, Fr>(pk.b_g2_query, rs);
    if (!(ra == zk::msm<G1, Fr>(lag.g1, ca))) return fail("A query inconsistent with phase 1");
    if (!(rb1 == zk::msm<G1, Fr>(lag.g1, cb))) return fail("B (G1) query inconsistent with phase 1");
    if (!zk::same_ratio(rb1, G2::generator(), G1::generator(), rb2)) return fail("B (G2) query inconsistent");

    const G1 rc = zk::msm<G1, Fr>(lag.g1, cc);
    const G1 rl = zk::msm<G1, Fr>(pk.l_query, rs.subspan(np + 1));
    const G1 ric = zk::msm<G1, Fr>(vk.ic, rs.first(np + 1));
    const std::pair<G1, G2> lc[] = {{rl, G2(enc.delta_g2)},
                                    {ric, G2(enc.gamma_g2)},
                                    {-ra, G2(enc.beta_g2)},
                                    {-G1(enc.alpha_g1), rb2},
                                    {-rc, G2::generator()}};
    if (!zk::pairing_product_is_one(lc)) return fail("L/IC queries inconsistent with alpha, beta, gamma, delta");

    std::vector<Fr> rh(n - 1);
    for (auto& v : rh) v = zk::random_element<Fr>(rng);
    const std::span<const G1Affine> t(phase1.tau_powers_g1);
    const G1 zt = zk::msm<G1, Fr>(t.subspan(n, n - 1), rh) + -zk::msm<G1, Fr>(t.first(n - 1), rh);
    if (!zk::same_ratio(zk::msm<G1, Fr>(pk.h_query, rh), G2(enc.delta_g2), zt, G2::generator())) {
        return fail("H query inconsistent with delta");
    }
    if (diagnostic) diagnostic->clear();
    return true;
}

}  // namespace expresso::ceremony
