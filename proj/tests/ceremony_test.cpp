#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <functional>

#include "expresso/ceremony/artifacts.hpp"
#include "expresso/ceremony/testing.hpp"
#include "expresso/circuit/program.hpp"
#include "expresso/util/file.hpp"
#include "expresso/zk/fft.hpp"
#include "expresso/zk/hash_to_curve.hpp"
#include "expresso/zk/random.hpp"

using namespace expresso;
using namespace expresso::ceremony;
using circuit::BoilerplateProgram;
using circuit::ParameterDecl;
using circuit::ValueType;
using circuit::Visibility;
using zk::Fq;
using zk::Fq2;
namespace ct = expresso::ceremony::testing;

namespace {

ByteView bv(std::string_view s) { return as_bytes(s); }

const BoilerplateProgram& small_program()
{
    static const BoilerplateProgram p{
        "program small v1\n"
        "public c: field\n"
        "public d: field\n"
        "private a: field\n"
        "private b: field\n"
        "let s = a * b\n"
        "assert s * a == c\n"
        "assert a + b == d\n",
        {{"c", Visibility::Public, ValueType::Field},
         {"d", Visibility::Public, ValueType::Field},
         {"a", Visibility::Private, ValueType::Field},
         {"b", Visibility::Private, ValueType::Field}}};
    return p;
}

const circuit::ConstraintSystem& small_cs()
{
    static const auto cs = circuit::compile(small_program());
    return cs;
}

std::shared_ptr<const Phase1Parameters> small_phase1(std::string_view seed = "phase1")
{
    const auto n = static_cast<std::uint32_t>(zk::qap_domain_size(small_cs()));
    return std::make_shared<const Phase1Parameters>(phase1_generate(n, bv(seed)));
}

CeremonyState run_contributions(const std::shared_ptr<const Phase1Parameters>& p1, int count,
                                std::string_view entropy_prefix = "entropy")
{
    auto st = CeremonyState::begin(p1, small_cs());
    for (int i = 1; i <= count; ++i) {
        const std::string e = std::string(entropy_prefix) + std::to_string(i);
        st = contribute(st, "party" + std::to_string(i), bv(e)).first;
    }
    return st;
}

circuit::WitnessVector small_witness(const Fr& a, const Fr& b)
{
    return circuit::synthesize_witness(small_program(), small_cs(),
                                       {{"a", a}, {"b", b}, {"c", a * b * a}, {"d", a + b}});
}

}  // namespace

TEST(Phase1, ZerothPowersAreGenerators)
{
    const auto p1 = phase1_generate(8, bv("seed"));
    EXPECT_EQ(p1.tau_powers_g1.size(), 15u);
    EXPECT_EQ(p1.tau_powers_g2.size(), 8u);
    EXPECT_EQ(p1.alpha_tau_g1.size(), 8u);
    EXPECT_TRUE(G1(p1.tau_powers_g1[0]) == G1::generator());
    EXPECT_TRUE(G2(p1.tau_powers_g2[0]) == G2::generator());
}

TEST(Phase1, MatchesRecomputedSecrets)
{
    const auto p1 = phase1_generate(16, bv("seed"));
    const auto s = ct::phase1_secrets_from_seed(16, bv("seed"));
    Fr t = Fr::one();
    for (std::size_t i = 0; i < p1.tau_powers_g1.size(); ++i) {
        ASSERT_TRUE(G1(p1.tau_powers_g1[i]) == G1::generator() * t) << i;
        if (i < 16) {
            ASSERT_TRUE(G2(p1.tau_powers_g2[i]) == G2::generator() * t);
            ASSERT_TRUE(G1(p1.alpha_tau_g1[i]) == G1::generator() * (t * s.alpha));
            ASSERT_TRUE(G1(p1.beta_tau_g1[i]) == G1::generator() * (t * s.beta));
        }
        t *= s.tau;
    }
    EXPECT_TRUE(G2(p1.beta_g2) == G2::generator() * s.beta);
    const auto lag = zk::EvaluationDomain(16).lagrange_at(s.tau);
    for (std::size_t i = 0; i < 16; ++i) {
        ASSERT_TRUE(G1(p1.lagrange_g1[i]) == G1::generator() * lag[i]);
        ASSERT_TRUE(G2(p1.lagrange_g2[i]) == G2::generator() * lag[i]);
    }
}

TEST(Phase1, SpotCheckAndFullVerify)
{
    const auto p1 = phase1_generate(32, bv("seed"));
    EXPECT_TRUE(phase1_spot_check(p1, 10, bv("spot")));
    std::string why;
    EXPECT_TRUE(phase1_verify(p1, bv("check"), &why)) << why;
}

TEST(Phase1, VerifyRejectsTampering)
{
    const auto good = phase1_generate(16, bv("seed"));
    const G1Affine extra = (G1::generator() * Fr::from_u64(7)).to_affine();
    auto cases = std::vector<std::pair<std::string, std::function<void(Phase1Parameters&)>>>{
        {"g1 power", [&](Phase1Parameters& p) { p.tau_powers_g1[5] = extra; }},
        {"last g1 power", [&](Phase1Parameters& p) { p.tau_powers_g1.back() = extra; }},
        {"g2 power", [](Phase1Parameters& p) { p.tau_powers_g2[3] = G2::generator().dbl().to_affine(); }},
        {"alpha", [&](Phase1Parameters& p) { p.alpha_tau_g1[2] = extra; }},
        {"beta", [&](Phase1Parameters& p) { p.beta_tau_g1[9] = extra; }},
        {"beta g2", [](Phase1Parameters& p) { p.beta_g2 = G2::generator().to_affine(); }},
        {"lagrange", [&](Phase1Parameters& p) { p.lagrange_g1[0] = extra; }},
        {"alpha lagrange", [&](Phase1Parameters& p) { p.alpha_lagrange_g1[4] = extra; }},
        {"g2 lagrange", [](Phase1Parameters& p) { p.lagrange_g2[1] = G2::generator().to_affine(); }},
        {"length", [](Phase1Parameters& p) { p.beta_tau_g1.pop_back(); }},
    };
    for (auto& [name, mutate] : cases) {
        auto p = good;
        mutate(p);
        std::string why;
        EXPECT_FALSE(phase1_verify(p, bv("check"), &why)) << name;
        EXPECT_FALSE(why.empty()) << name;
    }
}

TEST(Phase1, SerializationRoundTrip)
{
    const auto p1 = phase1_generate(8, bv("seed"));
    const auto bytes = p1.serialize();
    const auto back = Phase1Parameters::deserialize(bytes);
    EXPECT_EQ(back.serialize(), bytes);
    EXPECT_EQ(back.digest(), p1.digest());
    auto cut = bytes;
    cut.pop_back();
    EXPECT_THROW(Phase1Parameters::deserialize(cut), Error);
}

TEST(Phase1, DegreeValidation)
{
    EXPECT_THROW(phase1_generate(12, bv("seed")), Error);
    try {
        phase1_generate(1, bv("seed"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::DegreeTooSmall);
    }
    const auto n = static_cast<std::uint32_t>(zk::qap_domain_size(small_cs()));
    auto tiny = std::make_shared<const Phase1Parameters>(phase1_generate(n / 2, bv("seed")));
    try {
        CeremonyState::begin(tiny, small_cs());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::DegreeTooSmall);
    }
}

TEST(HashToG2, LandsInSubgroupAndIsDeterministic)
{
    for (int i = 0; i < 4; ++i) {
        const std::string m = "msg" + std::to_string(i);
        const G2 p = zk::hash_to_g2(bv(m));
        EXPECT_FALSE(p.is_identity());
        EXPECT_TRUE(zk::in_prime_subgroup(p));
        EXPECT_TRUE(p == zk::hash_to_g2(bv(m)));
    }
    EXPECT_FALSE(zk::hash_to_g2(bv("a")) == zk::hash_to_g2(bv("b")));
}

TEST(HashToG2, BatchedSubgroupCheckCatchesCofactorComponent)
{
    // a point on the twist that is not in the r-torsion
    const Fq2 b = G2::coeff_b();
    G2Affine off;
    for (std::uint64_t x = 1;; ++x) {
        const Fq2 fx{Fq::from_u64(x), Fq::one()};
        if (auto y = (fx.square() * fx + b).sqrt()) {
            off = G2Affine{fx, *y, false};
            if (!zk::in_prime_subgroup(G2(off))) break;
        }
    }
    std::vector<G2Affine> pts;
    for (int i = 1; i <= 20; ++i) pts.push_back((G2::generator() * Fr::from_u64(i)).to_affine());
    EXPECT_TRUE(zk::all_in_prime_subgroup(pts, bv("s")));
    pts[13] = off;
    EXPECT_FALSE(zk::all_in_prime_subgroup(pts, bv("s")));
}

TEST(Ceremony, OneContributionVerifies)
{
    const auto p1 = small_phase1();
    auto st = run_contributions(p1, 1);
    const auto fin = finalize(st, bv("beacon"), "unit test", small_cs(), 1);
    const auto check = verify_transcript(fin.transcript, *p1);
    EXPECT_TRUE(check) << check.describe();
    std::string why;
    EXPECT_TRUE(verify_artifacts(fin.artifacts, fin.transcript, *p1, small_cs(), bv("c"), &why)) << why;
}

TEST(Ceremony, KeysMatchTrapdoorOracle)
{
    const auto p1 = small_phase1();
    auto st = run_contributions(p1, 3);
    const auto fin = finalize(st, bv("beacon"), "unit test", small_cs(), 4);
    const auto sec = ct::phase1_secrets_from_seed(p1->degree, bv("phase1"));
    Fr alpha = sec.alpha, beta = sec.beta, gamma = Fr::one(), delta = Fr::one();
    for (std::uint32_t i = 1; i <= 3; ++i) {
        const std::string e = "entropy" + std::to_string(i);
        const auto s = ct::contribution_shares(fin.transcript, i, bv(e));
        alpha *= s.alpha;
        beta *= s.beta;
        gamma *= s.gamma;
        delta *= s.delta;
    }
    const auto s = ct::beacon_shares(fin.transcript);
    const zk::Trapdoor td{sec.tau, alpha * s.alpha, beta * s.beta, gamma * s.gamma, delta * s.delta};
    const auto [pk, vk] = zk::setup_with_trapdoor(small_cs(), td);
    EXPECT_TRUE(pk.same_elements(fin.artifacts.proving_key));
    EXPECT_EQ(vk, fin.artifacts.verification_key);
}

TEST(Ceremony, LargerPhase1UsesInterpolatedBasis)
{
    const auto n = static_cast<std::uint32_t>(zk::qap_domain_size(small_cs()));
    auto p1 = std::make_shared<const Phase1Parameters>(phase1_generate(4 * n, bv("big")));
    auto st = run_contributions(p1, 1);
    const auto fin = finalize(st, bv("beacon"), "unit test", small_cs(), 1);
    EXPECT_TRUE(verify_transcript(fin.transcript, *p1));
    std::string why;
    EXPECT_TRUE(verify_artifacts(fin.artifacts, fin.transcript, *p1, small_cs(), bv("c"), &why)) << why;

    const auto sec = ct::phase1_secrets_from_seed(4 * n, bv("big"));
    const auto c = ct::contribution_shares(fin.transcript, 1, bv("entropy1"));
    const auto b = ct::beacon_shares(fin.transcript);
    const zk::Trapdoor td{sec.tau, sec.alpha * c.alpha * b.alpha, sec.beta * c.beta * b.beta, c.gamma * b.gamma,
                          c.delta * b.delta};
    EXPECT_TRUE(zk::setup_with_trapdoor(small_cs(), td).first.same_elements(fin.artifacts.proving_key));
}

TEST(Ceremony, ProofsFromCeremonyKeysVerify)
{
    const auto p1 = small_phase1();
    const auto fin = finalize(run_contributions(p1, 2), bv("beacon"), "unit test", small_cs(), 1);
    Rng rng("proofs");
    for (int i = 0; i < 5; ++i) {
        const Fr a = zk::random_element<Fr>(rng);
        const Fr b = zk::random_element<Fr>(rng);
        const auto w = small_witness(a, b);
        const auto proof = zk::groth16_prove(fin.artifacts.proving_key, w, rng);
        const std::vector<Fr> pub{w[1], w[2]};
        EXPECT_TRUE(zk::groth16_verify(fin.artifacts.verification_key, pub, proof));
        const std::vector<Fr> wrong{w[1], w[2] + Fr::one()};
        EXPECT_FALSE(zk::groth16_verify(fin.artifacts.verification_key, wrong, proof));
    }
}

TEST(Ceremony, FinalStateDiffersFromIntermediates)
{
    const auto p1 = small_phase1();
    auto st = CeremonyState::begin(p1, small_cs());
    std::vector<Digest> digests{st.state_digest()};
    for (int i = 1; i <= 3; ++i) {
        st = contribute(st, "p" + std::to_string(i), bv("e" + std::to_string(i))).first;
        digests.push_back(st.state_digest());
        EXPECT_EQ(st.transcript().records.back().state_digest, digests.back());
    }
    std::sort(digests.begin(), digests.end());
    EXPECT_EQ(std::unique(digests.begin(), digests.end()), digests.end());
}

TEST(Ceremony, EveryContributionAffectsTheDigest)
{
    const auto p1 = small_phase1();
    const auto base = finalize(run_contributions(p1, 3), bv("beacon"), "t", small_cs(), 1).artifacts.artifact_digest;
    for (int changed = 1; changed <= 3; ++changed) {
        auto st = CeremonyState::begin(p1, small_cs());
        for (int i = 1; i <= 3; ++i) {
            std::string e = "entropy" + std::to_string(i);
            if (i == changed) e += "!";
            st = contribute(st, "party" + std::to_string(i), bv(e)).first;
        }
        EXPECT_NE(finalize(st, bv("beacon"), "t", small_cs(), 1).artifacts.artifact_digest, base) << changed;
    }
    EXPECT_NE(finalize(run_contributions(p1, 3), bv("other beacon"), "t", small_cs(), 1).artifacts.artifact_digest,
              base);
}

TEST(Ceremony, CrossCeremonyProofsFail)
{
    const auto p1 = small_phase1();
    const auto one = finalize(run_contributions(p1, 2, "x"), bv("beacon"), "t", small_cs(), 1).artifacts;
    const auto two = finalize(run_contributions(p1, 2, "y"), bv("beacon"), "t", small_cs(), 1).artifacts;
    EXPECT_NE(one.artifact_digest, two.artifact_digest);
    Rng rng("cross");
    const auto w = small_witness(Fr::from_u64(3), Fr::from_u64(5));
    const std::vector<Fr> pub{w[1], w[2]};
    const auto proof = zk::groth16_prove(one.proving_key, w, rng);
    EXPECT_TRUE(zk::groth16_verify(one.verification_key, pub, proof));
    EXPECT_FALSE(zk::groth16_verify(two.verification_key, pub, proof));
}

TEST(Ceremony, NoRawSharesInSerializedOutput)
{
    const auto p1 = small_phase1();
    const auto fin = finalize(run_contributions(p1, 2), bv("beacon"), "t", small_cs(), 1);
    const Bytes blob = [&] {
        Bytes b = fin.artifacts.serialize();
        const Bytes t = fin.transcript.serialize();
        b.insert(b.end(), t.begin(), t.end());
        return b;
    }();
    for (std::uint32_t i = 1; i <= 2; ++i) {
        const auto s = ct::contribution_shares(fin.transcript, i, bv("entropy" + std::to_string(i)));
        for (const Fr& v : {s.alpha, s.beta, s.gamma, s.delta}) {
            std::array<std::uint8_t, 32> mont{};
            for (int k = 0; k < 32; ++k) mont[k] = static_cast<std::uint8_t>(v.montgomery()[k / 8] >> (8 * (k % 8)));
            for (const auto& enc : {v.to_bytes(), mont}) {
                EXPECT_EQ(std::search(blob.begin(), blob.end(), enc.begin(), enc.end()), blob.end());
            }
        }
    }
}

TEST(Transcript, ReplayedRecordRejected)
{
    const auto p1 = small_phase1();
    auto fin = finalize(run_contributions(p1, 2), bv("beacon"), "t", small_cs(), 1);
    auto t = fin.transcript;
    t.records.insert(t.records.begin() + 1, t.records[0]);
    const auto check = verify_transcript(t, *p1);
    EXPECT_FALSE(check);
    EXPECT_EQ(check.where, TranscriptCheck::Where::Record);
    EXPECT_EQ(check.record, 2u);
}

TEST(Transcript, SplicedRecordRejectedAtItsPosition)
{
    const auto p1 = small_phase1();
    const auto a = finalize(run_contributions(p1, 3, "a"), bv("beacon"), "t", small_cs(), 1).transcript;
    const auto b = finalize(run_contributions(p1, 3, "b"), bv("beacon"), "t", small_cs(), 1).transcript;

    auto whole = a;
    whole.records[1] = b.records[1];
    auto check = verify_transcript(whole, *p1);
    EXPECT_EQ(check.where, TranscriptCheck::Where::Record);
    EXPECT_EQ(check.record, 2u);

    // only the public update and proofs swapped, chain digest recomputed by the forger
    auto forged = a;
    forged.records[1].update = b.records[1].update;
    forged.records[1].proofs = b.records[1].proofs;
    check = verify_transcript(forged, *p1);
    EXPECT_EQ(check.where, TranscriptCheck::Where::Record);
    EXPECT_EQ(check.record, 2u);
}

TEST(Transcript, ReorderedRecordsRejected)
{
    const auto p1 = small_phase1();
    auto t = finalize(run_contributions(p1, 3), bv("beacon"), "t", small_cs(), 1).transcript;
    std::swap(t.records[1], t.records[2]);
    const auto check = verify_transcript(t, *p1);
    EXPECT_EQ(check.where, TranscriptCheck::Where::Record);
    EXPECT_EQ(check.record, 2u);
}

TEST(Transcript, MissingBeaconRejected)
{
    const auto p1 = small_phase1();
    auto t = finalize(run_contributions(p1, 2), bv("beacon"), "t", small_cs(), 1).transcript;
    t.beacon.reset();
    const auto check = verify_transcript(t, *p1);
    EXPECT_EQ(check.where, TranscriptCheck::Where::Beacon);
}

TEST(Transcript, BeaconNotDerivedFromValueRejected)
{
    const auto p1 = small_phase1();
    auto t = finalize(run_contributions(p1, 2), bv("beacon"), "t", small_cs(), 1).transcript;
    t.beacon->beacon = Bytes{'x'};
    EXPECT_EQ(verify_transcript(t, *p1).where, TranscriptCheck::Where::Beacon);
}

TEST(Transcript, TamperedPhase1Rejected)
{
    const auto p1 = small_phase1();
    const auto t = finalize(run_contributions(p1, 1), bv("beacon"), "t", small_cs(), 1).transcript;
    auto other = *p1;
    other.tau_powers_g1[3] = G1::generator().to_affine();
    const auto check = verify_transcript(t, other);
    EXPECT_EQ(check.where, TranscriptCheck::Where::Header);
}

TEST(Transcript, FooterAndSerialization)
{
    const auto p1 = small_phase1();
    auto t = finalize(run_contributions(p1, 2), bv("beacon"), "t", small_cs(), 1).transcript;
    const auto back = CeremonyTranscript::deserialize(t.serialize());
    EXPECT_TRUE(verify_transcript(back, *p1));
    EXPECT_EQ(back.serialize(), t.serialize());
    const auto manifest = t.manifest();
    EXPECT_NE(manifest.find("record 2 contributor=party2"), std::string::npos);
    EXPECT_NE(manifest.find("beacon source=t"), std::string::npos);
    t.final_digest[0] ^= 1;
    EXPECT_EQ(verify_transcript(t, *p1).where, TranscriptCheck::Where::Footer);
}

TEST(Ceremony, ErrorCases)
{
    const auto p1 = small_phase1();
    const auto st = CeremonyState::begin(p1, small_cs());
    try {
        finalize(st, bv("beacon"), "t", small_cs(), 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::EmptyCeremony);
    }
    const auto one = contribute(st, "p", bv("e")).first;
    EXPECT_THROW(finalize(one, {}, "t", small_cs(), 1), Error);
    EXPECT_THROW(contribute(st, "", bv("e")), Error);
    EXPECT_THROW(contribute(st, "p", {}), Error);
    const auto other = circuit::compile(BoilerplateProgram::membership());
    EXPECT_THROW(finalize(one, bv("beacon"), "t", other, 1), Error);
}

TEST(Artifacts, ContainerRoundTripAndTamper)
{
    const auto p1 = small_phase1();
    const auto a = finalize(run_contributions(p1, 1), bv("beacon"), "t", small_cs(), 7).artifacts;
    EXPECT_EQ(a.version, 7u);
    EXPECT_TRUE(a.digest_valid());
    const auto bytes = a.serialize();
    const auto back = ZkArtifacts::deserialize(bytes);
    EXPECT_EQ(back.artifact_digest, a.artifact_digest);
    EXPECT_EQ(back.serialize(), bytes);
    auto bad = bytes;
    bad[40] ^= 1;
    EXPECT_THROW(ZkArtifacts::deserialize(bad), Error);

    const auto v8 = a.with_version(8);
    EXPECT_NE(v8.artifact_digest, a.artifact_digest);
    EXPECT_TRUE(v8.digest_valid());

    const auto dir = std::filesystem::temp_directory_path() / "expresso_artifacts_test";
    std::filesystem::remove_all(dir);
    a.save(dir / "a.zka");
    EXPECT_EQ(ZkArtifacts::load(dir / "a.zka").artifact_digest, a.artifact_digest);
    write_file_atomic(dir / "a.zka.sha256", as_bytes(std::string_view("00\n")));
    EXPECT_THROW(ZkArtifacts::load(dir / "a.zka"), Error);
    std::filesystem::remove_all(dir);
}

TEST(Artifacts, VerifyRejectsSubstitutedKeys)
{
    const auto p1 = small_phase1();
    const auto fin = finalize(run_contributions(p1, 1), bv("beacon"), "t", small_cs(), 1);
    const auto other = finalize(run_contributions(p1, 1, "other"), bv("beacon"), "t", small_cs(), 1);
    std::string why;
    auto swapped = fin.artifacts;
    swapped.verification_key = other.artifacts.verification_key;
    swapped.artifact_digest = swapped.compute_digest();
    EXPECT_FALSE(verify_artifacts(swapped, fin.transcript, *p1, small_cs(), bv("c"), &why));

    auto h = fin.artifacts;
    h.proving_key.h_query[0] = G1::generator().to_affine();
    h.artifact_digest = h.compute_digest();
    EXPECT_FALSE(verify_artifacts(h, fin.transcript, *p1, small_cs(), bv("c"), &why));

    EXPECT_FALSE(verify_artifacts(fin.artifacts, other.transcript, *p1, small_cs(), bv("c"), &why));
}
