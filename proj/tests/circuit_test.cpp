#include <gtest/gtest.h>

#include "expresso/circuit/program.hpp"
#include "expresso/util/file.hpp"
#include "expresso/zk/groth16.hpp"
#include "expresso/zk/random.hpp"

using namespace expresso;
using circuit::BoilerplateProgram;
using circuit::ClientCredential;
using circuit::ParameterDecl;
using circuit::ValueType;
using circuit::Visibility;
using zk::EdwardsPoint;
using zk::Fr;
using zk::JubScalar;

namespace {

const circuit::ConstraintSystem& membership_cs()
{
    static const auto cs = circuit::compile(BoilerplateProgram::membership());
    return cs;
}

struct Keys {
    zk::ProvingKey pk;
    zk::VerificationKey vk;
};

const Keys& keys(int which = 0)
{
    static const auto make = [](std::string_view seed) {
        Rng rng(seed);
        const zk::Trapdoor t{zk::random_nonzero<Fr>(rng), zk::random_nonzero<Fr>(rng), zk::random_nonzero<Fr>(rng),
                             zk::random_nonzero<Fr>(rng), zk::random_nonzero<Fr>(rng)};
        auto [pk, vk] = zk::setup_with_trapdoor(membership_cs(), t);
        return Keys{std::move(pk), std::move(vk)};
    };
    static const Keys a = make("keys-a");
    static const Keys b = make("keys-b");
    return which == 0 ? a : b;
}

zk::SigningKeyPair idp_key(std::string_view seed = "idp credential key seed, 32+ bytes")
{
    return zk::generate_signing_keypair(as_bytes(seed));
}

ClientCredential issue(const zk::SigningKeyPair& k, const Fr& client_id)
{
    return {client_id, zk::sign(k.sk, client_id), k.pk};
}

circuit::InputAssignment inputs_for(const EdwardsPoint& pk, const zk::Signature& sig, const Fr& m)
{
    return {{"pk", pk}, {"R", sig.R}, {"S", Fr::from_canonical(sig.S.to_canonical())}, {"M", m}};
}

Fr flip_bit(const Fr& v, unsigned bit)
{
    auto limbs = v.to_canonical();
    limbs[bit / 64] ^= std::uint64_t{1} << (bit % 64);
    return Fr::from_limbs_reduced(limbs);
}

const BoilerplateProgram& mul_program()
{
    static const BoilerplateProgram p{"program mul v1\n"
                                      "public c: field\n"
                                      "private a: field\n"
                                      "private b: field\n"
                                      "assert a * b == c\n",
                                      {{"c", Visibility::Public, ValueType::Field},
                                       {"a", Visibility::Private, ValueType::Field},
                                       {"b", Visibility::Private, ValueType::Field}}};
    return p;
}

}  // namespace

TEST(Compile, DeterministicWithTwoPublicInputs)
{
    const auto again = circuit::compile(BoilerplateProgram::membership());
    EXPECT_EQ(again.digest(), membership_cs().digest());
    EXPECT_EQ(again, membership_cs());
    EXPECT_EQ(membership_cs().public_input_count(), 2u);
    EXPECT_GT(membership_cs().constraint_count(), 1000u);
    EXPECT_EQ(BoilerplateProgram::membership().parameter_schema, BoilerplateProgram::membership_schema());
}

TEST(Compile, ProgramDigestMatchesCommittedSidecar)
{
    const auto& p = BoilerplateProgram::membership();
    EXPECT_EQ(p.program_digest(), sha256(as_bytes(p.source_text)));
    const Bytes sidecar = read_file(EXPRESSO_SOURCE_DIR "/programs/membership.zkp.sha256");
    std::string hex(sidecar.begin(), sidecar.end());
    hex.erase(hex.find_last_not_of(" \n\r\t") + 1);
    EXPECT_EQ(hex.substr(0, 64), to_hex(p.program_digest()));
    EXPECT_EQ(membership_cs().program_digest, p.program_digest());
}

TEST(Compile, MultiplicationIsExactlyOneConstraint)
{
    const auto cs = circuit::compile(mul_program());
    ASSERT_EQ(cs.constraint_count(), 1u);
    ASSERT_EQ(cs.variable_count(), 4u);  // [1, c, a, b]
    // hand-built oracle: a * b = c
    const circuit::Constraint expected{circuit::LinearCombination::variable(2), circuit::LinearCombination::variable(3),
                                       circuit::LinearCombination::variable(1)};
    EXPECT_EQ(cs.constraints[0], expected);

    const auto w = circuit::synthesize_witness(mul_program(), cs,
                                               {{"a", Fr::from_u64(3)}, {"b", Fr::from_u64(5)}, {"c", Fr::from_u64(15)}});
    EXPECT_TRUE(circuit::evaluate(cs, w));
    const auto bad = circuit::synthesize_witness(
        mul_program(), cs, {{"a", Fr::from_u64(3)}, {"b", Fr::from_u64(5)}, {"c", Fr::from_u64(16)}});
    EXPECT_FALSE(circuit::evaluate(cs, bad));
}

TEST(Compile, ParseErrorsCarryPosition)
{
    auto expect_parse_error = [](const std::string& src, const std::string& where) {
        BoilerplateProgram p{src, mul_program().parameter_schema};
        try {
            circuit::compile(p);
            ADD_FAILURE() << "compiled: " << src;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::ParseError);
            EXPECT_NE(std::string(e.what()).find(where), std::string::npos) << e.what();
        }
    };
    expect_parse_error("program mul v1\npublic c: field\nprivate a: field\nprivate b: field\nassert a * b = c\n",
                       "line 5");
    expect_parse_error("public c: field\n", "line 1, column 1");
    expect_parse_error("program mul v1\npublic c: matrix\n", "line 2");
    expect_parse_error("program mul v1\npublic c: field\nprivate a: field\nprivate b: field\nassert a $ b == c\n",
                       "line 5, column 10");
}

TEST(Compile, SchemaMismatch)
{
    auto p = BoilerplateProgram::membership();
    std::swap(p.parameter_schema[1], p.parameter_schema[2]);
    try {
        circuit::compile(p);
        FAIL() << "schema swap compiled";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::SchemaMismatch);
    }
    auto q = BoilerplateProgram::membership();
    q.parameter_schema[0].visibility = Visibility::Private;
    EXPECT_THROW(circuit::compile(q), Error);

    // witness synthesis against a foreign constraint system
    const auto mul_cs = circuit::compile(mul_program());
    const auto k = idp_key();
    const auto cred = issue(k, Fr::from_u64(7));
    EXPECT_THROW(circuit::build_witness(mul_cs, k.pk, cred), Error);
}

TEST(Witness, HonestCredentialSatisfies)
{
    const auto k = idp_key();
    const auto cred = issue(k, Fr::from_u64(42));
    const auto w = circuit::build_witness(membership_cs(), k.pk, cred);
    EXPECT_EQ(w.size(), membership_cs().variable_count());
    EXPECT_TRUE(circuit::evaluate(membership_cs(), w));
    const auto pub = circuit::membership_public_inputs(k.pk);
    ASSERT_EQ(pub.size(), 2u);
    EXPECT_EQ(w[1], pub[0]);
    EXPECT_EQ(w[2], pub[1]);
}

TEST(Witness, InvalidCredentialFailsFast)
{
    const auto k = idp_key();
    auto cred = issue(k, Fr::from_u64(42));
    cred.signature.S = cred.signature.S + JubScalar::one();
    try {
        circuit::build_witness(membership_cs(), k.pk, cred);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::InvalidCredential);
    }
    // signed by a different key
    const auto other = idp_key("a different credential key seed 0123");
    EXPECT_THROW(circuit::build_witness(membership_cs(), k.pk, issue(other, Fr::from_u64(42))), Error);
}

TEST(Witness, PublicSliceIdenticalAcrossClients)
{
    Rng rng("clients");
    const auto k = idp_key();
    const auto n = 1 + membership_cs().public_input_count();
    const auto w1 = circuit::build_witness(membership_cs(), k.pk, issue(k, zk::random_element<Fr>(rng)));
    const auto w2 = circuit::build_witness(membership_cs(), k.pk, issue(k, zk::random_element<Fr>(rng)));
    EXPECT_TRUE(std::equal(w1.begin(), w1.begin() + n, w2.begin()));
    EXPECT_NE(w1, w2);
}

TEST(Evaluate, ZeroWitnessAndLengthMismatch)
{
    circuit::WitnessVector zero(membership_cs().variable_count(), Fr::zero());
    zero[0] = Fr::one();
    EXPECT_FALSE(circuit::evaluate(membership_cs(), zero));
    zero.pop_back();
    try {
        circuit::evaluate(membership_cs(), zero);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::LengthMismatch);
    }
}

TEST(Evaluate, SingleWireMutationsAreCaught)
{
    Rng rng("wire mutations");
    const auto k = idp_key();
    const auto w = circuit::build_witness(membership_cs(), k.pk, issue(k, Fr::from_u64(9)));
    const std::size_t samples = 500;
    std::size_t caught = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        auto m = w;
        const auto idx = 1 + rng.uniform(m.size() - 1);
        m[idx] += zk::random_nonzero<Fr>(rng);
        if (!circuit::evaluate(membership_cs(), m)) ++caught;
    }
    EXPECT_GE(caught * 100, samples * 99) << caught << " of " << samples;
}

// Native Schnorr verification and the in-circuit check agree, valid and invalid instances alike.
TEST(Evaluate, AgreesWithNativeVerification)
{
    Rng rng("native vs circuit");
    const auto k = idp_key();
    const auto other = idp_key("some other key seed for mismatches 99");
    std::size_t valid = 0;
    for (int i = 0; i < 100; ++i) {
        const Fr m = zk::random_element<Fr>(rng);
        zk::Signature sig = zk::sign(k.sk, m);
        EdwardsPoint pk = k.pk;
        Fr msg = m;
        switch (rng.uniform(5)) {
        case 0: break;
        case 1: sig.S = sig.S + JubScalar::one(); break;
        case 2: msg = m + Fr::one(); break;
        case 3: pk = other.pk; break;
        case 4: sig.R = sig.R + EdwardsPoint::generator(); break;
        }
        const bool native = zk::verify_native(pk, msg, sig);
        valid += native;
        const auto w = circuit::synthesize_witness(BoilerplateProgram::membership(), membership_cs(),
                                                   inputs_for(pk, sig, msg));
        EXPECT_EQ(circuit::evaluate(membership_cs(), w), native) << "instance " << i;
    }
    EXPECT_GT(valid, 5u);
    EXPECT_LT(valid, 95u);
}

TEST(Serialization, ConstraintSystemRoundTrip)
{
    const auto bytes = membership_cs().serialize();
    EXPECT_EQ(circuit::ConstraintSystem::deserialize(bytes), membership_cs());
    auto cut = bytes;
    cut.resize(cut.size() - 5);
    EXPECT_THROW(circuit::ConstraintSystem::deserialize(cut), Error);
}

TEST(Groth16, CompletenessOverRandomCredentials)
{
    Rng rng("completeness");
    const auto& kp = keys();
    for (int i = 0; i < 50; ++i) {
        const auto idp = zk::generate_signing_keypair(rng.bytes(32));
        const auto cred = issue(idp, zk::random_element<Fr>(rng));
        const auto w = circuit::build_witness(membership_cs(), idp.pk, cred);
        const auto proof = zk::groth16_prove(kp.pk, w, rng);
        std::string why;
        ASSERT_TRUE(zk::groth16_verify(kp.vk, circuit::membership_public_inputs(idp.pk), proof, &why))
            << "credential " << i << ": " << why;
    }
}

TEST(Groth16, PrivateWitnessBitFlipsNeverVerify)
{
    Rng rng("soundness");
    const auto& kp = keys();
    const auto k = idp_key();
    const auto w = circuit::build_witness(membership_cs(), k.pk, issue(k, Fr::from_u64(1234)));
    const auto pub = circuit::membership_public_inputs(k.pk);
    const auto first_private = 1 + membership_cs().public_input_count();
    std::size_t refused_at_proving = 0, false_accepts = 0;
    for (int i = 0; i < 200; ++i) {
        auto m = w;
        const auto idx = first_private + rng.uniform(m.size() - first_private);
        m[idx] = flip_bit(m[idx], static_cast<unsigned>(rng.uniform(254)));
        try {
            const auto proof = zk::groth16_prove(kp.pk, m, rng);
            if (zk::groth16_verify(kp.vk, pub, proof)) ++false_accepts;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::UnsatisfiedConstraints);
            ++refused_at_proving;
        }
    }
    EXPECT_EQ(false_accepts, 0u);
    EXPECT_EQ(refused_at_proving, 200u);
}

TEST(Groth16, ProofsAreRandomizedAndBound)
{
    Rng rng("binding");
    const auto& kp = keys();
    const auto k = idp_key();
    const auto w = circuit::build_witness(membership_cs(), k.pk, issue(k, Fr::from_u64(77)));
    auto pub = circuit::membership_public_inputs(k.pk);
    const auto p1 = zk::groth16_prove(kp.pk, w, rng);
    const auto p2 = zk::groth16_prove(kp.pk, w, rng);
    EXPECT_TRUE(zk::groth16_verify(kp.vk, pub, p1));
    EXPECT_TRUE(zk::groth16_verify(kp.vk, pub, p2));
    EXPECT_NE(p1.serialize(), p2.serialize());

    // another setup of the same circuit
    EXPECT_FALSE(zk::groth16_verify(keys(1).vk, pub, p1));

    auto shifted = pub;
    shifted[0] += Fr::one();
    EXPECT_FALSE(zk::groth16_verify(kp.vk, shifted, p1));
    std::string why;
    EXPECT_FALSE(zk::groth16_verify(kp.vk, std::vector<Fr>{pub[0]}, p1, &why));
    EXPECT_FALSE(why.empty());
}

TEST(Groth16, SerializationRoundTrips)
{
    Rng rng("serialization");
    const auto& kp = keys();
    const auto k = idp_key();
    const auto proof = zk::groth16_prove(kp.pk, circuit::build_witness(membership_cs(), k.pk, issue(k, Fr::one())), rng);
    const auto bytes = proof.serialize();
    EXPECT_LE(bytes.size(), 4096u);
    EXPECT_EQ(zk::Groth16Proof::deserialize(bytes), proof);
    EXPECT_EQ(zk::VerificationKey::deserialize(kp.vk.serialize()), kp.vk);
    EXPECT_TRUE(zk::ProvingKey::deserialize(kp.pk.serialize()).same_elements(kp.pk));

    auto flipped = bytes;
    flipped[bytes.size() / 2] ^= 0x01;
    bool rejected = false;
    try {
        rejected = !zk::groth16_verify(kp.vk, circuit::membership_public_inputs(k.pk),
                                       zk::Groth16Proof::deserialize(flipped));
    } catch (const Error&) {
        rejected = true;
    }
    EXPECT_TRUE(rejected);
    EXPECT_THROW(zk::Groth16Proof::deserialize(ByteView(bytes).first(bytes.size() - 1)), Error);
}

TEST(Groth16, WrongLengthWitnessIsKeyMismatch)
{
    Rng rng("length");
    circuit::WitnessVector w(3, Fr::one());
    try {
        zk::groth16_prove(keys().pk, w, rng);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::KeyMismatch);
    }
}
