#include <gtest/gtest.h>

#include <map>
#include <set>

#include "expresso/zk/babyjubjub.hpp"
#include "expresso/zk/encoding.hpp"
#include "expresso/zk/pairing.hpp"
#include "expresso/zk/poseidon.hpp"
#include "expresso/zk/random.hpp"
#include "expresso/zk/signature.hpp"

using namespace expresso;
using namespace expresso::zk;

namespace {

Fr fr(std::uint64_t v) { return Fr::from_u64(v); }

}  // namespace

// ---- fields ----

TEST(Field, ArithmeticMatchesSmallIntegers)
{
    EXPECT_EQ(fr(7) * fr(6), fr(42));
    EXPECT_EQ(fr(5) - fr(7) + fr(2), Fr::zero());
    EXPECT_EQ(fr(3).inverse() * fr(3), Fr::one());
    EXPECT_EQ(Fr::from_i64(-1) + fr(1), Fr::zero());
    EXPECT_EQ(fr(1234567).to_dec(), "1234567");
}

TEST(Field, ByteRoundTripAndCanonicalRejection)
{
    Rng rng("field-bytes");
    for (int i = 0; i < 200; ++i) {
        const Fr a = random_element<Fr>(rng);
        const auto bytes = a.to_bytes();
        EXPECT_EQ(Fr::from_bytes(bytes), a);
        const Fq b = random_element<Fq>(rng);
        EXPECT_EQ(Fq::from_bytes(b.to_bytes()), b);
    }
    // the modulus itself is not canonical
    std::array<std::uint8_t, 32> p{};
    for (int i = 0; i < 32; ++i) p[i] = static_cast<std::uint8_t>(Fr::kModulus[i / 8] >> (8 * (i % 8)));
    EXPECT_FALSE(Fr::from_bytes(p).has_value());
    EXPECT_FALSE(Fr::from_bytes(Bytes(31, 0)).has_value());
}

TEST(Field, SqrtAndInverseProperties)
{
    Rng rng("field-sqrt");
    for (int i = 0; i < 50; ++i) {
        const Fr a = random_nonzero<Fr>(rng);
        const auto r = a.square().sqrt();
        ASSERT_TRUE(r.has_value());
        EXPECT_EQ(r->square(), a.square());
        EXPECT_EQ(a * a.inverse(), Fr::one());
        const Fq2 z{random_element<Fq>(rng), random_element<Fq>(rng)};
        const auto zr = z.square().sqrt();
        ASSERT_TRUE(zr.has_value());
        EXPECT_EQ(zr->square(), z.square());
    }
}

TEST(Field, BatchInverseMatchesSingle)
{
    Rng rng("batch-inv");
    std::vector<Fr> v;
    for (int i = 0; i < 40; ++i) v.push_back(i % 7 == 0 ? Fr::zero() : random_element<Fr>(rng));
    auto w = v;
    batch_inverse<Fr>(w);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(w[i], v[i].inverse());
}

// ---- pairing groups ----

TEST(Pairing, GeneratorsAndOrders)
{
    EXPECT_TRUE(G1::generator().is_on_curve());
    EXPECT_TRUE(G2::generator().is_on_curve());
    EXPECT_TRUE(G1::generator().mul(Fr::kModulus).is_identity());
    EXPECT_TRUE(in_prime_subgroup(G2::generator()));
}

TEST(Pairing, Bilinearity)
{
    Rng rng("bilinear");
    const Fr a = random_nonzero<Fr>(rng);
    const Fr b = random_nonzero<Fr>(rng);
    const G1 p = G1::generator();
    const G2 q = G2::generator();
    const Fq12 lhs = pairing(p * a, q * b);
    EXPECT_EQ(lhs, pairing(p * (a * b), q));
    EXPECT_EQ(lhs, pairing(p, q * (a * b)));
    EXPECT_FALSE(pairing(p, q).is_one());
    EXPECT_TRUE(same_ratio(p * a, q, p, q * a));
    EXPECT_FALSE(same_ratio(p * a, q, p, q * b));
}

TEST(Pairing, KnownValueOfGeneratorPairing)
{
    // Lowest Fq coefficient of e(G1, G2) for the EIP-197 generators, as produced by this
    // implementation once bilinearity was established; guards against silent regressions.
    const Fq12 e = pairing(G1::generator(), G2::generator());
    EXPECT_EQ(e.c0.c0.c0.to_dec(), "8493334370784016972005089913588211327688223499729897951716206968320726508021");
}

TEST(Encoding, G1G2RoundTrip)
{
    Rng rng("enc");
    for (int i = 0; i < 20; ++i) {
        const G1 p = G1::generator() * random_element<Fr>(rng);
        const G2 q = G2::generator() * random_element<Fr>(rng);
        ByteWriter w;
        write_g1(w, p);
        write_g2(w, q);
        ASSERT_EQ(w.size(), kG1Bytes + kG2Bytes);
        ByteReader r(w.bytes());
        EXPECT_EQ(G1(read_g1(r)), p);
        EXPECT_EQ(G2(read_g2(r)), q);
        EXPECT_TRUE(r.done());
    }
    ByteWriter w;
    write_g1(w, G1::identity());
    write_g2(w, G2::identity());
    ByteReader r(w.bytes());
    EXPECT_TRUE(read_g1(r).infinity);
    EXPECT_TRUE(read_g2(r).infinity);
}

TEST(Encoding, RejectsOffCurveAndBadFlags)
{
    // x = 0 gives y^2 = 3, a non-residue mod p
    ByteWriter w;
    w.u8(0x00);
    write_field(w, Fq::zero());
    ByteReader r(w.bytes());
    EXPECT_THROW(read_g1(r), Error);

    ByteWriter bad;
    bad.u8(0x07);
    write_field(bad, Fq::one());
    ByteReader rb(bad.bytes());
    EXPECT_THROW(read_g1(rb), Error);

    ByteWriter nonzero_identity;
    nonzero_identity.u8(0x02);
    write_field(nonzero_identity, Fq::one());
    ByteReader ri(nonzero_identity.bytes());
    EXPECT_THROW(read_g1(ri), Error);
}

TEST(Encoding, G2SubgroupCheckRejectsCofactorPoints)
{
    // Find a twist point outside the r-torsion by trying small x values.
    for (std::uint64_t x = 1; x < 100; ++x) {
        const Fq2 fx{Fq::from_u64(x), Fq::zero()};
        const auto y = (fx.square() * fx + G2::coeff_b()).sqrt();
        if (!y) continue;
        const G2Affine pt{fx, *y, false};
        ByteWriter w;
        write_g2(w, pt);
        ByteReader r(w.bytes());
        EXPECT_THROW(read_g2(r, SubgroupCheck::Enforce), Error);
        ByteReader r2(w.bytes());
        EXPECT_EQ(read_g2(r2, SubgroupCheck::Skip), pt);
        return;
    }
    FAIL() << "no twist point found";
}

// ---- Poseidon ----

TEST(Poseidon, MatchesCircomlibReferenceVector)
{
    const Fr in[2] = {fr(1), fr(2)};
    EXPECT_EQ(poseidon_circom(in).to_hex(), "115cc0f5e7d690413df64c6b9662e9cf2a3617f2743245519e19607a4417189a");
}

TEST(Poseidon, SpongeMatchesIndependentReference)
{
    // Values from tools/poseidon_reference.py (plain-integer implementation).
    EXPECT_EQ(circuit_hash({fr(1), fr(2), fr(3)}).to_hex(),
              "81d5dcd0453291896a51c6d54776fc9ecadbb3b6699581bffecb059e53e0a33");
    EXPECT_EQ(circuit_hash({fr(1), fr(2), fr(3), fr(4), fr(5), fr(6), fr(7)}).to_hex(),
              "2be543e19ffcfb64c3cce72f89d968f1e2d70dde6468f7101df3166dc52f3978");
}

TEST(Poseidon, DeterministicOrderSensitiveAndRejectsEmpty)
{
    Rng rng("poseidon-order");
    for (int i = 0; i < 100; ++i) {
        const Fr a = random_element<Fr>(rng);
        const Fr b = random_element<Fr>(rng);
        if (a == b) continue;
        EXPECT_EQ(circuit_hash({a, b}), circuit_hash({a, b}));
        EXPECT_NE(circuit_hash({a, b}), circuit_hash({b, a}));
    }
    EXPECT_THROW(circuit_hash(std::span<const Fr>{}), Error);
    // length is absorbed: [x] and [x, 0] differ
    EXPECT_NE(circuit_hash({fr(9)}), circuit_hash({fr(9), fr(0)}));
}

// ---- Baby Jubjub ----

TEST(BabyJubjub, GeneratorOnCurveWithPrimeOrder)
{
    const auto& g = EdwardsPoint::generator();
    EXPECT_TRUE(g.is_on_curve());
    EXPECT_TRUE(g.in_subgroup());
    EXPECT_FALSE(g.is_identity());
    // a is a square and d is not, so the addition law is complete
    EXPECT_EQ(edwards_a().legendre(), 1);
    EXPECT_EQ(edwards_d().legendre(), -1);
}

TEST(BabyJubjub, ScalarMulMatchesRepeatedAddition)
{
    const auto& g = EdwardsPoint::generator();
    EdwardsPoint acc = EdwardsPoint::identity();
    for (std::uint64_t k = 0; k < 40; ++k) {
        EXPECT_EQ(g.mul(Limbs{k, 0, 0, 0}), acc) << k;
        acc = acc + g;
    }
    EXPECT_EQ(g + (-g), EdwardsPoint::identity());
}

TEST(BabyJubjub, EncodingRoundTrip)
{
    Rng rng("bjj-enc");
    for (int i = 0; i < 30; ++i) {
        const EdwardsPoint p = EdwardsPoint::generator() * random_element<JubScalar>(rng);
        const auto bytes = p.to_bytes();
        EXPECT_EQ(EdwardsPoint::from_bytes(bytes), p);
    }
    EXPECT_EQ(EdwardsPoint::from_bytes(EdwardsPoint::identity().to_bytes()), EdwardsPoint::identity());
    auto bad = EdwardsPoint::generator().to_bytes();
    bad[0] = 5;
    EXPECT_FALSE(EdwardsPoint::from_bytes(bad).has_value());
}

// ---- signatures ----

TEST(Signature, KeypairDeterminismAndSmallScalars)
{
    const Bytes seed(32, 0x11);
    const auto a = generate_signing_keypair(seed);
    const auto b = generate_signing_keypair(seed);
    EXPECT_EQ(a.sk, b.sk);
    EXPECT_EQ(a.pk, b.pk);
    EXPECT_EQ(keypair_from_scalar(JubScalar::one()).pk, EdwardsPoint::generator());
    EdwardsPoint acc = EdwardsPoint::identity();
    for (std::uint64_t k = 1; k <= 16; ++k) {
        acc = acc + EdwardsPoint::generator();
        EXPECT_EQ(keypair_from_scalar(JubScalar::from_u64(k)).pk, acc);
    }
    EXPECT_THROW(generate_signing_keypair(Bytes(16, 1)), Error);
    EXPECT_THROW(keypair_from_scalar(JubScalar::zero()), Error);
}

TEST(Signature, SignVerifyDeterminismAndMutations)
{
    Rng rng("sig");
    for (int i = 0; i < 20; ++i) {
        const auto kp = generate_signing_keypair(rng.bytes(32));
        const Fr m = random_element<Fr>(rng);
        const Signature s = sign(kp.sk, m);
        EXPECT_TRUE(verify_native(kp.pk, m, s));
        EXPECT_EQ(sign(kp.sk, m), s);
        Signature bumped = s;
        bumped.S += JubScalar::one();
        EXPECT_FALSE(verify_native(kp.pk, m, bumped));
        // flip one bit of the message
        auto mb = m.to_bytes();
        mb[rng.uniform(31)] ^= static_cast<std::uint8_t>(1u << rng.uniform(8));
        const auto m2 = Fr::from_bytes(mb);
        if (m2) EXPECT_FALSE(verify_native(kp.pk, *m2, s));
        const auto back = Signature::from_bytes(s.to_bytes());
        ASSERT_TRUE(back.has_value());
        EXPECT_EQ(*back, s);
    }
}

TEST(Signature, RejectsRWithTorsionComponent)
{
    const auto kp = generate_signing_keypair(Bytes(32, 0x42));
    const Fr m = fr(99);
    Signature s = sign(kp.sk, m);
    // A point of order 2 is (0, -1); adding it keeps R on the curve but leaves the subgroup.
    const EdwardsPoint t2{Fr::zero(), -Fr::one()};
    ASSERT_TRUE(t2.is_on_curve());
    s.R = s.R + t2;
    EXPECT_FALSE(verify_native(kp.pk, m, s));
    Signature off = sign(kp.sk, m);
    off.R = EdwardsPoint{fr(1), fr(1)};
    EXPECT_FALSE(verify_native(kp.pk, m, off));
}

// Without R in the challenge, anyone can pick S and solve for R. The bound challenge stops that.
TEST(Signature, ChallengeBindsRAgainstKeylessForgery)
{
    Rng rng("forge");
    for (int i = 0; i < 10; ++i) {
        const auto kp = generate_signing_keypair(rng.bytes(32));
        const Fr m = random_element<Fr>(rng);
        const Fr h_unbound = circuit_hash({kp.pk.x(), kp.pk.y(), m});
        const JubScalar S = random_element<JubScalar>(rng);
        const EdwardsPoint R = EdwardsPoint::generator() * S + -(kp.pk * h_unbound);
        ASSERT_TRUE(R.in_subgroup());
        // the forgery satisfies the unbound equation...
        EXPECT_EQ(EdwardsPoint::generator() * S, R + kp.pk * h_unbound);
        // ...and fails the real one
        EXPECT_FALSE(verify_native(kp.pk, m, Signature{R, S}));
    }
}

// ---- exhaustive check on a toy Edwards group ----

namespace {

// x^2 + y^2 = 1 + 2 x^2 y^2 over F_101: 104 points, prime subgroup of order 13, cofactor 8.
struct Toy {
    static constexpr int kP = 101;
    static constexpr int kD = 2;
    static constexpr int kQ = 13;
    struct Point {
        int x = 0, y = 1;
        friend bool operator==(const Point&, const Point&) = default;
        friend auto operator<=>(const Point&, const Point&) = default;
    };
    using Scalar = int;

    static int mod(long v) { return static_cast<int>(((v % kP) + kP) % kP); }
    static int inv(int a)
    {
        int r = 1;
        for (int e = kP - 2, b = a; e > 0; e >>= 1, b = mod(static_cast<long>(b) * b))
            if (e & 1) r = mod(static_cast<long>(r) * b);
        return r;
    }
    static Point add(const Point& p, const Point& q)
    {
        const long t = mod(static_cast<long>(kD) * p.x % kP * q.x % kP * p.y % kP * q.y);
        return {mod(static_cast<long>(p.x * q.y + p.y * q.x) % kP * inv(mod(1 + t))),
                mod(static_cast<long>(p.y * q.y - p.x * q.x) % kP * inv(mod(1 - t)))};
    }
    static Point mul(const Point& p, int k)
    {
        Point acc;
        for (int i = 0; i < k; ++i) acc = add(acc, p);
        return acc;
    }
    static bool on_curve(const Point& p)
    {
        return mod(p.x * p.x + p.y * p.y - 1 - static_cast<long>(kD) * p.x * p.x % kP * p.y % kP * p.y) == 0;
    }
    static std::vector<Point> all_points()
    {
        std::vector<Point> out;
        for (int x = 0; x < kP; ++x)
            for (int y = 0; y < kP; ++y)
                if (on_curve({x, y})) out.push_back({x, y});
        return out;
    }
    static bool in_subgroup(const Point& p) { return mul(p, kQ) == Point{}; }
    static bool scalar_in_range(int s) { return s >= 0 && s < kQ; }
    static const Point& generator()
    {
        static const Point g = [] {
            for (const auto& p : all_points())
                if (!(p == Point{}) && in_subgroup(p)) return p;
            return Point{};
        }();
        return g;
    }
};

}  // namespace

TEST(Signature, ExhaustiveToyGroupAcceptsExactlyHonestPairs)
{
    const auto points = Toy::all_points();
    ASSERT_EQ(points.size(), 104u);
    std::vector<Toy::Point> subgroup;
    for (const auto& p : points)
        if (Toy::in_subgroup(p)) subgroup.push_back(p);
    ASSERT_EQ(subgroup.size(), 13u);

    const int message = 5;
    auto challenge = [&](const Toy::Point& R) { return (R.x * 7 + R.y * 3 + message) % Toy::kQ; };
    for (int sk = 1; sk < Toy::kQ; ++sk) {
        const Toy::Point pk = Toy::mul(Toy::generator(), sk);
        // every signature an honest signer could output, over all nonces
        std::set<std::pair<Toy::Point, int>> honest;
        for (int k = 0; k < Toy::kQ; ++k) {
            const Toy::Point R = Toy::mul(Toy::generator(), k);
            honest.insert({R, (k + challenge(R) * sk) % Toy::kQ});
        }
        std::set<std::pair<Toy::Point, int>> accepted;
        for (const auto& R : points) {
            for (int S = 0; S < Toy::kQ + 3; ++S) {
                if (schnorr_verify<Toy>(pk, R, S, challenge)) accepted.insert({R, S});
            }
        }
        EXPECT_EQ(accepted, honest) << "sk=" << sk;
    }
}

// ---- FFT and MSM ----

#include "expresso/zk/fft.hpp"
#include "expresso/zk/msm.hpp"

namespace {

Fr eval_poly(const std::vector<Fr>& coeffs, const Fr& x)
{
    Fr acc = Fr::zero();
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
    return acc;
}

}  // namespace

TEST(Fft, RootOfUnityHasExactOrder)
{
    const EvaluationDomain d(1000);
    ASSERT_EQ(d.size(), 1024u);
    EXPECT_TRUE(d.omega().pow(1024).is_one());
    EXPECT_FALSE(d.omega().pow(512).is_one());
}

TEST(Fft, MatchesNaiveEvaluationAndInverts)
{
    Rng rng("fft");
    const EvaluationDomain d(64);
    std::vector<Fr> coeffs(64);
    for (auto& c : coeffs) c = random_element<Fr>(rng);
    auto evals = coeffs;
    d.fft(evals);
    Fr w = Fr::one();
    for (std::size_t i = 0; i < 64; ++i) {
        EXPECT_EQ(evals[i], eval_poly(coeffs, w));
        w *= d.omega();
    }
    d.ifft(evals);
    EXPECT_EQ(evals, coeffs);
    auto coset = coeffs;
    d.coset_fft(coset);
    EXPECT_EQ(coset[3], eval_poly(coeffs, EvaluationDomain::coset_shift() * d.omega().pow(3)));
    d.coset_ifft(coset);
    EXPECT_EQ(coset, coeffs);
}

TEST(Fft, LagrangeBasisInterpolates)
{
    Rng rng("lagrange");
    const EvaluationDomain d(16);
    const Fr x = random_element<Fr>(rng);
    const auto l = d.lagrange_at(x);
    std::vector<Fr> evals(16);
    for (auto& e : evals) e = random_element<Fr>(rng);
    auto coeffs = evals;
    d.ifft(coeffs);
    Fr via_basis = Fr::zero();
    for (std::size_t i = 0; i < 16; ++i) via_basis += l[i] * evals[i];
    EXPECT_EQ(via_basis, eval_poly(coeffs, x));
}

TEST(Msm, MatchesNaiveSum)
{
    Rng rng("msm");
    for (std::size_t n : {1u, 5u, 33u, 200u}) {
        std::vector<G1> pts;
        std::vector<Fr> scalars;
        G1 expected;
        for (std::size_t i = 0; i < n; ++i) {
            pts.push_back(G1::generator() * random_element<Fr>(rng));
            scalars.push_back(i % 9 == 4 ? Fr::zero() : random_element<Fr>(rng));
            expected += pts.back() * scalars.back();
        }
        const auto aff = G1::batch_to_affine(pts);
        EXPECT_EQ((msm<G1, Fr>(aff, scalars)), expected) << n;
    }
    std::vector<G2> q2;
    std::vector<Fr> s2;
    G2 expected2;
    for (int i = 0; i < 10; ++i) {
        q2.push_back(G2::generator() * random_element<Fr>(rng));
        s2.push_back(random_element<Fr>(rng));
        expected2 += q2.back() * s2.back();
    }
    EXPECT_EQ((msm<G2, Fr>(G2::batch_to_affine(q2), s2)), expected2);
}

TEST(Msm, FixedBaseTableMatchesVariableBase)
{
    Rng rng("fixed-base");
    const FixedBaseTable<G1> t1(G1::generator());
    const FixedBaseTable<G2> t2(G2::generator());
    for (int i = 0; i < 20; ++i) {
        const Fr k = random_element<Fr>(rng);
        EXPECT_EQ(t1 * k, G1::generator() * k);
        EXPECT_EQ(t2 * k, G2::generator() * k);
    }
    EXPECT_TRUE((t1 * Fr::zero()).is_identity());
}
