#include "expresso/zk/groth16.hpp"

#include "expresso/zk/encoding.hpp"
#include "expresso/zk/fft.hpp"
#include "expresso/zk/msm.hpp"
#include "expresso/zk/pairing.hpp"
#include "expresso/zk/random.hpp"

namespace expresso::zk {
namespace {

constexpr std::uint32_t kPkMagic = 0x314b5058;  // "XPK1"
constexpr std::uint32_t kVkMagic = 0x314b5658;  // "XVK1"

/// Evaluations of <A_i, w>, <B_i, w>, <C_i, w> over the domain, including input-consistency rows.
void qap_evaluations(const circuit::ConstraintSystem& cs, std::span<const Fr> w, std::vector<Fr>& a,
                     std::vector<Fr>& b, std::vector<Fr>& c)
{
    const std::size_t m = cs.constraints.size();
    for (std::size_t i = 0; i < m; ++i) {
        a[i] = cs.constraints[i].a.evaluate(w);
        b[i] = cs.constraints[i].b.evaluate(w);
        c[i] = cs.constraints[i].c.evaluate(w);
    }
    for (std::size_t j = 0; j <= cs.num_public; ++j) a[m + j] = w[j];
}

}  // namespace

std::size_t qap_domain_size(const circuit::ConstraintSystem& cs)
{
    return EvaluationDomain(cs.constraints.size() + cs.num_public + 1).size();
}

// ---------------------------------------------------------------- serialization

Bytes Groth16Proof::serialize() const
{
    ByteWriter w;
    write_g1(w, a);
    write_g2(w, b);
    write_g1(w, c);
    return std::move(w).take();
}

Groth16Proof Groth16Proof::deserialize(ByteView bytes)
{
    ByteReader r(bytes);
    Groth16Proof p;
    p.a = read_g1(r);
    p.b = read_g2(r, SubgroupCheck::Enforce);
    p.c = read_g1(r);
    r.expect_done();
    return p;
}

Bytes VerificationKey::serialize() const
{
    ByteWriter w;
    w.u32(kVkMagic);
    write_g1(w, alpha_g1);
    write_g2(w, beta_g2);
    write_g2(w, gamma_g2);
    write_g2(w, delta_g2);
    write_g1_vector(w, std::span<const G1Affine>(ic));
    return std::move(w).take();
}

VerificationKey VerificationKey::deserialize(ByteView bytes)
{
    ByteReader r(bytes);
    if (r.u32() != kVkMagic) throw Error(Errc::MalformedEncoding, "not a verification key");
    VerificationKey vk;
    vk.alpha_g1 = read_g1(r);
    vk.beta_g2 = read_g2(r);
    vk.gamma_g2 = read_g2(r);
    vk.delta_g2 = read_g2(r);
    vk.ic = read_g1_vector(r);
    r.expect_done();
    if (vk.ic.empty()) throw Error(Errc::MalformedEncoding, "verification key without input commitments");
    return vk;
}

Bytes ProvingKey::serialize() const
{
    ByteWriter w;
    w.u32(kPkMagic);
    w.blob(cs->serialize());
    w.u32(domain_size);
    write_g1(w, alpha_g1);
    write_g1(w, beta_g1);
    write_g1(w, delta_g1);
    write_g2(w, beta_g2);
    write_g2(w, delta_g2);
    write_g1_vector(w, std::span<const G1Affine>(a_query));
    write_g1_vector(w, std::span<const G1Affine>(b_g1_query));
    write_g2_vector(w, std::span<const G2Affine>(b_g2_query));
    write_g1_vector(w, std::span<const G1Affine>(h_query));
    write_g1_vector(w, std::span<const G1Affine>(l_query));
    return std::move(w).take();
}

ProvingKey ProvingKey::deserialize(ByteView bytes)
{
    ByteReader r(bytes);
    if (r.u32() != kPkMagic) throw Error(Errc::MalformedEncoding, "not a proving key");
    ProvingKey pk;
    pk.cs = std::make_shared<const circuit::ConstraintSystem>(circuit::ConstraintSystem::deserialize(r.blob()));
    pk.domain_size = r.u32();
    pk.alpha_g1 = read_g1(r);
    pk.beta_g1 = read_g1(r);
    pk.delta_g1 = read_g1(r);
    pk.beta_g2 = read_g2(r);
    pk.delta_g2 = read_g2(r);
    pk.a_query = read_g1_vector(r);
    pk.b_g1_query = read_g1_vector(r);
    pk.b_g2_query = read_g2_vector(r);
    pk.h_query = read_g1_vector(r);
    pk.l_query = read_g1_vector(r);
    r.expect_done();
    const std::size_t nv = pk.cs->num_variables;
    if (pk.domain_size != qap_domain_size(*pk.cs) || pk.a_query.size() != nv || pk.b_g1_query.size() != nv ||
        pk.b_g2_query.size() != nv || pk.h_query.size() + 1 != pk.domain_size ||
        pk.l_query.size() != nv - pk.cs->num_public - 1) {
        throw Error(Errc::MalformedEncoding, "proving key vector lengths do not match its constraint system");
    }
    return pk;
}

bool ProvingKey::same_elements(const ProvingKey& o) const
{
    return domain_size == o.domain_size && alpha_g1 == o.alpha_g1 && beta_g1 == o.beta_g1 &&
           delta_g1 == o.delta_g1 && beta_g2 == o.beta_g2 && delta_g2 == o.delta_g2 && a_query == o.a_query &&
           b_g1_query == o.b_g1_query && b_g2_query == o.b_g2_query && h_query == o.h_query && l_query == o.l_query;
}

// ---------------------------------------------------------------- prover

Groth16Proof groth16_prove(const ProvingKey& pk, std::span<const Fr> w, Rng& rng)
{
    const auto& cs = *pk.cs;
    if (w.size() != cs.num_variables || pk.a_query.size() != w.size()) {
        throw Error(Errc::KeyMismatch, "witness has " + std::to_string(w.size()) + " entries, key expects " +
                                           std::to_string(pk.a_query.size()));
    }
    if (!w[0].is_one()) throw Error(Errc::UnsatisfiedConstraints, "witness slot 0 must hold the constant one");
    if (auto bad = circuit::first_unsatisfied(cs, w)) {
        throw Error(Errc::UnsatisfiedConstraints, "constraint " + std::to_string(*bad) + " is violated");
    }

    const EvaluationDomain domain(pk.domain_size);
    const std::size_t n = domain.size();
    std::vector<Fr> a(n), b(n), c(n);
    qap_evaluations(cs, w, a, b, c);
    domain.ifft(a);
    domain.ifft(b);
    domain.ifft(c);
    domain.coset_fft(a);
    domain.coset_fft(b);
    domain.coset_fft(c);
    const Fr z_inv = domain.vanishing_at(EvaluationDomain::coset_shift()).inverse();
    for (std::size_t i = 0; i < n; ++i) a[i] = (a[i] * b[i] - c[i]) * z_inv;
    domain.coset_ifft(a);
    // a now holds the coefficients of h(x), of degree at most n - 2
    const std::span<const Fr> h(a.data(), n - 1);

    const Fr r = random_element<Fr>(rng);
    const Fr s = random_element<Fr>(rng);
    const std::size_t first_private = cs.num_public + 1;

    const G1 a_acc = msm<G1, Fr>(pk.a_query, w);
    const G1 b1_acc = msm<G1, Fr>(pk.b_g1_query, w);
    const G2 b2_acc = msm<G2, Fr>(pk.b_g2_query, w);
    const G1 l_acc = msm<G1, Fr>(pk.l_query, w.subspan(first_private));
    const G1 h_acc = msm<G1, Fr>(pk.h_query, h);

    const G1 delta1(pk.delta_g1);
    const G1 proof_a = G1(pk.alpha_g1) + a_acc + delta1 * r;
    const G1 proof_b1 = G1(pk.beta_g1) + b1_acc + delta1 * s;
    const G2 proof_b2 = G2(pk.beta_g2) + b2_acc + G2(pk.delta_g2) * s;
    const G1 proof_c = l_acc + h_acc + proof_a * s + proof_b1 * r - delta1 * (r * s);
    return {proof_a.to_affine(), proof_b2.to_affine(), proof_c.to_affine()};
}

// ---------------------------------------------------------------- verifier

bool groth16_verify(const VerificationKey& vk, std::span<const Fr> public_inputs, const Groth16Proof& proof,
                    std::string* diagnostic)
{
    auto fail = [&](const char* why) {
        if (diagnostic) *diagnostic = why;
        return false;
    };
    if (public_inputs.size() != vk.num_public()) return fail("public input count does not match the verification key");
    if (!G1::is_on_curve(proof.a) || !G1::is_on_curve(proof.c) || !G2::is_on_curve(proof.b)) {
        return fail("malformed proof: point not on curve");
    }
    if (!in_prime_subgroup(G2(proof.b))) return fail("malformed proof: B outside the prime-order subgroup");

    G1 ic = G1(vk.ic[0]) + msm<G1, Fr>(std::span<const G1Affine>(vk.ic).subspan(1), public_inputs);
    const PairingInput pairs[4] = {
        {(-G1(proof.a)).to_affine(), proof.b},
        {vk.alpha_g1, vk.beta_g2},
        {ic.to_affine(), vk.gamma_g2},
        {proof.c, vk.delta_g2},
    };
    if (!final_exponentiation(miller_loop(pairs)).is_one()) return fail("pairing equation does not hold");
    if (diagnostic) diagnostic->clear();
    return true;
}

// ---------------------------------------------------------------- direct setup

std::pair<ProvingKey, VerificationKey> setup_with_trapdoor(const circuit::ConstraintSystem& cs, const Trapdoor& t)
{
    const EvaluationDomain domain(qap_domain_size(cs));
    const std::size_t n = domain.size();
    const std::size_t nv = cs.num_variables;
    const std::vector<Fr> lag = domain.lagrange_at(t.tau);

    std::vector<Fr> at(nv), bt(nv), ct(nv);
    for (std::size_t i = 0; i < cs.constraints.size(); ++i) {
        for (const auto& term : cs.constraints[i].a.terms()) at[term.index] += term.coeff * lag[i];
        for (const auto& term : cs.constraints[i].b.terms()) bt[term.index] += term.coeff * lag[i];
        for (const auto& term : cs.constraints[i].c.terms()) ct[term.index] += term.coeff * lag[i];
    }
    for (std::size_t j = 0; j <= cs.num_public; ++j) at[j] += lag[cs.constraints.size() + j];

    const FixedBaseTable<G1> g1(G1::generator());
    const FixedBaseTable<G2> g2(G2::generator());
    const Fr gamma_inv = t.gamma.inverse();
    const Fr delta_inv = t.delta.inverse();

    ProvingKey pk;
    pk.cs = std::make_shared<const circuit::ConstraintSystem>(cs);
    pk.domain_size = static_cast<std::uint32_t>(n);
    pk.alpha_g1 = (g1 * t.alpha).to_affine();
    pk.beta_g1 = (g1 * t.beta).to_affine();
    pk.delta_g1 = (g1 * t.delta).to_affine();
    pk.beta_g2 = (g2 * t.beta).to_affine();
    pk.delta_g2 = (g2 * t.delta).to_affine();
    pk.a_query = g1.mul_all<Fr>(at);
    pk.b_g1_query = g1.mul_all<Fr>(bt);
    pk.b_g2_query = g2.mul_all<Fr>(bt);

    std::vector<Fr> h(n - 1);
    const Fr zt_over_delta = domain.vanishing_at(t.tau) * delta_inv;
    Fr tau_i = Fr::one();
    for (auto& v : h) {
        v = tau_i * zt_over_delta;
        tau_i *= t.tau;
    }
    pk.h_query = g1.mul_all<Fr>(h);

    std::vector<Fr> ic, l;
    for (std::size_t j = 0; j < nv; ++j) {
        const Fr k = t.beta * at[j] + t.alpha * bt[j] + ct[j];
        if (j <= cs.num_public) {
            ic.push_back(k * gamma_inv);
        } else {
            l.push_back(k * delta_inv);
        }
    }
    pk.l_query = g1.mul_all<Fr>(l);

    VerificationKey vk;
    vk.alpha_g1 = pk.alpha_g1;
    vk.beta_g2 = pk.beta_g2;
    vk.gamma_g2 = (g2 * t.gamma).to_affine();
    vk.delta_g2 = pk.delta_g2;
    vk.ic = g1.mul_all<Fr>(ic);
    return {std::move(pk), std::move(vk)};
}

}  // namespace expresso::zk
