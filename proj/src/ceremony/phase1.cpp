#include "expresso/ceremony/phase1.hpp"

#include "internal.hpp"

#include "expresso/util/crypto.hpp"
#include "expresso/zk/encoding.hpp"
#include "expresso/zk/fft.hpp"
#include "expresso/zk/hash_to_curve.hpp"
#include "expresso/zk/msm.hpp"
#include "expresso/zk/pairing.hpp"
#include "expresso/zk/random.hpp"

namespace expresso::ceremony {

using zk::EvaluationDomain;
using zk::FixedBaseTable;
using zk::G1;
using zk::G2;

namespace {

constexpr std::uint32_t kMagic = 0x31485058;  // "XPH1"

bool is_power_of_two(std::uint32_t v) { return v != 0 && (v & (v - 1)) == 0; }

}  // namespace

Phase1SecretValues derive_phase1_secrets(std::uint32_t degree, ByteView seed)
{
    Rng rng(seed);
    Phase1SecretValues v{zk::random_nonzero<Fr>(rng), zk::random_nonzero<Fr>(rng), zk::random_nonzero<Fr>(rng)};
    // tau^degree = 1 would put tau inside every subdomain and break the Lagrange forms
    while (v.tau.pow(degree).is_one()) v.tau += Fr::one();
    return v;
}

Phase1Parameters phase1_generate(std::uint32_t degree, ByteView rng_seed)
{
    if (degree < 2) throw Error(Errc::DegreeTooSmall, "phase-1 degree must be at least 2");
    if (!is_power_of_two(degree)) throw Error(Errc::InvalidArgument, "phase-1 degree must be a power of two");
    const EvaluationDomain domain(degree);
    if (domain.size() != degree) throw Error(Errc::InvalidArgument, "unsupported phase-1 degree");

    Phase1SecretValues secret = derive_phase1_secrets(degree, rng_seed);
    struct Wipe {
        Phase1SecretValues& v;
        ~Wipe()
        {
            // best effort; copies may survive in registers or spilled temporaries
            volatile std::uint8_t* p = reinterpret_cast<volatile std::uint8_t*>(&v);
            for (std::size_t i = 0; i < sizeof(v); ++i) p[i] = 0;
        }
    } wipe{secret};

    const FixedBaseTable<G1> g1(G1::generator());
    const FixedBaseTable<G2> g2(G2::generator());

    std::vector<Fr> powers(2 * degree - 1);
    powers[0] = Fr::one();
    for (std::size_t i = 1; i < powers.size(); ++i) powers[i] = powers[i - 1] * secret.tau;
    const std::span<const Fr> low(powers.data(), degree);

    Phase1Parameters p;
    p.degree = degree;
    p.tau_powers_g1 = g1.mul_all<Fr>(powers);
    p.tau_powers_g2 = g2.mul_all<Fr>(low);
    std::vector<Fr> scaled(degree);
    for (std::size_t i = 0; i < degree; ++i) scaled[i] = powers[i] * secret.alpha;
    p.alpha_tau_g1 = g1.mul_all<Fr>(scaled);
    for (std::size_t i = 0; i < degree; ++i) scaled[i] = powers[i] * secret.beta;
    p.beta_tau_g1 = g1.mul_all<Fr>(scaled);
    p.beta_g2 = (g2 * secret.beta).to_affine();

    std::vector<Fr> lag = domain.lagrange_at(secret.tau);
    p.lagrange_g1 = g1.mul_all<Fr>(lag);
    p.lagrange_g2 = g2.mul_all<Fr>(lag);
    for (std::size_t i = 0; i < degree; ++i) scaled[i] = lag[i] * secret.alpha;
    p.alpha_lagrange_g1 = g1.mul_all<Fr>(scaled);
    for (std::size_t i = 0; i < degree; ++i) scaled[i] = lag[i] * secret.beta;
    p.beta_lagrange_g1 = g1.mul_all<Fr>(scaled);

    std::fill(powers.begin(), powers.end(), Fr::zero());
    std::fill(scaled.begin(), scaled.end(), Fr::zero());
    std::fill(lag.begin(), lag.end(), Fr::zero());
    return p;
}

Bytes Phase1Parameters::serialize() const
{
    ByteWriter w;
    w.u32(kMagic);
    w.u32(degree);
    zk::write_g1_vector(w, std::span<const G1Affine>(tau_powers_g1));
    zk::write_g2_vector(w, std::span<const G2Affine>(tau_powers_g2));
    zk::write_g1_vector(w, std::span<const G1Affine>(alpha_tau_g1));
    zk::write_g1_vector(w, std::span<const G1Affine>(beta_tau_g1));
    zk::write_g2(w, beta_g2);
    zk::write_g1_vector(w, std::span<const G1Affine>(lagrange_g1));
    zk::write_g2_vector(w, std::span<const G2Affine>(lagrange_g2));
    zk::write_g1_vector(w, std::span<const G1Affine>(alpha_lagrange_g1));
    zk::write_g1_vector(w, std::span<const G1Affine>(beta_lagrange_g1));
    return std::move(w).take();
}

Phase1Parameters Phase1Parameters::deserialize(ByteView bytes)
{
    ByteReader r(bytes);
    if (r.u32() != kMagic) throw Error(Errc::MalformedEncoding, "not a phase-1 parameter file");
    Phase1Parameters p;
    p.degree = r.u32();
    p.tau_powers_g1 = zk::read_g1_vector(r);
    p.tau_powers_g2 = zk::read_g2_vector(r);
    p.alpha_tau_g1 = zk::read_g1_vector(r);
    p.beta_tau_g1 = zk::read_g1_vector(r);
    p.beta_g2 = zk::read_g2(r);
    p.lagrange_g1 = zk::read_g1_vector(r);
    p.lagrange_g2 = zk::read_g2_vector(r);
    p.alpha_lagrange_g1 = zk::read_g1_vector(r);
    p.beta_lagrange_g1 = zk::read_g1_vector(r);
    r.expect_done();
    return p;
}

Digest Phase1Parameters::digest() const { return sha256(serialize()); }

namespace {

template <class Point>
Point combine(std::span<const typename Point::Affine> points, std::span<const Fr> coeffs)
{
    return zk::msm<Point, Fr>(points, coeffs);
}

}  // namespace

bool phase1_verify(const Phase1Parameters& p, ByteView check_seed, std::string* diagnostic)
{
    auto fail = [&](const std::string& why) {
        if (diagnostic) *diagnostic = why;
        return false;
    };
    const std::size_t n = p.degree;
    if (n < 2 || (n & (n - 1)) != 0) return fail("degree is not a power of two");
    if (p.tau_powers_g1.size() != 2 * n - 1 || p.tau_powers_g2.size() != n || p.alpha_tau_g1.size() != n ||
        p.beta_tau_g1.size() != n || p.lagrange_g1.size() != n || p.lagrange_g2.size() != n ||
        p.alpha_lagrange_g1.size() != n || p.beta_lagrange_g1.size() != n) {
        return fail("list lengths do not match the degree");
    }
    if (!(G1(p.tau_powers_g1[0]) == G1::generator()) || !(G2(p.tau_powers_g2[0]) == G2::generator())) {
        return fail("zeroth powers are not the generators");
    }
    {
        std::vector<G2Affine> all(p.tau_powers_g2);
        all.insert(all.end(), p.lagrange_g2.begin(), p.lagrange_g2.end());
        all.push_back(p.beta_g2);
        if (!zk::all_in_prime_subgroup(all, check_seed)) return fail("G2 element outside the prime-order subgroup");
    }
    if (p.tau_powers_g1[1].infinity || p.alpha_tau_g1[0].infinity || p.beta_tau_g1[0].infinity) {
        return fail("degenerate trapdoor element");
    }

    Rng rng(check_seed);
    auto random_vec = [&](std::size_t len) {
        std::vector<Fr> v(len);
        for (auto& x : v) x = zk::random_element<Fr>(rng);
        return v;
    };
    const G1 g1 = G1::generator();
    const G2 g2 = G2::generator();
    const G2 tau_g2(p.tau_powers_g2[1]);
    const G1 tau_g1(p.tau_powers_g1[1]);
    const std::span<const G1Affine> t1(p.tau_powers_g1);
    const std::span<const G2Affine> t2(p.tau_powers_g2);

    // successive G1 powers share the ratio tau: e(sum r_i P_{i+1}, G2) = e(sum r_i P_i, tau G2)
    {
        const auto r = random_vec(2 * n - 2);
        if (!zk::same_ratio(combine<G1>(t1.subspan(1), r), g2, combine<G1>(t1.first(2 * n - 2), r), tau_g2)) {
            return fail("G1 powers of tau are inconsistent");
        }
    }
    {
        const auto r = random_vec(n - 1);
        if (!zk::same_ratio(g1, combine<G2>(t2.subspan(1), r), tau_g1, combine<G2>(t2.first(n - 1), r))) {
            return fail("G2 powers of tau are inconsistent");
        }
    }
    for (const auto* list : {&p.alpha_tau_g1, &p.beta_tau_g1}) {
        const std::span<const G1Affine> l(*list);
        const auto r = random_vec(n - 1);
        if (!zk::same_ratio(combine<G1>(l.subspan(1), r), g2, combine<G1>(l.first(n - 1), r), tau_g2)) {
            return fail(list == &p.alpha_tau_g1 ? "alpha powers inconsistent" : "beta powers inconsistent");
        }
    }
    if (!zk::same_ratio(G1(p.beta_tau_g1[0]), g2, g1, G2(p.beta_g2))) return fail("beta in G1 and G2 differ");

    // Lagrange forms: tau^k = sum_i omega^{ik} L_i(tau), so with c = FFT(r),
    // sum_k r_k tau^k = sum_i c_i L_i(tau). Checked as plain group equalities.
    const EvaluationDomain domain(n);
    auto lagrange_matches = [&](std::span<const G1Affine> lag, std::span<const G1Affine> mono) {
        auto r = random_vec(n);
        auto c = r;
        domain.fft(c);
        return combine<G1>(lag, c) == combine<G1>(mono, r);
    };
    if (!lagrange_matches(p.lagrange_g1, t1.first(n))) return fail("G1 Lagrange basis inconsistent");
    if (!lagrange_matches(p.alpha_lagrange_g1, p.alpha_tau_g1)) return fail("alpha Lagrange basis inconsistent");
    if (!lagrange_matches(p.beta_lagrange_g1, p.beta_tau_g1)) return fail("beta Lagrange basis inconsistent");
    {
        auto r = random_vec(n);
        auto c = r;
        domain.fft(c);
        if (!(combine<G2>(p.lagrange_g2, c) == combine<G2>(t2, r))) return fail("G2 Lagrange basis inconsistent");
    }
    if (diagnostic) diagnostic->clear();
    return true;
}

bool phase1_spot_check(const Phase1Parameters& p, std::size_t count, ByteView check_seed)
{
    Rng rng(check_seed);
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t i = rng.uniform(p.tau_powers_g2.size());
        if (!zk::same_ratio(G1(p.tau_powers_g1[i]), G2::generator(), G1::generator(), G2(p.tau_powers_g2[i]))) {
            return false;
        }
    }
    return true;
}

}  // namespace expresso::ceremony
