// Acceptance run: one deployment on loopback, criteria 1-12, one PASS/FAIL line each.
// Exit status is nonzero if any criterion fails. EXPRESSO_SEED fixes the randomized parts.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "expresso/ceremony/phase2.hpp"
#include "expresso/harness/attacks.hpp"
#include "expresso/harness/bench.hpp"
#include "expresso/zk/random.hpp"

using namespace expresso;
using namespace expresso::harness;
using Clock = std::chrono::steady_clock;
using zk::Fr;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double ms_since(Clock::time_point t0) { return std::chrono::duration<double, std::milli>(Clock::now() - t0).count(); }

std::string fixed(double v, int digits = 1)
{
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(digits);
    s << v;
    return s.str();
}

Fr flip_bit(const Fr& v, unsigned bit)
{
    auto limbs = v.to_canonical();
    limbs[bit / 64] ^= std::uint64_t{1} << (bit % 64);
    return Fr::from_limbs_reduced(limbs);
}

circuit::InputAssignment membership_inputs(const zk::EdwardsPoint& pk, const zk::Signature& sig, const Fr& m)
{
    return {{"pk", pk}, {"R", sig.R}, {"S", Fr::from_canonical(sig.S.to_canonical())}, {"M", m}};
}

// --- 1 -----------------------------------------------------------------------------------

Outcome completeness(Deployment& d, Rng& rng)
{
    const std::size_t cycles = 50, slots = 3;
    const auto& users = d.config().users;
    std::vector<std::optional<std::size_t>> slot(slots);
    std::size_t ok = 0, registrations = 0;
    std::vector<std::string> failures;
    const auto t0 = Clock::now();
    for (std::size_t c = 0; c < cycles; ++c) {
        const auto s = rng.uniform(slots);
        const auto& user = users[rng.uniform(users.size())].username;
        try {
            // an empty slot registers; an occupied one is re-registered as a new client now and then
            if (!slot[s] || rng.uniform(10) == 0) {
                slot[s] = d.add_rp("cycle-" + std::to_string(c) + "-slot-" + std::to_string(s));
                ++registrations;
            }
            const auto out = d.login(user, *slot[s], {"openid", "email"}, {"openid", "email"});
            if (out.subject.size() != 64 || !out.claims.contains("email")) throw Error(Errc::StepFailure, "bad claims");
            ++ok;
        } catch (const Error& e) {
            failures.push_back("cycle " + std::to_string(c) + ": " + e.what());
        }
    }
    std::string detail = std::to_string(ok) + "/" + std::to_string(cycles) + " cycles, " +
                         std::to_string(registrations) + " registrations, 3 RP slots, " + std::to_string(users.size()) +
                         " users, " + fixed(ms_since(t0) / 1000) + " s";
    if (!failures.empty()) detail += "; first failure: " + failures.front();
    return {ok == cycles, detail};
}

// --- 2 -----------------------------------------------------------------------------------

Outcome soundness(Deployment& d, Rng& rng)
{
    const auto artifacts = d.rp(0).artifacts();
    const auto& pk = artifacts->proving_key;
    const auto& vk = artifacts->verification_key;
    const auto& cs = d.registry().constraint_system();
    const auto& program = d.registry().get_boilerplate();
    const auto key = zk::generate_signing_keypair(rng.bytes(32));
    const Fr client = zk::random_element<Fr>(rng);
    const circuit::ClientCredential honest{client, zk::sign(key.sk, client), key.pk};
    const auto witness = circuit::build_witness(cs, key.pk, honest);
    const auto inputs = circuit::membership_public_inputs(key.pk);
    const auto first_private = 1 + cs.public_input_count();
    const auto proof = zk::groth16_prove(pk, witness, rng);
    if (!zk::groth16_verify(vk, inputs, proof)) return {false, "honest proof rejected"};

    std::size_t trials = 0, false_accepts = 0;
    std::map<std::string, std::size_t> refused;

    // witness bit flips
    for (int i = 0; i < 80; ++i, ++trials) {
        auto w = witness;
        const auto idx = first_private + rng.uniform(w.size() - first_private);
        w[idx] = flip_bit(w[idx], static_cast<unsigned>(rng.uniform(254)));
        try {
            if (zk::groth16_verify(vk, inputs, zk::groth16_prove(pk, w, rng))) ++false_accepts;
            else ++refused["verify"];
        } catch (const Error& e) {
            ++refused[std::string(errc_name(e.code()))];
        }
    }
    // mutated credentials, forced through witness synthesis past the native pre-check
    for (int i = 0; i < 60; ++i, ++trials) {
        auto cred = honest;
        switch (i % 4) {
        case 0: cred.signature.S = cred.signature.S + zk::JubScalar::from_u64(1 + rng.uniform(1000)); break;
        case 1: cred.client_id = flip_bit(cred.client_id, static_cast<unsigned>(rng.uniform(253))); break;
        case 2: cred.signature.R = cred.signature.R + zk::EdwardsPoint::generator(); break;
        case 3: cred.signature = zk::sign(zk::generate_signing_keypair(rng.bytes(32)).sk, cred.client_id); break;
        }
        bool native_refused = false;
        try {
            circuit::build_witness(cs, key.pk, cred);
        } catch (const Error& e) {
            native_refused = e.code() == Errc::InvalidCredential;
        }
        const auto w = circuit::synthesize_witness(program, cs, membership_inputs(key.pk, cred.signature, cred.client_id));
        try {
            if (zk::groth16_verify(vk, inputs, zk::groth16_prove(pk, w, rng))) ++false_accepts;
            else ++refused["verify"];
        } catch (const Error& e) {
            ++refused[std::string(errc_name(e.code()))];
        }
        if (!native_refused) ++false_accepts;
    }
    // mutated proofs and public inputs
    const auto g1 = zk::G1::generator();
    const auto g2 = zk::G2::generator();
    for (int i = 0; i < 60; ++i, ++trials) {
        auto p = proof;
        auto x = inputs;
        switch (i % 5) {
        case 0: p.a = (g1 * zk::random_nonzero<Fr>(rng)).to_affine(); break;
        case 1: p.b = (g2 * zk::random_nonzero<Fr>(rng)).to_affine(); break;
        case 2: p.c = (g1 * zk::random_nonzero<Fr>(rng)).to_affine(); break;
        case 3: x[rng.uniform(x.size())] += zk::random_nonzero<Fr>(rng); break;
        case 4: std::swap(p.a, p.c); break;
        }
        if (zk::groth16_verify(vk, x, p)) ++false_accepts;
        else ++refused["verify"];
    }
    std::string detail = std::to_string(trials) + " mutations, " + std::to_string(false_accepts) + " false accepts (";
    for (const auto& [k, v] : refused) detail += k + " " + std::to_string(v) + ", ";
    detail.resize(detail.size() - 2);
    return {trials == 200 && false_accepts == 0, detail + ")"};
}

// --- 3 -----------------------------------------------------------------------------------

Outcome identical_public_inputs(Deployment& d, const std::vector<std::size_t>& rps)
{
    std::set<Bytes> encodings;
    for (auto i : rps) {
        d.rp(i).refresh_artifacts();
        Bytes enc;
        for (const auto& x : d.rp(i).generate_proof().public_inputs) {
            const auto b = x.to_bytes();
            enc.insert(enc.end(), b.begin(), b.end());
        }
        encodings.insert(enc);
    }
    return {encodings.size() == 1, std::to_string(rps.size()) + " RPs, " + std::to_string(encodings.size()) +
                                       " distinct public-input encoding(s)"};
}

Outcome from_trials(const TrialReport& r)
{
    std::string detail = r.summary();
    if (!r.failures.empty()) detail += "; first failure: " + r.failures.front();
    return {r.ok(), detail};
}

Outcome no_rp_addresses(Deployment& d)
{
    const auto log = d.idp_server().request_log();
    std::set<std::string> sources;
    for (const auto& e : log) sources.insert(e.remote_addr);
    std::string seen;
    for (const auto& s : sources) seen += (seen.empty() ? "" : ",") + s;
    const auto leaks = d.rp_address_leaks();
    std::string detail = std::to_string(log.size()) + " IdP requests from {" + seen + "}, " +
                         std::to_string(d.rp_count()) + " RP endpoints, " + std::to_string(leaks.size()) + " leaks";
    if (!leaks.empty()) detail += "; first: " + leaks.front();
    return {leaks.empty() && !log.empty(), detail};
}

// --- 6 -----------------------------------------------------------------------------------

Outcome ceremony_verifiability(Deployment& d, Rng& rng)
{
    using namespace ceremony;
    const auto& reg = d.registry();
    const auto p1 = std::shared_ptr<const Phase1Parameters>(&reg.phase1(), [](const Phase1Parameters*) {});
    auto run = [&](const std::string& tag) {
        auto st = CeremonyState::begin(p1, reg.constraint_system());
        for (int i = 1; i <= 3; ++i) st = contribute(st, tag + "-contributor-" + std::to_string(i), rng.bytes(32)).first;
        return finalize(st, rng.bytes(32), "acceptance beacon", reg.constraint_system(), 1).transcript;
    };
    const auto t0 = Clock::now();
    const auto honest = run("a");
    const auto other = run("b");
    std::vector<std::string> notes;
    bool pass = true;
    auto expect = [&](const std::string& name, const CeremonyTranscript& t, const Phase1Parameters& params,
                      TranscriptCheck::Where where, std::uint32_t record) {
        const auto check = verify_transcript(t, params);
        const bool ok = !check && check.where == where && (where != TranscriptCheck::Where::Record || check.record == record);
        pass = pass && ok;
        notes.push_back(name + (ok ? " rejected" : " NOT rejected as expected") +
                        (where == TranscriptCheck::Where::Record ? " at record " + std::to_string(check.record) : ""));
    };

    const auto good = verify_transcript(honest, reg.phase1());
    pass = pass && static_cast<bool>(good);
    notes.push_back(std::string("honest 3-contributor transcript ") + (good ? "verifies" : "FAILS"));

    auto spliced = honest;
    spliced.records[1] = other.records[1];
    expect("spliced record 2", spliced, reg.phase1(), TranscriptCheck::Where::Record, 2);

    auto reordered = honest;
    std::swap(reordered.records[1], reordered.records[2]);
    expect("reordered records 2/3", reordered, reg.phase1(), TranscriptCheck::Where::Record, 2);

    auto no_beacon = honest;
    no_beacon.beacon.reset();
    expect("missing beacon", no_beacon, reg.phase1(), TranscriptCheck::Where::Beacon, 0);

    auto tampered = reg.phase1();
    tampered.tau_powers_g1[5] = zk::G1::generator().to_affine();
    expect("tampered phase-1", honest, tampered, TranscriptCheck::Where::Header, 0);

    std::string detail;
    for (const auto& n : notes) detail += (detail.empty() ? "" : "; ") + n;
    return {pass, detail + " (" + fixed(ms_since(t0) / 1000) + " s)"};
}

// --- 7 -----------------------------------------------------------------------------------

Outcome oracle_equivalence(Deployment& d, Rng& rng)
{
    const auto artifacts = d.rp(0).artifacts();
    const auto& cs = d.registry().constraint_system();
    const auto& program = d.registry().get_boilerplate();
    std::size_t agree = 0, valid = 0;
    const std::size_t n = 100;
    for (std::size_t i = 0; i < n; ++i) {
        const auto key = zk::generate_signing_keypair(rng.bytes(32));
        const Fr m = zk::random_element<Fr>(rng);
        auto sig = zk::sign(key.sk, m);
        auto pk = key.pk;
        Fr msg = m;
        if (rng.uniform(2) == 1) {
            switch (rng.uniform(4)) {
            case 0: sig.S = sig.S + zk::JubScalar::one(); break;
            case 1: msg += Fr::one(); break;
            case 2: pk = zk::generate_signing_keypair(rng.bytes(32)).pk; break;
            case 3: sig.R = sig.R + zk::EdwardsPoint::generator(); break;
            }
        }
        const auto w = circuit::synthesize_witness(program, cs, membership_inputs(pk, sig, msg));
        const bool eval = circuit::evaluate(cs, w);
        bool proved = false;
        try {
            proved = zk::groth16_verify(artifacts->verification_key, circuit::membership_public_inputs(pk),
                                        zk::groth16_prove(artifacts->proving_key, w, rng));
        } catch (const Error& e) {
            if (e.code() != Errc::UnsatisfiedConstraints) throw;
        }
        valid += eval;
        agree += eval == proved && eval == zk::verify_native(pk, msg, sig);
    }
    return {agree == n, std::to_string(agree) + "/" + std::to_string(n) + " agree (" + std::to_string(valid) +
                            " valid, " + std::to_string(n - valid) + " invalid)"};
}

// --- 12 ----------------------------------------------------------------------------------

Outcome verification_scaling(Deployment& d, Rng& rng)
{
    // A second variant of the statement with the same public interface and far fewer constraints.
    const circuit::BoilerplateProgram tiny{"program tiny v1\n"
                                           "public x: field\n"
                                           "public y: field\n"
                                           "private a: field\n"
                                           "assert a * a == x\n"
                                           "assert a * x == y\n",
                                           {{"x", circuit::Visibility::Public, circuit::ValueType::Field},
                                            {"y", circuit::Visibility::Public, circuit::ValueType::Field},
                                            {"a", circuit::Visibility::Private, circuit::ValueType::Field}}};
    const auto tiny_cs = circuit::compile(tiny);
    const zk::Trapdoor t{zk::random_nonzero<Fr>(rng), zk::random_nonzero<Fr>(rng), zk::random_nonzero<Fr>(rng),
                         zk::random_nonzero<Fr>(rng), zk::random_nonzero<Fr>(rng)};
    const auto [tiny_pk, tiny_vk] = zk::setup_with_trapdoor(tiny_cs, t);
    const Fr a = Fr::from_u64(7);
    const auto tiny_w = circuit::synthesize_witness(tiny, tiny_cs, {{"a", a}, {"x", a * a}, {"y", a * a * a}});
    const auto tiny_proof = zk::groth16_prove(tiny_pk, tiny_w, rng);
    const std::vector<Fr> tiny_x{a * a, a * a * a};

    auto& rp = d.rp(0);
    rp.refresh_artifacts();
    const auto big = rp.generate_proof();
    const auto big_vk = rp.artifacts()->verification_key;
    const auto big_n = rp.artifacts()->proving_key.cs->constraint_count();

    double big_ms = 0, tiny_ms = 0;
    const int rounds = 50;
    bool all_ok = true;
    for (int i = 0; i < rounds; ++i) {
        auto t0 = Clock::now();
        all_ok &= zk::groth16_verify(big_vk, big.public_inputs, big.proof);
        big_ms += ms_since(t0);
        t0 = Clock::now();
        all_ok &= zk::groth16_verify(tiny_vk, tiny_x, tiny_proof);
        tiny_ms += ms_since(t0);
    }
    big_ms /= rounds;
    tiny_ms /= rounds;
    const double ratio = static_cast<double>(big_n) / static_cast<double>(tiny_cs.constraint_count());
    const double diff = std::abs(big_ms - tiny_ms) / std::max(big_ms, tiny_ms);
    return {all_ok && ratio >= 4 && diff < 0.25,
            std::to_string(big_n) + " vs " + std::to_string(tiny_cs.constraint_count()) + " constraints (" +
                fixed(ratio, 0) + "x): verify " + fixed(big_ms, 2) + " ms vs " + fixed(tiny_ms, 2) + " ms, " +
                fixed(diff * 100) + "% apart over " + std::to_string(rounds) + " interleaved runs"};
}

}  // namespace

int main()
{
    std::string seed_hex;
    if (const char* s = std::getenv("EXPRESSO_SEED")) seed_hex = s;
    if (seed_hex.empty()) seed_hex = to_hex(random_bytes(8));
    Rng rng("acceptance/" + seed_hex);
    std::cout << "acceptance run, seed " << seed_hex << std::endl;

    std::vector<std::pair<std::string, Outcome>> results;
    auto report = [&](const std::string& id, const std::string& name, const std::function<Outcome()>& f) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o = {false, std::string("aborted: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS " : "FAIL ") << id << " " << name << ": " << o.detail << "  ["
                  << fixed(ms_since(t0) / 1000) << " s]" << std::endl;
        results.emplace_back(id, o);
    };

    const auto setup0 = Clock::now();
    DeploymentConfig cfg;
    cfg.users = sample_users(5);
    Deployment d(cfg);
    const auto shop = d.add_rp("shop");
    const auto news = d.add_rp("news");
    const auto mail = d.add_rp("mail");
    std::cout << "deployment up in " << fixed(ms_since(setup0) / 1000) << " s (" << cfg.contributors.size()
              << " ceremony contributors per allocation)" << std::endl;

    report("1", "completeness", [&] { return completeness(d, rng); });
    report("2", "soundness", [&] { return soundness(d, rng); });
    report("3a", "identical public inputs", [&] { return identical_public_inputs(d, {shop, news, mail}); });
    report("3b", "artifact substitution detected", [&] { return from_trials(integrity_attack(d, 20)); });
    report("4", "user unlinkability", [&] { return from_trials(collusion_check(d, 100, 3)); });
    report("5", "revocation", [&] { return from_trials(revocation_attack(d, 20)); });
    // after every scenario above has gone through the IdP
    report("3c", "IdP log free of RP addresses", [&] { return no_rp_addresses(d); });
    report("6", "ceremony verifiability", [&] { return ceremony_verifiability(d, rng); });
    for (auto i : {shop, news, mail}) d.rp(i).refresh_artifacts();
    report("7", "oracle equivalence", [&] { return oracle_equivalence(d, rng); });

    std::optional<BenchReport> bench;
    auto measured = [&]() -> const BenchReport& {
        if (!bench) bench = run_bench(d, 50);
        return *bench;
    };
    report("8", "proof payload size", [&] {
        const auto bytes = measured().proof_bytes;
        const auto groth = d.rp(shop).generate_proof().proof.serialize().size();
        return Outcome{bytes <= 4096, std::to_string(bytes) + " B membership proof payload (" + std::to_string(groth) +
                                          " B Groth16 proof), limit 4096 B"};
    });
    report("9", "verification latency", [&] {
        const auto& b = measured();
        return Outcome{b.verification_ms <= 500, "mean " + fixed(b.verification_ms, 2) + " ms over " +
                                                     std::to_string(b.reps) + " runs, limit 500 ms (reference 237.30)"};
    });
    report("10", "cached-proof user authentication", [&] {
        const auto& b = measured();
        return Outcome{b.user_auth_ms <= 1000, "mean " + fixed(b.user_auth_ms) + " ms, max " +
                                                   fixed(b.user_auth_max_ms) + " ms over " + std::to_string(b.reps) +
                                                   " runs, limit 1000 ms (reference 239.2)"};
    });
    report("11", "one-time proving latency", [&] {
        const auto& b = measured();
        return Outcome{b.proving_ms <= 43380, fixed(b.proving_ms) + " ms at " + std::to_string(b.constraints) +
                                                  " constraints, limit 43380 ms (reference 4338 ms at 94180)"};
    });
    report("12", "verification independent of circuit size", [&] { return verification_scaling(d, rng); });

    std::size_t failed = 0;
    for (const auto& [id, o] : results) failed += !o.pass;
    std::cout << (failed == 0 ? "all " + std::to_string(results.size()) + " criteria passed"
                              : std::to_string(failed) + " of " + std::to_string(results.size()) + " criteria failed")
              << std::endl;
    return failed == 0 ? 0 : 1;
}
