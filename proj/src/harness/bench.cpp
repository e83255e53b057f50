#include "expresso/harness/bench.hpp"

#include <chrono>
#include <cstdio>

namespace expresso::harness {

namespace {

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

}  // namespace

Json BenchReport::to_json() const
{
    return Json{{"reps", reps},
                {"proving_ms", proving_ms},
                {"verification_ms", verification_ms},
                {"oidc_ops_ms", oidc_ops_ms},
                {"user_auth_ms", user_auth_ms},
                {"user_auth_max_ms", user_auth_max_ms},
                {"proof_bytes", proof_bytes},
                {"pk_bytes", pk_bytes},
                {"vk_bytes", vk_bytes},
                {"constraints", constraints}};
}

BenchReport BenchReport::from_json(const Json& j)
{
    BenchReport r;
    r.reps = j.at("reps");
    r.proving_ms = j.at("proving_ms");
    r.verification_ms = j.at("verification_ms");
    r.oidc_ops_ms = j.at("oidc_ops_ms");
    r.user_auth_ms = j.at("user_auth_ms");
    r.user_auth_max_ms = j.at("user_auth_max_ms");
    r.proof_bytes = j.at("proof_bytes");
    r.pk_bytes = j.at("pk_bytes");
    r.vk_bytes = j.at("vk_bytes");
    r.constraints = j.at("constraints");
    return r;
}

std::string emit_report(const BenchReport& r, ReportFormat format)
{
    if (r.reps == 0) throw Error(Errc::InvalidArgument, "no measured runs to report");
    using R = ReferenceRow;
    if (format == ReportFormat::Json) {
        Json out = r.to_json();
        out["reference"] = Json{{"label", "published prototype figures, for comparison only"},
                                {"proving_ms", R::proving_ms},
                                {"verification_ms", R::verification_ms},
                                {"oidc_ops_ms", R::oidc_ops_ms},
                                {"user_auth_ms", R::user_auth_ms},
                                {"constraints", R::constraints},
                                {"pk_mb", R::pk_mb},
                                {"vk_kb", R::vk_kb},
                                {"proof_kb", R::proof_kb}};
        out["oidc_ops_definition"] = "PPID derivation + token construction + signing";
        return out.dump(2) + "\n";
    }
    std::string s;
    s += "                 proving(ms)  verify(ms)  oidc-ops(ms)  user-auth(ms)  constraints\n";
    s += "measured         " + fmt("%11.1f", r.proving_ms) + fmt("%12.2f", r.verification_ms) +
         fmt("%14.2f", r.oidc_ops_ms) + fmt("%15.1f", r.user_auth_ms) + fmt("%13.0f", double(r.constraints)) + "\n";
    s += "reference (*)    " + fmt("%11.1f", R::proving_ms) + fmt("%12.2f", R::verification_ms) +
         fmt("%14.2f", R::oidc_ops_ms) + fmt("%15.1f", R::user_auth_ms) + fmt("%13.0f", double(R::constraints)) + "\n";
    s += "\nrepetitions: " + std::to_string(r.reps) + ", user-auth max " + fmt("%.1f", r.user_auth_max_ms) + " ms\n";
    s += "sizes: proof " + std::to_string(r.proof_bytes) + " B, proving key " + fmt("%.2f", r.pk_bytes / 1e6) +
         " MB, verification key " + std::to_string(r.vk_bytes) + " B (reference: ~4 KB, 38.4 MB, 4 KB)\n";
    s += "oidc-ops = PPID derivation + token construction + signing; user-auth is measured at the\n"
         "user agent from the authorize request to the RP callback, proof already cached.\n";
    s += "(*) published prototype figures on different hardware; shown for comparison, not asserted.\n";
    return s;
}

BenchReport run_bench(Deployment& d, std::size_t reps, const std::string& username)
{
    if (reps == 0) throw Error(Errc::InvalidArgument, "--reps must be at least 1");
    BenchReport r;
    const std::size_t i = d.add_rp("bench-" + to_hex(random_bytes(3)));
    auto& rp = d.rp(i);
    const auto t0 = std::chrono::steady_clock::now();
    const auto proof = rp.generate_proof();
    r.proving_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    const auto artifacts = rp.artifacts();
    r.proof_bytes = proof.serialize().size();
    r.pk_bytes = artifacts->proving_key.serialize().size();
    r.vk_bytes = artifacts->verification_key.serialize().size();
    r.constraints = artifacts->proving_key.cs->constraint_count();

    d.login(username, i);  // warm-up
    d.idp_server().reset_timings();
    double total = 0;
    for (std::size_t k = 0; k < reps; ++k) {
        const auto out = d.login(username, i);
        total += out.user_auth_ms;
        r.user_auth_max_ms = std::max(r.user_auth_max_ms, out.user_auth_ms);
    }
    const auto t = d.idp_server().timings();
    r.reps = reps;
    r.user_auth_ms = total / reps;
    r.verification_ms = t.count ? t.verify_ms / t.count : 0;
    r.oidc_ops_ms = t.count ? t.oidc_ops_ms / t.count : 0;
    return r;
}

}  // namespace expresso::harness
