#include "expresso/harness/attacks.hpp"

#include "expresso/circuit/program.hpp"
#include "expresso/zk/random.hpp"

namespace expresso::harness {

namespace {

constexpr const char* kShadowIdp = "idp-shadow";

std::string code_name(const Error& e) { return std::string(errc_name(e.code())); }

/// Forwards a request verbatim to the upstream IdP.
void relay(const std::string& upstream, const httplib::Request& req, httplib::Response& res)
{
    auto cli = net::make_client(upstream);
    httplib::Headers h;
    for (const auto& [k, v] : req.headers) {
        if (k == "Authorization" || k == "Content-Type") h.emplace(k, v);
    }
    httplib::Result r = req.method == "POST"     ? cli->Post(req.target, h, req.body, req.get_header_value("Content-Type"))
                         : req.method == "DELETE" ? cli->Delete(req.target, h)
                                                  : cli->Get(req.target, h);
    if (!r) {
        net::send_error(res, Error(Errc::IdPUnavailable, "upstream unreachable"));
        return;
    }
    res.status = r->status;
    res.set_content(r->body, r->get_header_value("Content-Type"));
}

}  // namespace

std::string TrialReport::summary() const
{
    std::string s = name + ": " + std::to_string(passed) + "/" + std::to_string(trials);
    if (!failures.empty()) s += " (first failure: " + failures.front() + ")";
    return s;
}

ArtifactSwapProxy::ArtifactSwapProxy(std::string upstream_url) : upstream_(std::move(upstream_url))
{
    auto& r = http_.routes();
    r.Post("/register", [this](const httplib::Request& req, httplib::Response& res) {
        relay(upstream_, req, res);
        std::lock_guard lock(mu_);
        if (res.status != 201 || !substitute_) return;
        auto j = net::Json::parse(res.body);
        j["artifacts"] = base64url_encode(*substitute_);
        j["artifact_digest"] = *substitute_digest_;
        res.set_content(j.dump(), "application/json");
    });
    r.Get("/artifacts/current", [this](const httplib::Request& req, httplib::Response& res) {
        relay(upstream_, req, res);
        std::lock_guard lock(mu_);
        if (res.status == 200 && substitute_) net::send_bytes(res, *substitute_);
    });
    r.Get(".*", [this](const httplib::Request& req, httplib::Response& res) { relay(upstream_, req, res); });
    r.Post(".*", [this](const httplib::Request& req, httplib::Response& res) { relay(upstream_, req, res); });
    r.Delete(".*", [this](const httplib::Request& req, httplib::Response& res) { relay(upstream_, req, res); });
}

void ArtifactSwapProxy::set_substitute(std::optional<ceremony::ZkArtifacts> artifacts)
{
    std::lock_guard lock(mu_);
    if (artifacts) {
        substitute_ = artifacts->serialize();
        substitute_digest_ = to_hex(artifacts->artifact_digest);
    } else {
        substitute_.reset();
        substitute_digest_.reset();
    }
}

TrialReport integrity_attack(Deployment& d, std::size_t trials)
{
    TrialReport report{"integrity attack", trials, 0, {}};
    ArtifactSwapProxy proxy(d.idp_url());
    proxy.start(d.config().service_host);

    auto register_via_proxy = [&](const std::string& name) -> std::optional<Errc> {
        auto cfg = d.rp_config(name);
        cfg.idp_url = proxy.base_url();
        rp::RelyingParty victim(cfg);
        try {
            victim.register_with_idp();
            return std::nullopt;
        } catch (const Error& e) {
            return e.code();
        }
    };
    auto honest_artifacts = [&] {
        rp::RelyingParty ref(d.rp_config("reference"));
        ref.register_with_idp();
        return *ref.artifacts();
    };

    // control: an unmodified relay must register fine, so the detections below are not vacuous
    if (auto code = register_via_proxy("control")) {
        report.failures.push_back("honest relay was rejected: " + std::string(errc_name(*code)));
        return report;
    }
    // a superseded version, by forcing one rotation
    const auto superseded = honest_artifacts();
    d.rotate_idp();
    for (std::size_t i = 0; i < d.rp_count(); ++i) {
        try {
            d.rp(i).refresh_artifacts();
        } catch (const Error&) {
            // de-registered RPs stay stale
        }
    }
    const auto honest = honest_artifacts();
    d.registry().enroll(kShadowIdp);
    std::optional<ceremony::ZkArtifacts> shadow;

    Rng rng = Rng::from_entropy();
    for (std::size_t t = 0; t < trials; ++t) {
        ceremony::ZkArtifacts sub;
        std::string kind;
        switch (t % 5) {
        case 0: {
            kind = "trapdoor-known keys";
            zk::Trapdoor td{zk::random_nonzero<zk::Fr>(rng), zk::random_nonzero<zk::Fr>(rng), zk::random_nonzero<zk::Fr>(rng),
                            zk::random_nonzero<zk::Fr>(rng), zk::random_nonzero<zk::Fr>(rng)};
            auto [pk, vk] = zk::setup_with_trapdoor(*honest.proving_key.cs, td);
            sub = honest;
            sub.proving_key = std::move(pk);
            sub.verification_key = std::move(vk);
            sub.artifact_digest = sub.compute_digest();
            break;
        }
        case 1: {
            kind = "modified proving key";
            sub = honest;
            auto& h = sub.proving_key.h_query;
            const auto k = rng.uniform(h.size());
            h[k] = (zk::G1(h[k]).dbl()).to_affine();
            sub.artifact_digest = sub.compute_digest();
            break;
        }
        case 2:
            kind = "another IdP's allocation";
            if (!shadow) shadow = d.allocate(kShadowIdp);
            sub = *shadow;
            break;
        case 3:
            kind = "relabelled version";
            sub = honest.with_version(honest.version + 1 + t);
            break;
        default:
            kind = "superseded version";
            sub = superseded;
            break;
        }
        proxy.set_substitute(sub);
        const auto code = register_via_proxy("victim-" + std::to_string(t));
        if (code == Errc::IntegrityMismatch) {
            ++report.passed;
        } else {
            report.failures.push_back("trial " + std::to_string(t + 1) + " (" + kind + "): " +
                                      (code ? std::string(errc_name(*code)) : std::string("accepted")));
        }
    }
    proxy.stop();
    return report;
}

TrialReport collusion_check(Deployment& d, std::size_t users, std::size_t repeats)
{
    TrialReport report{"collusion", users, 0, {}};
    const std::size_t a = d.add_rp("colluder-a");
    const std::size_t b = d.add_rp("colluder-b");
    std::set<std::string> all_subjects;
    for (std::size_t u = 0; u < users; ++u) {
        const std::string name = "collusion-user-" + std::to_string(u);
        try {
            d.add_user({name, "pw-" + name, {{"name", name}}});
        } catch (const Error& e) {
            if (e.code() != Errc::InvalidArgument) throw;  // already present
        }
        std::string subject[2];
        bool ok = true;
        for (int side = 0; side < 2; ++side) {
            for (std::size_t r = 0; r < repeats; ++r) {
                try {
                    const auto out = d.login(name, side == 0 ? a : b);
                    if (r == 0) subject[side] = out.subject;
                    if (out.subject != subject[side]) {
                        ok = false;
                        report.failures.push_back(name + ": subject changed between logins");
                    }
                } catch (const Error& e) {
                    ok = false;
                    report.failures.push_back(name + ": login failed: " + e.what());
                }
            }
        }
        if (subject[0] == subject[1]) {
            ok = false;
            report.failures.push_back(name + ": both RPs saw the same subject");
        }
        for (const auto& s : subject) {
            if (!s.empty() && !all_subjects.insert(s).second) {
                ok = false;
                report.failures.push_back(name + ": subject collides with another user");
            }
        }
        if (ok) ++report.passed;
    }
    return report;
}

TrialReport revocation_attack(Deployment& d, std::size_t trials)
{
    TrialReport report{"revocation", trials, 0, {}};
    const std::size_t keep = d.add_rp("remaining");
    const auto user = sample_users(1).front();
    try {
        d.add_user(user);
    } catch (const Error&) {
    }
    Rng rng = Rng::from_entropy();
    const std::string authorize_url = d.idp_url() + "/authorize";

    for (std::size_t t = 0; t < trials; ++t) {
        std::vector<std::string> problems;
        const std::size_t v = d.add_rp("revoked-" + std::to_string(t));
        auto& revoked = d.rp(v);
        try {
            d.login(user.username, v);
        } catch (const Error& e) {
            problems.push_back(std::string("login before revocation failed: ") + e.what());
        }
        const auto old = revoked.artifacts();
        const auto cred = revoked.credential();
        d.deregister_rp(v);

        // (a) the cached proof through the normal flow
        try {
            d.login(user.username, v);
            problems.push_back("cached proof accepted");
        } catch (const Error&) {
        }
        // (b) and (c): a fresh proof from the old proving key, with the old and the current version
        const auto witness = circuit::build_witness(*old->proving_key.cs, cred.idp_credential_pk, cred);
        oidc::MembershipProof fresh{zk::groth16_prove(old->proving_key, witness, rng),
                                    circuit::membership_public_inputs(cred.idp_credential_pk), old->version};
        for (const bool relabel : {false, true}) {
            oidc::MembershipProof mp = fresh;
            if (relabel) mp.artifact_version = d.idp().current_version();
            oidc::AuthRequest req{mp, {"openid"}, base64url_encode(rng.bytes(16)), revoked.config().redirect_handle};
            try {
                const auto red = d.user_agent().authorize(authorize_url, req.to_fragment(), user.username,
                                                          user.password, {"openid"});
                if (net::form_decode(red.fragment).count("id_token")) {
                    problems.push_back(relabel ? "relabelled old-key proof accepted" : "old-key proof accepted");
                }
            } catch (const Error&) {
            }
        }
        // (d) the new keys are out of reach
        try {
            revoked.refresh_artifacts();
            problems.push_back("revoked RP obtained the new artifacts");
        } catch (const Error& e) {
            if (e.code() != Errc::AccessDenied) problems.push_back("refresh failed with " + code_name(e));
        }
        // the remaining RP carries on
        try {
            d.rp(keep).refresh_artifacts();
            d.login(user.username, keep);
        } catch (const Error& e) {
            problems.push_back(std::string("remaining RP failed: ") + e.what());
        }
        if (problems.empty()) {
            ++report.passed;
        } else {
            for (const auto& p : problems) report.failures.push_back("trial " + std::to_string(t + 1) + ": " + p);
        }
    }
    return report;
}

}  // namespace expresso::harness
