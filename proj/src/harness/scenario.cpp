#include "expresso/harness/scenario.hpp"

#include <chrono>
#include <map>
#include <set>
#include <sstream>

#include "expresso/harness/attacks.hpp"

namespace expresso::harness {

namespace {

[[noreturn]] void invalid(int line, const std::string& msg)
{
    throw Error(Errc::ScenarioInvalid, "line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split_list(const std::string& v)
{
    std::vector<std::string> out;
    std::stringstream in(v);
    for (std::string s; std::getline(in, s, ',');)
        if (!s.empty()) out.push_back(s);
    return out;
}

std::size_t parse_count(const std::string& s, int line)
{
    try {
        std::size_t used = 0;
        const auto n = std::stoul(s, &used);
        if (used != s.size() || n == 0) throw std::invalid_argument(s);
        return n;
    } catch (const std::exception&) {
        invalid(line, "expected a positive count, got '" + s + "'");
    }
}

Step parse_step(const std::vector<std::string>& w, int line, const std::string& text)
{
    const auto& op = w[0];
    auto need = [&](std::size_t n) {
        if (w.size() != n) invalid(line, "'" + op + "' takes " + std::to_string(n - 1) + " argument(s)");
    };
    if (op == "register") {
        need(2);
        return {RegisterStep{w[1]}, line, text};
    }
    if (op == "deregister") {
        need(2);
        return {DeregisterStep{w[1]}, line, text};
    }
    if (op == "rotate-check") {
        need(1);
        return {RotateCheckStep{}, line, text};
    }
    if (op == "collusion") {
        need(4);
        if (w[2] == w[3]) invalid(line, "collusion needs two different RPs");
        return {CollusionStep{w[1], w[2], w[3]}, line, text};
    }
    if (op == "integrity-attack") {
        if (w.size() > 2) invalid(line, "'integrity-attack' takes at most one argument");
        return {IntegrityAttackStep{w.size() == 2 ? parse_count(w[1], line) : 5}, line, text};
    }
    if (op == "login") {
        if (w.size() < 3) invalid(line, "'login' needs a user and an RP");
        LoginStep s;
        s.user = w[1];
        s.rp = w[2];
        for (std::size_t i = 3; i < w.size(); ++i) {
            const auto eq = w[i].find('=');
            if (eq == std::string::npos) invalid(line, "expected key=value, got '" + w[i] + "'");
            const auto key = w[i].substr(0, eq), value = w[i].substr(eq + 1);
            if (key == "scope") {
                s.scope = split_list(value);
            } else if (key == "consent") {
                s.consent = split_list(value);
            } else if (key == "expect") {
                if (value != "ok") {
                    if (value != "fail" && !errc_from_name(value)) invalid(line, "unknown error name '" + value + "'");
                    s.expect_error = value;
                }
            } else {
                invalid(line, "unknown login option '" + key + "'");
            }
        }
        return {s, line, text};
    }
    invalid(line, "unknown step '" + op + "'");
}

}  // namespace

ScenarioScript ScenarioScript::parse(std::string_view text)
{
    ScenarioScript script;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        std::string body = raw.substr(0, hash);
        std::istringstream words(body);
        std::vector<std::string> w;
        for (std::string s; words >> s;) w.push_back(s);
        if (w.empty()) continue;
        std::size_t count = 1;
        if (w[0] == "repeat") {
            if (w.size() < 3) invalid(line, "'repeat' needs a count and a step");
            count = parse_count(w[1], line);
            w.erase(w.begin(), w.begin() + 2);
            if (w[0] == "register" || w[0] == "repeat") invalid(line, "'" + w[0] + "' cannot be repeated");
        }
        const Step step = parse_step(w, line, body.substr(body.find_first_not_of(" \t")));
        for (std::size_t i = 0; i < count; ++i) script.steps.push_back(step);
    }
    if (script.steps.empty()) throw Error(Errc::ScenarioInvalid, "scenario has no steps");
    script.validate();
    return script;
}

void ScenarioScript::validate() const
{
    std::set<std::string> registered;
    auto uses = [&](const Step& s, const std::string& rp) {
        if (!registered.count(rp)) invalid(s.line, "RP '" + rp + "' is used before it is registered");
    };
    for (const auto& s : steps) {
        std::visit(
            [&](const auto& k) {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, RegisterStep>) {
                    if (!registered.insert(k.rp).second) invalid(s.line, "RP '" + k.rp + "' is registered twice");
                } else if constexpr (std::is_same_v<T, LoginStep> || std::is_same_v<T, DeregisterStep>) {
                    uses(s, k.rp);
                } else if constexpr (std::is_same_v<T, CollusionStep>) {
                    uses(s, k.rp_a);
                    uses(s, k.rp_b);
                }
            },
            s.kind);
    }
}

ScenarioResult run_scenario(Deployment& d, const ScenarioScript& script)
{
    script.validate();
    ScenarioResult result;
    std::map<std::string, std::size_t> rps;
    std::set<std::string> revoked;
    double proving_total = 0, auth_total = 0, auth_max = 0;
    std::size_t proofs = 0, logins = 0;
    std::size_t proof_bytes = 0, pk_bytes = 0, vk_bytes = 0, constraints = 0;
    d.idp_server().reset_timings();

    for (std::size_t i = 0; i < script.steps.size(); ++i) {
        const auto& step = script.steps[i];
        StepOutcome out{i + 1, step.text, "", 0};
        const auto t0 = std::chrono::steady_clock::now();
        auto fail = [&](const std::string& why) {
            throw Error(Errc::StepFailure,
                        "step " + std::to_string(i + 1) + " (line " + std::to_string(step.line) + ": " + step.text +
                            "): " + why);
        };
        try {
            std::visit(
                [&](const auto& k) {
                    using T = std::decay_t<decltype(k)>;
                    if constexpr (std::is_same_v<T, RegisterStep>) {
                        const auto idx = d.add_rp(k.rp);
                        rps[k.rp] = idx;
                        const auto p0 = std::chrono::steady_clock::now();
                        const auto proof = d.rp(idx).generate_proof();
                        proving_total +=
                            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - p0).count();
                        ++proofs;
                        const auto a = d.rp(idx).artifacts();
                        proof_bytes = proof.serialize().size();
                        pk_bytes = a->proving_key.serialize().size();
                        vk_bytes = a->verification_key.serialize().size();
                        constraints = a->proving_key.cs->constraint_count();
                        out.detail = "artifact version " + std::to_string(a->version);
                    } else if constexpr (std::is_same_v<T, LoginStep>) {
                        std::optional<LoginOutcome> login;
                        std::optional<Error> err;
                        auto& party = d.rp(rps.at(k.rp));
                        const auto version = party.artifact_version();
                        bool retried = false;
                        try {
                            login = d.login(k.user, rps.at(k.rp), k.scope, k.consent);
                        } catch (const Error& e) {
                            err = e;
                        }
                        // A stale RP refreshes from its callback; the user then starts over once.
                        if (err && err->code() == Errc::StaleArtifacts && party.artifact_version() != version) {
                            err.reset();
                            retried = true;
                            try {
                                login = d.login(k.user, rps.at(k.rp), k.scope, k.consent);
                            } catch (const Error& e) {
                                err = e;
                            }
                        }
                        if (k.expect_error) {
                            if (!err) fail("login succeeded but " + *k.expect_error + " was expected");
                            if (*k.expect_error != "fail" && errc_name(err->code()) != *k.expect_error) {
                                fail("expected " + *k.expect_error + ", got " + err->what());
                            }
                            out.detail = std::string("refused: ") + std::string(errc_name(err->code()));
                        } else {
                            if (err) fail(err->what());
                            ++logins;
                            auth_total += login->user_auth_ms;
                            auth_max = std::max(auth_max, login->user_auth_ms);
                            out.detail = "sub=" + login->subject.substr(0, 16) + "...";
                            if (retried) out.detail += " (after artifact refresh)";
                        }
                    } else if constexpr (std::is_same_v<T, DeregisterStep>) {
                        d.deregister_rp(rps.at(k.rp));
                        revoked.insert(k.rp);
                        out.detail = "IdP now at version " + std::to_string(d.idp().current_version());
                    } else if constexpr (std::is_same_v<T, RotateCheckStep>) {
                        const auto latest = d.registry().get_latest_digest(d.config().idp_id);
                        for (const auto& [name, idx] : rps) {
                            if (revoked.count(name)) continue;
                            d.rp(idx).refresh_artifacts();
                            if (d.rp(idx).artifacts()->artifact_digest != latest.artifact_digest) {
                                fail("RP '" + name + "' does not hold the latest artifacts");
                            }
                        }
                        out.detail = "all active RPs at version " + std::to_string(latest.version);
                    } else if constexpr (std::is_same_v<T, CollusionStep>) {
                        const auto a1 = d.login(k.user, rps.at(k.rp_a)).subject;
                        const auto a2 = d.login(k.user, rps.at(k.rp_a)).subject;
                        const auto b1 = d.login(k.user, rps.at(k.rp_b)).subject;
                        if (a1 != a2) fail("subject changed between logins at the same RP");
                        if (a1 == b1) fail("two RPs received the same subject");
                        out.detail = "subjects differ";
                    } else if constexpr (std::is_same_v<T, IntegrityAttackStep>) {
                        const auto r = integrity_attack(d, k.trials);
                        if (!r.ok()) fail(r.summary());
                        out.detail = r.summary();
                    }
                },
                step.kind);
        } catch (const Error& e) {
            if (e.code() == Errc::StepFailure) throw;
            fail(e.what());
        }
        out.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        result.steps.push_back(std::move(out));
    }

    if (logins > 0) {
        const auto t = d.idp_server().timings();
        BenchReport r;
        r.reps = logins;
        r.proving_ms = proofs ? proving_total / proofs : 0;
        r.user_auth_ms = auth_total / logins;
        r.user_auth_max_ms = auth_max;
        r.verification_ms = t.count ? t.verify_ms / t.count : 0;
        r.oidc_ops_ms = t.count ? t.oidc_ops_ms / t.count : 0;
        r.proof_bytes = proof_bytes;
        r.pk_bytes = pk_bytes;
        r.vk_bytes = vk_bytes;
        r.constraints = constraints;
        result.report = r;
    }
    return result;
}

}  // namespace expresso::harness
