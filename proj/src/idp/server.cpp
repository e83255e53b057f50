#include "expresso/idp/server.hpp"

namespace expresso::idp {

using net::guarded;

namespace {

constexpr std::size_t kMaxPending = 10000;
constexpr std::int64_t kPendingTtl = 600;

std::string bearer_token(const httplib::Request& req)
{
    const auto h = req.get_header_value("Authorization");
    if (h.rfind("Bearer ", 0) != 0) throw Error(Errc::AccessDenied, "missing bearer token");
    return h.substr(7);
}

}  // namespace

IdpServer::IdpServer(IdentityProvider& idp) : idp_(idp)
{
    auto& r = http_.routes();
    r.set_logger([this](const httplib::Request& req, const httplib::Response&) {
        RequestLogEntry e;
        e.remote_addr = req.remote_addr;
        e.method = req.method;
        e.target = req.target;
        for (const auto& [k, v] : req.headers) {
            if (k != "REMOTE_ADDR" && k != "REMOTE_PORT" && k != "LOCAL_ADDR" && k != "LOCAL_PORT") e.headers.emplace(k, v);
        }
        std::lock_guard lock(mu_);
        log_.push_back(std::move(e));
    });

    r.Post("/register", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto body = Json::parse(req.body);
            const auto reg = idp_.register_client({body.at("client_name"), body.at("redirect_uri")});
            net::send_json(res, Json{{"registration_access_token", reg.access_token},
                                     {"credential", base64url_encode(reg.credential.to_bytes())},
                                     {"artifact_version", reg.artifacts.version},
                                     {"artifact_digest", to_hex(reg.artifacts.artifact_digest)},
                                     {"artifacts", base64url_encode(reg.artifacts.serialize())}},
                           201);
        });
    });
    r.Delete("/register", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            idp_.deregister(bearer_token(req));
            net::send_json(res, Json{{"artifact_version", idp_.current_version()}});
        });
    });
    r.Get("/artifacts/current", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto a = idp_.current_artifacts(bearer_token(req));
            net::send_bytes(res, a.serialize());
            res.set_header("X-Artifact-Version", std::to_string(a.version));
        });
    });
    r.Get("/token-signing-key", [this](const httplib::Request&, httplib::Response& res) {
        net::send_json(res, Json{{"issuer", idp_.issuer()},
                                 {"keys", Json::array({oidc::signing_key_jwk(idp_.token_signing_key(),
                                                                              idp_.token_key_id())})}});
    });

    // user-agent entry: the fragment parameters arrive as the query string
    r.Get("/authorize", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto q = req.target.find('?');
            if (q == std::string::npos) throw Error(Errc::InvalidArgument, "authorization request has no parameters");
            auto request = oidc::AuthRequest::from_fragment(std::string_view(req.target).substr(q + 1));
            const std::string txn = to_hex(random_bytes(16));
            const auto now = oidc::unix_seconds();
            Json scope = request.scope;
            {
                std::lock_guard lock(mu_);
                std::erase_if(pending_, [&](const auto& kv) { return kv.second.expires_at <= now; });
                if (pending_.size() >= kMaxPending) throw Error(Errc::Throttled, "too many pending authorizations");
                pending_.emplace(txn, PendingAuth{std::move(request), now + kPendingTtl});
            }
            net::send_json(res, Json{{"txn", txn}, {"scope", scope}, {"login", "/login"}, {"consent", "/consent"}});
        });
    });
    r.Post("/login", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto body = Json::parse(req.body);
            const auto s = idp_.authenticate_user(body.at("username"), body.at("password"));
            net::send_json(res, Json{{"session", s.id}, {"expires_at", s.expires_at}});
        });
    });
    // Completes the flow. Protocol failures go back to the RP in the redirect fragment, as an
    // implicit-flow error response; session problems are reported to the user agent directly.
    r.Post("/consent", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto body = Json::parse(req.body);
            PendingAuth p;
            {
                std::lock_guard lock(mu_);
                auto it = pending_.find(body.at("txn").get<std::string>());
                if (it == pending_.end()) throw Error(Errc::InvalidArgument, "unknown or expired transaction");
                p = std::move(it->second);
                pending_.erase(it);
            }
            net::Params fragment;
            try {
                AuthorizeTiming t;
                const auto tok = idp_.authorize(p.request, body.at("session"),
                                                body.at("granted").get<std::vector<std::string>>(), &t);
                {
                    std::lock_guard lock(mu_);
                    ++totals_.count;
                    totals_.verify_ms += t.verify_ms;
                    totals_.oidc_ops_ms += t.oidc_ops_ms;
                }
                fragment = {{"id_token", tok.id_token}, {"state", p.request.state}};
            } catch (const Error& e) {
                if (e.code() == Errc::AccessDenied) throw;
                fragment = {{"error", std::string(errc_name(e.code()))},
                            {"error_description", e.detail()},
                            {"state", p.request.state}};
            }
            net::send_json(res, Json{{"redirect", p.request.redirect_handle}, {"fragment", net::form_encode(fragment)}});
        });
    });
    r.Get("/metrics", [this](const httplib::Request&, httplib::Response& res) {
        const auto t = timings();
        net::send_json(res, Json{{"authorize_count", t.count},
                                 {"verify_ms_total", t.verify_ms},
                                 {"oidc_ops_ms_total", t.oidc_ops_ms},
                                 {"artifact_version", idp_.current_version()}});
    });
}

std::vector<RequestLogEntry> IdpServer::request_log() const
{
    std::lock_guard lock(mu_);
    return log_;
}

void IdpServer::clear_request_log()
{
    std::lock_guard lock(mu_);
    log_.clear();
}

TimingTotals IdpServer::timings() const
{
    std::lock_guard lock(mu_);
    return totals_;
}

void IdpServer::reset_timings()
{
    std::lock_guard lock(mu_);
    totals_ = {};
}

}  // namespace expresso::idp
