#include "expresso/rp/rp.hpp"

namespace expresso::rp {

using net::guarded;

namespace {

constexpr std::int64_t kStateTtl = 600;

}  // namespace

RpServer::RpServer(RelyingParty& rp, int refresh_interval_ms) : rp_(rp)
{
    auto& r = http_.routes();
    r.Get("/login", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto scope = oidc::split_scope(req.has_param("scope") ? req.get_param_value("scope") : "openid");
            const auto auth = rp_.initiate_login(scope);
            {
                std::lock_guard lock(mu_);
                const auto now = oidc::unix_seconds();
                std::erase_if(states_, [&](const auto& kv) { return kv.second <= now; });
                states_[auth.state] = now + kStateTtl;
            }
            net::send_json(res, Json{{"authorize", rp_.config().idp_url + "/authorize"},
                                     {"fragment", auth.to_fragment()}});
        });
    });
    // the user agent relays the fragment as the query string
    r.Get("/callback", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto q = req.target.find('?');
            const auto p = net::form_decode(q == std::string::npos ? "" : std::string_view(req.target).substr(q + 1));
            const auto state = p.count("state") ? p.at("state") : "";
            bool known = false;
            {
                std::lock_guard lock(mu_);
                auto it = states_.find(state);
                known = it != states_.end() && it->second > oidc::unix_seconds();
                if (it != states_.end()) states_.erase(it);
            }
            if (!known) throw Error(Errc::StateMismatch, "callback state was not issued by this RP");
            if (p.count("error")) {
                const auto code = errc_from_name(p.at("error")).value_or(Errc::ProofInvalid);
                // a rejected proof usually means the IdP rotated; pick up the new artifacts
                if (code == Errc::StaleArtifacts || code == Errc::ProofInvalid) {
                    try {
                        rp_.refresh_artifacts();
                    } catch (const Error&) {
                    }
                }
                throw Error(code, p.count("error_description") ? p.at("error_description") : "login failed");
            }
            if (!p.count("id_token")) throw Error(Errc::InvalidArgument, "callback carries no id_token");
            const auto login = rp_.validate_token(p.at("id_token"), state);
            net::send_json(res, Json{{"subject", login.subject}, {"claims", login.claims}});
        });
    });

    if (refresh_interval_ms > 0) {
        poller_ = std::thread([this, refresh_interval_ms] {
            std::unique_lock lock(poll_mu_);
            while (!poll_cv_.wait_for(lock, std::chrono::milliseconds(refresh_interval_ms), [this] { return stopping_; })) {
                lock.unlock();
                try {
                    if (rp_.registered()) rp_.refresh_artifacts();
                } catch (const Error&) {
                }
                lock.lock();
            }
        });
    }
}

RpServer::~RpServer() { stop(); }

void RpServer::stop()
{
    {
        std::lock_guard lock(poll_mu_);
        stopping_ = true;
    }
    poll_cv_.notify_all();
    if (poller_.joinable()) poller_.join();
    http_.stop();
}

}  // namespace expresso::rp
