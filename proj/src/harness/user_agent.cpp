#include "expresso/harness/user_agent.hpp"

#include <chrono>

#include "expresso/oidc/protocol.hpp"

namespace expresso::harness {

namespace {

const httplib::Headers kHeaders{{"User-Agent", "expresso-ua/1"}};

double ms_between(std::chrono::steady_clock::time_point a, std::chrono::steady_clock::time_point b)
{
    return std::chrono::duration<double, std::milli>(b - a).count();
}

}  // namespace

UserAgent::UserAgent(UserAgentConfig config) : config_(std::move(config)) {}

void UserAgent::map_handle(const std::string& handle, const std::string& callback_url)
{
    std::lock_guard lock(mu_);
    handles_[handle] = callback_url;
}

void UserAgent::unmap_handle(const std::string& handle)
{
    std::lock_guard lock(mu_);
    handles_.erase(handle);
}

std::string UserAgent::resolve(const std::string& handle) const
{
    std::lock_guard lock(mu_);
    auto it = handles_.find(handle);
    if (it == handles_.end()) throw Error(Errc::RelayFailure, "unknown redirect handle '" + handle + "'");
    return it->second;
}

UserAgent::Response UserAgent::forward(const std::string& to_url, const std::string& fragment) const
{
    if (fragment.size() > config_.fragment_limit) {
        throw Error(Errc::RelayFailure, "fragment of " + std::to_string(fragment.size()) + " bytes exceeds the " +
                                            std::to_string(config_.fragment_limit) + "-byte limit");
    }
    const auto [base, path] = net::split_url(to_url);
    auto cli = net::make_client(base, config_.source_ip);
    auto r = cli->Get(path + (fragment.empty() ? "" : "?" + fragment), kHeaders);
    if (!r) throw Error(Errc::RelayFailure, "relay to " + to_url + " failed: " + httplib::to_string(r.error()));
    return {r->status, r->body};
}

UserAgent::Redirect UserAgent::authorize(const std::string& authorize_url, const std::string& fragment,
                                         const std::string& username, const std::string& password,
                                         const std::vector<std::string>& consent) const
{
    const auto entry = forward(authorize_url, fragment);
    const Json txn = net::expect_json(entry.status, entry.body, Errc::RelayFailure);
    auto idp = net::make_client(net::split_url(authorize_url).first, config_.source_ip);
    const Json session = net::expect_json(
        idp->Post("/login", kHeaders, Json{{"username", username}, {"password", password}}.dump(), "application/json"),
        Errc::RelayFailure);
    const Json redirect = net::expect_json(
        idp->Post("/consent", kHeaders,
                  Json{{"txn", txn.at("txn")}, {"session", session.at("session")}, {"granted", consent}}.dump(),
                  "application/json"),
        Errc::RelayFailure);
    return {redirect.at("redirect"), redirect.at("fragment")};
}

LoginOutcome UserAgent::login(const std::string& rp_url, const std::string& username, const std::string& password,
                              const std::vector<std::string>& scope, const std::vector<std::string>& consent) const
{
    const auto t0 = std::chrono::steady_clock::now();
    auto rp = net::make_client(rp_url, config_.source_ip);
    const Json start = net::expect_json(
        rp->Get("/login?" + net::form_encode({{"scope", oidc::join_scope(scope)}}), kHeaders), Errc::RelayFailure);
    const std::string authorize_url = start.at("authorize");
    const std::string fragment = start.at("fragment");

    const auto t1 = std::chrono::steady_clock::now();
    const auto redirect = authorize(authorize_url, fragment, username, password, consent);
    const auto cb = forward(resolve(redirect.handle), redirect.fragment);
    const Json done = net::expect_json(cb.status, cb.body, Errc::RelayFailure);
    const auto t2 = std::chrono::steady_clock::now();

    LoginOutcome out;
    out.subject = done.at("subject");
    out.claims = done.at("claims");
    out.user_auth_ms = ms_between(t1, t2);
    out.total_ms = ms_between(t0, t2);
    out.fragment_bytes = fragment.size();
    return out;
}

}  // namespace expresso::harness
