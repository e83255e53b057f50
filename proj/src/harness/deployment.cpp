#include "expresso/harness/deployment.hpp"

#include <thread>

namespace expresso::harness {

std::vector<idp::UserConfig> sample_users(std::size_t count)
{
    static const char* names[] = {"alice", "bob", "carol", "dave", "erin", "frank", "grace", "heidi"};
    std::vector<idp::UserConfig> out;
    for (std::size_t i = 0; i < count; ++i) {
        std::string name = i < std::size(names) ? names[i] : "user" + std::to_string(i);
        out.push_back({name, name + "-password-" + std::to_string(i),
                       {{"name", name}, {"email", name + "@example.org"}, {"locale", i % 2 ? "de" : "en"}}});
    }
    return out;
}

Deployment::Deployment(DeploymentConfig config) : config_(std::move(config)), ua_(config_.user_agent)
{
    registry::RegistryConfig rc;
    rc.data_dir = config_.data_dir;
    rc.idps = {config_.idp_id};
    rc.idps.insert(rc.idps.end(), config_.extra_idps.begin(), config_.extra_idps.end());
    rc.contributors = config_.contributors;
    rc.low_watermark = 1;
    rc.replenish_batch = 1;
    rc.auto_replenish = false;
    registry_ = std::make_unique<registry::Registry>(rc, config_.phase1, config_.program);
    if (registry_->pending_count() < config_.initial_pool) {
        registry_->replenish(config_.initial_pool - registry_->pending_count());
    }
    if (config_.auto_replenish) registry_->start_replenisher();
    registry_server_ = std::make_unique<registry::RegistryServer>(*registry_);
    registry_server_->start(config_.service_host);

    idp::IdpConfig ic;
    ic.idp_id = config_.idp_id;
    ic.pbkdf2_iterations = config_.pbkdf2_iterations;
    users_ = config_.users.empty() ? sample_users(5) : config_.users;
    ic.users = users_;
    const std::string registry_url = registry_server_->base_url();
    idp_ = std::make_unique<idp::IdentityProvider>(ic, [registry_url](const std::string& id) {
        return registry::RegistryClient(registry_url).request_artifacts(id);
    });
    idp_server_ = std::make_unique<idp::IdpServer>(*idp_);
    idp_server_->start(config_.service_host);
}

Deployment::~Deployment()
{
    for (auto& s : rps_) s->server->stop();
    if (idp_server_) idp_server_->stop();
    if (registry_server_) registry_server_->stop();
    if (registry_) registry_->stop_replenisher();
}

rp::RpConfig Deployment::rp_config(const std::string& name) const
{
    rp::RpConfig c;
    c.name = name;
    c.idp_url = idp_url();
    c.idp_id = config_.idp_id;
    c.registry_url = registry_url();
    c.redirect_handle = "proxy:" + to_hex(random_bytes(12));
    return c;
}

namespace {

/// Retries `f` while the registry pool is empty.
template <class F>
auto retry_on_empty_pool(registry::Registry& reg, bool auto_replenish, std::chrono::seconds timeout, F&& f)
{
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
        try {
            return f();
        } catch (const Error& e) {
            if (e.code() != Errc::RegistryUnavailable && e.code() != Errc::PoolExhausted) throw;
            if (std::chrono::steady_clock::now() > deadline) throw;
        }
        if (!auto_replenish && reg.pending_count() == 0) {
            reg.replenish(1);
        } else {
            std::this_thread::sleep_for(std::chrono::milliseconds(200));
        }
    }
}

}  // namespace

std::size_t Deployment::add_rp(const std::string& name)
{
    const std::size_t index = rps_.size();
    auto slot = std::make_unique<RpSlot>();
    slot->host = "127.0.0." + std::to_string(config_.rp_host_base + static_cast<int>(index));
    slot->rp = std::make_unique<rp::RelyingParty>(rp_config(name.empty() ? "rp-" + std::to_string(index) : name));
    slot->server = std::make_unique<rp::RpServer>(*slot->rp);
    slot->server->start(slot->host);
    ua_.map_handle(slot->rp->config().redirect_handle, slot->server->callback_url());
    retry_on_empty_pool(*registry_, config_.auto_replenish, std::chrono::seconds(600), [&] {
        slot->rp->register_with_idp();
        return 0;
    });
    rps_.push_back(std::move(slot));
    return index;
}


void Deployment::deregister_rp(std::size_t index, std::chrono::seconds timeout)
{
    try {
        rp(index).deregister();
    } catch (const Error& e) {
        // the client is gone already; only the rotation was deferred
        if (e.code() != Errc::RegistryUnavailable && e.code() != Errc::PoolExhausted) throw;
        rotate_idp(timeout);
    }
}

void Deployment::rotate_idp(std::chrono::seconds timeout)
{
    retry_on_empty_pool(*registry_, config_.auto_replenish, timeout, [&] {
        idp_->rotate_artifacts();
        return 0;
    });
}

ceremony::ZkArtifacts Deployment::allocate(const std::string& idp_id, std::chrono::seconds timeout)
{
    return retry_on_empty_pool(*registry_, config_.auto_replenish, timeout,
                               [&] { return registry_->request_artifacts(idp_id); });
}

void Deployment::add_user(const idp::UserConfig& user)
{
    idp_->add_user(user);
    users_.push_back(user);
}

const idp::UserConfig& Deployment::user(const std::string& username) const
{
    for (const auto& u : users_)
        if (u.username == username) return u;
    throw Error(Errc::BadCredentials, "no such user '" + username + "'");
}

LoginOutcome Deployment::login(const std::string& username, std::size_t rp, const std::vector<std::string>& scope,
                               const std::vector<std::string>& consent)
{
    const auto& u = user(username);
    return ua_.login(rp_server(rp).base_url(), u.username, u.password, scope, consent);
}

std::vector<std::string> Deployment::rp_address_leaks() const
{
    std::vector<std::string> needles;
    for (const auto& s : rps_) {
        needles.push_back(s->host);
        needles.push_back(s->server->base_url());
    }
    // a host must not be followed by another digit ("127.0.0.1" is not "127.0.0.10")
    auto mentions = [](const std::string& hay, const std::string& needle) {
        for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) {
            const auto end = pos + needle.size();
            if (end == hay.size() || !std::isdigit(static_cast<unsigned char>(hay[end]))) return true;
        }
        return false;
    };
    std::vector<std::string> leaks;
    for (const auto& e : idp_server_->request_log()) {
        std::vector<std::pair<std::string, std::string>> fields{{"remote_addr", e.remote_addr},
                                                                {"target", e.target}};
        for (const auto& [k, v] : e.headers) fields.emplace_back("header " + k, v);
        for (const auto& [what, value] : fields) {
            for (const auto& n : needles) {
                if (mentions(value, n)) leaks.push_back(e.method + " " + e.target + ": " + what + " mentions " + n);
            }
        }
    }
    return leaks;
}

}  // namespace expresso::harness
