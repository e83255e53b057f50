#pragma once

#include <memory>
#include <string>
#include <vector>

#include "expresso/harness/user_agent.hpp"
#include "expresso/idp/server.hpp"
#include "expresso/registry/service.hpp"
#include "expresso/rp/rp.hpp"

namespace expresso::harness {

struct DeploymentConfig {
    std::string idp_id = "idp-1";
    std::vector<std::string> extra_idps;  // also enrolled at the registry
    std::size_t initial_pool = 1;
    bool auto_replenish = true;
    std::vector<std::string> contributors{"oidf-coordinator", "oidf-auditor"};
    std::vector<idp::UserConfig> users;
    int pbkdf2_iterations = 2000;
    std::shared_ptr<const ceremony::Phase1Parameters> phase1;  // generated when null
    circuit::BoilerplateProgram program = circuit::BoilerplateProgram::membership();
    UserAgentConfig user_agent;
    std::string service_host = "127.0.0.1";  // registry and IdP listen here
    int rp_host_base = 10;                    // RP i listens on 127.0.0.(base + i)
    std::filesystem::path data_dir;           // registry persistence; empty keeps it in memory
};

/// Default users: alice, bob, carol, ... with name and email claims.
std::vector<idp::UserConfig> sample_users(std::size_t count);

/// Registry, one IdP and any number of RPs on loopback HTTP in this process, plus the user agent.
class Deployment {
public:
    explicit Deployment(DeploymentConfig config);
    ~Deployment();

    /// Creates an RP on its own loopback address and registers it. Returns its index.
    std::size_t add_rp(const std::string& name = "");
    /// De-registers the RP and waits until the IdP has rotated. The RP object stays, holding its
    /// stale state, so tests can attempt logins with it.
    void deregister_rp(std::size_t index, std::chrono::seconds timeout = std::chrono::seconds(600));
    /// Rotates the IdP to a new allocation, waiting for the pool to refill if needed.
    void rotate_idp(std::chrono::seconds timeout = std::chrono::seconds(600));
    /// Allocation for another enrolled IdP, waiting for the pool if needed.
    ceremony::ZkArtifacts allocate(const std::string& idp_id, std::chrono::seconds timeout = std::chrono::seconds(600));
    void add_user(const idp::UserConfig& user);

    LoginOutcome login(const std::string& username, std::size_t rp, const std::vector<std::string>& scope = {"openid"},
                       const std::vector<std::string>& consent = {"openid"});

    /// Every address, header or parameter in the IdP's request log that names an RP endpoint.
    std::vector<std::string> rp_address_leaks() const;

    registry::Registry& registry() { return *registry_; }
    idp::IdentityProvider& idp() { return *idp_; }
    idp::IdpServer& idp_server() { return *idp_server_; }
    rp::RelyingParty& rp(std::size_t i) { return *rps_.at(i)->rp; }
    rp::RpServer& rp_server(std::size_t i) { return *rps_.at(i)->server; }
    std::size_t rp_count() const { return rps_.size(); }
    UserAgent& user_agent() { return ua_; }
    const DeploymentConfig& config() const { return config_; }
    std::string registry_url() const { return registry_server_->base_url(); }
    std::string idp_url() const { return idp_server_->base_url(); }
    const idp::UserConfig& user(const std::string& username) const;
    rp::RpConfig rp_config(const std::string& name) const;

private:
    struct RpSlot {
        std::string host;
        std::unique_ptr<rp::RelyingParty> rp;
        std::unique_ptr<rp::RpServer> server;
    };

    DeploymentConfig config_;
    std::unique_ptr<registry::Registry> registry_;
    std::unique_ptr<registry::RegistryServer> registry_server_;
    std::unique_ptr<idp::IdentityProvider> idp_;
    std::unique_ptr<idp::IdpServer> idp_server_;
    std::vector<std::unique_ptr<RpSlot>> rps_;
    std::vector<idp::UserConfig> users_;
    UserAgent ua_;
};

}  // namespace expresso::harness
