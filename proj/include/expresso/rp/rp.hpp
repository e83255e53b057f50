#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "expresso/ceremony/artifacts.hpp"
#include "expresso/net/http.hpp"
#include "expresso/oidc/protocol.hpp"

namespace expresso::rp {

using ceremony::ZkArtifacts;
using circuit::ClientCredential;
using oidc::Json;

struct RpConfig {
    std::string name = "rp";
    std::string idp_url;       // identity provider base URL
    std::string idp_id;        // the IdP's name at the registry
    std::string registry_url;  // OIDF registry base URL
    std::string redirect_handle;  // proxy handle registered instead of the callback address
    std::string source_ip;     // local address for back-channel calls; empty for the default
    std::filesystem::path cache_dir;  // optional: state survives restarts
    std::int64_t clock_skew_s = 60;
};

struct ValidatedLogin {
    std::string subject;  // hex PPID
    Json claims;
};

/// Relying-party side of the protocol. Registration and refresh are single-writer; logins read
/// shared state and reuse one cached proof.
class RelyingParty {
public:
    explicit RelyingParty(RpConfig config);

    /// Errors: IdPUnavailable, InvalidCredential, IntegrityMismatch.
    void register_with_idp();
    /// Recomputes the container digest and compares it with the registry's latest for this IdP,
    /// and checks the proving key's circuit against the published boilerplate. Any registry
    /// failure counts as a mismatch.
    bool check_artifact_integrity(const ZkArtifacts& artifacts) const;
    /// Cached after the first call. Errors: NoProof (not registered), InvalidCredential.
    oidc::MembershipProof generate_proof();
    /// Errors: NoProof.
    oidc::AuthRequest initiate_login(const std::vector<std::string>& scope);
    /// Errors: BadSignature, Expired, StateMismatch.
    ValidatedLogin validate_token(const std::string& token, const std::string& expected_state) const;
    /// Pulls the IdP's current artifacts. Returns true if the version advanced (the cached proof
    /// is dropped). Errors: AccessDenied, IntegrityMismatch, IdPUnavailable.
    bool refresh_artifacts();
    /// Asks the IdP to drop this client. Local state is left in place (and goes stale).
    void deregister();
    /// Reloads state saved in cache_dir and re-checks integrity. False when nothing was saved.
    bool restore();

    /// True once registration succeeded (de-registration does not reset it).
    bool registered() const;
    bool has_cached_proof() const;
    std::uint64_t artifact_version() const;
    std::shared_ptr<const ZkArtifacts> artifacts() const;
    ClientCredential credential() const;
    const RpConfig& config() const { return config_; }

private:
    struct State {
        ClientCredential credential;
        std::string access_token;
        std::shared_ptr<const ZkArtifacts> artifacts;
        std::shared_ptr<const oidc::MembershipProof> cached_proof;
    };

    std::unique_ptr<httplib::Client> idp_client() const;
    void fetch_signing_key();
    void persist(const State& s) const;
    Bytes signing_key() const;

    RpConfig config_;
    mutable std::shared_mutex mu_;
    std::optional<State> state_;
    std::mutex prove_mu_;  // a cold cache proves once
    mutable std::mutex key_mu_;
    Bytes token_key_;
    std::string issuer_;
    mutable std::mutex boilerplate_mu_;
    mutable std::optional<Digest> circuit_digest_;  // compiled from the registry's boilerplate
};

/// RP web endpoints: GET /login starts a flow, GET /callback receives the relayed fragment.
class RpServer {
public:
    /// `refresh_interval_ms` > 0 also polls the IdP for rotated artifacts on a timer.
    explicit RpServer(RelyingParty& rp, int refresh_interval_ms = 0);
    ~RpServer();
    int start(const std::string& host, int port = 0) { return http_.start(host, port); }
    void stop();
    std::string base_url() const { return http_.base_url(); }
    std::string callback_url() const { return base_url() + "/callback"; }

private:
    RelyingParty& rp_;
    net::HttpServer http_;
    std::mutex mu_;
    std::map<std::string, std::int64_t> states_;  // issued state -> expiry
    std::thread poller_;
    std::mutex poll_mu_;
    std::condition_variable poll_cv_;
    bool stopping_ = false;
};

}  // namespace expresso::rp
