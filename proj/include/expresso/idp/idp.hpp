#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "expresso/ceremony/artifacts.hpp"
#include "expresso/oidc/protocol.hpp"
#include "expresso/zk/signature.hpp"

namespace expresso::idp {

using ceremony::ZkArtifacts;
using circuit::ClientCredential;
using oidc::Json;
using zk::Fr;

struct UserConfig {
    std::string username;
    std::string password;
    std::map<std::string, std::string> attributes;  // claim name -> value
};

struct IdpConfig {
    std::string idp_id = "idp-1";
    std::string issuer = "http://idp.expresso.test";
    std::vector<UserConfig> users;
    std::int64_t token_ttl_s = 300;
    std::int64_t session_ttl_s = 900;
    int pbkdf2_iterations = 20000;
    int max_failures = 5;            // consecutive failures before lockout
    std::int64_t lockout_s = 60;

    static IdpConfig load(const std::filesystem::path& path);
};

/// Fetches a fresh artifact allocation for the IdP (the registry client in deployments).
using ArtifactSource = std::function<ZkArtifacts(const std::string& idp_id)>;

struct ClientMetadata {
    std::string client_name;
    std::string redirect_uri;  // proxy handle, never the RP's own address
};

struct Registration {
    std::string access_token;  // authorizes GET /artifacts/current and de-registration
    ClientCredential credential;
    ZkArtifacts artifacts;
};

struct UserSession {
    std::string id;
    std::string username;
    std::int64_t expires_at = 0;
};

struct IssuedToken {
    std::string id_token;
    Digest subject{};
    Json claims;
};

/// Wall-clock split of one authorize call.
struct AuthorizeTiming {
    double verify_ms = 0;
    double oidc_ops_ms = 0;  // PPID derivation, token construction and signing
};

class IdentityProvider {
public:
    /// `key_seed` (64 bytes) fixes the credential and token keys; empty draws fresh ones.
    IdentityProvider(IdpConfig config, ArtifactSource source, ByteView key_seed = {});

    const std::string& idp_id() const { return config_.idp_id; }
    const std::string& issuer() const { return config_.issuer; }
    const zk::EdwardsPoint& credential_public_key() const { return credential_key_.pk; }
    Bytes token_signing_key() const;
    const std::string& token_key_id() const { return token_kid_; }

    void add_user(const UserConfig& user);

    /// Errors: InvalidArgument, RegistryUnavailable.
    Registration register_client(const ClientMetadata& metadata);
    /// Errors: AccessDenied for unknown or de-registered clients.
    ZkArtifacts current_artifacts(const std::string& access_token) const;
    /// Removes the client and rotates to a new artifact allocation. Errors: AccessDenied;
    /// RegistryUnavailable (the client is gone but the old key stays active until rotate_artifacts
    /// succeeds).
    void deregister(const std::string& access_token);
    void rotate_artifacts();
    bool rotation_pending() const;
    std::uint64_t current_version() const;
    std::size_t registered_count() const;
    /// Duplicate check against the stored client_id hashes.
    bool knows_client_id(const Fr& client_id) const;

    /// Errors: BadCredentials, Throttled.
    UserSession authenticate_user(const std::string& username, const std::string& password);
    /// Errors: AccessDenied (no session), ConsentDenied, StaleArtifacts, ProofInvalid.
    IssuedToken authorize(const oidc::AuthRequest& request, const std::string& session_id,
                          const std::vector<std::string>& consent, AuthorizeTiming* timing = nullptr);

    /// PPID for a user and proof, with the user's stored salt. Errors: BadCredentials (unknown user).
    Digest ppid_for(const std::string& username, const zk::Groth16Proof& proof) const;

private:
    struct UserRecord {
        Bytes user_id;
        Bytes password_salt;
        Digest password_verifier{};
        Bytes ppid_salt;
        std::map<std::string, std::string> attributes;
        int failures = 0;
        std::int64_t locked_until = 0;
    };
    struct ClientRecord {
        Digest client_id_hash{};
        ClientMetadata metadata;
    };

    std::shared_ptr<const ZkArtifacts> active() const;
    std::shared_ptr<const ZkArtifacts> ensure_artifacts();
    void rotate_locked();

    IdpConfig config_;
    ArtifactSource source_;
    zk::SigningKeyPair credential_key_;
    Ed25519KeyPair token_key_;
    std::string token_kid_;
    std::vector<Fr> expected_inputs_;

    mutable std::mutex reg_mu_;  // registration, de-registration and rotation
    std::shared_ptr<const ZkArtifacts> artifacts_;
    std::map<Digest, ClientRecord> clients_;  // keyed by H(access token)
    std::set<Digest> client_id_hashes_;
    bool rotation_pending_ = false;

    mutable std::mutex user_mu_;
    std::unordered_map<std::string, UserRecord> users_;
    std::unordered_map<std::string, UserSession> sessions_;
};

}  // namespace expresso::idp
