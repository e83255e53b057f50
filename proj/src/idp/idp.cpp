#include "expresso/idp/idp.hpp"

#include <chrono>

#include "expresso/circuit/program.hpp"
#include "expresso/util/file.hpp"
#include "expresso/zk/random.hpp"

namespace expresso::idp {

namespace {

Digest framed_hash(std::string_view domain, ByteView data)
{
    Sha256 h;
    h.update_framed(as_bytes(domain));
    h.update_framed(data);
    return h.finish();
}

Digest client_id_hash(const Fr& client_id) { return framed_hash("expresso.client_id", client_id.to_bytes()); }
Digest token_hash(const std::string& token) { return framed_hash("expresso.access_token", as_bytes(token)); }

double ms_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

IdpConfig IdpConfig::load(const std::filesystem::path& path)
{
    const Bytes raw = read_file(path);
    Json j;
    try {
        j = Json::parse(raw.begin(), raw.end());
    } catch (const Json::exception& e) {
        throw Error(Errc::InvalidArgument, std::string("IdP config is not JSON: ") + e.what());
    }
    IdpConfig c;
    c.idp_id = j.value("idp_id", c.idp_id);
    c.issuer = j.value("issuer", c.issuer);
    c.token_ttl_s = j.value("token_ttl_s", c.token_ttl_s);
    c.session_ttl_s = j.value("session_ttl_s", c.session_ttl_s);
    c.pbkdf2_iterations = j.value("pbkdf2_iterations", c.pbkdf2_iterations);
    c.max_failures = j.value("max_failures", c.max_failures);
    c.lockout_s = j.value("lockout_s", c.lockout_s);
    for (const auto& u : j.value("users", Json::array())) {
        c.users.push_back({u.at("username"), u.at("password"),
                           u.value("attributes", std::map<std::string, std::string>{})});
    }
    return c;
}

IdentityProvider::IdentityProvider(IdpConfig config, ArtifactSource source, ByteView key_seed)
    : config_(std::move(config)), source_(std::move(source))
{
    const Bytes seed = key_seed.empty() ? random_bytes(64) : Bytes(key_seed.begin(), key_seed.end());
    credential_key_ = zk::generate_signing_keypair(framed_hash("expresso.idp.credential", seed));
    token_key_ = Ed25519KeyPair::generate(framed_hash("expresso.idp.token", seed));
    token_kid_ = to_hex(sha256(token_key_.public_key)).substr(0, 16);
    expected_inputs_ = circuit::membership_public_inputs(credential_key_.pk);
    for (const auto& u : config_.users) add_user(u);
}

Bytes IdentityProvider::token_signing_key() const
{
    return Bytes(token_key_.public_key.begin(), token_key_.public_key.end());
}

void IdentityProvider::add_user(const UserConfig& user)
{
    if (user.username.empty()) throw Error(Errc::InvalidArgument, "username must not be empty");
    UserRecord r;
    r.user_id = random_bytes(16);
    r.password_salt = random_bytes(16);
    r.password_verifier = pbkdf2_sha256(user.password, r.password_salt, config_.pbkdf2_iterations);
    r.ppid_salt = random_bytes(32);
    r.attributes = user.attributes;
    std::lock_guard lock(user_mu_);
    if (!users_.emplace(user.username, std::move(r)).second) {
        throw Error(Errc::InvalidArgument, "user '" + user.username + "' already exists");
    }
}

std::shared_ptr<const ZkArtifacts> IdentityProvider::active() const { return std::atomic_load(&artifacts_); }

std::shared_ptr<const ZkArtifacts> IdentityProvider::ensure_artifacts()
{
    if (rotation_pending_ || !artifacts_) rotate_locked();
    return artifacts_;
}

void IdentityProvider::rotate_locked()
{
    ZkArtifacts next;
    try {
        next = source_(config_.idp_id);
    } catch (const Error& e) {
        if (artifacts_) rotation_pending_ = true;
        throw Error(Errc::RegistryUnavailable, std::string("cannot obtain artifacts: ") + e.what());
    }
    if (!next.digest_valid()) throw Error(Errc::RegistryUnavailable, "registry returned a corrupt artifact container");
    if (next.verification_key.ic.size() != expected_inputs_.size() + 1) {
        throw Error(Errc::RegistryUnavailable, "registry artifacts are not for the membership program");
    }
    std::atomic_store(&artifacts_, std::make_shared<const ZkArtifacts>(std::move(next)));
    rotation_pending_ = false;
}

Registration IdentityProvider::register_client(const ClientMetadata& metadata)
{
    if (metadata.client_name.empty() || metadata.redirect_uri.empty()) {
        throw Error(Errc::InvalidArgument, "client_name and redirect_uri are required");
    }
    std::lock_guard lock(reg_mu_);
    const auto artifacts = ensure_artifacts();

    Rng rng = Rng::from_entropy();
    Fr client_id;
    do {
        client_id = zk::random_element<Fr>(rng);
    } while (client_id_hashes_.count(client_id_hash(client_id)));

    Registration out;
    out.credential = ClientCredential{client_id, zk::sign(credential_key_.sk, client_id), credential_key_.pk};
    out.access_token = base64url_encode(random_bytes(32));
    out.artifacts = *artifacts;
    client_id_hashes_.insert(client_id_hash(client_id));
    clients_.emplace(token_hash(out.access_token), ClientRecord{client_id_hash(client_id), metadata});
    return out;
}

ZkArtifacts IdentityProvider::current_artifacts(const std::string& access_token) const
{
    std::lock_guard lock(reg_mu_);
    if (!clients_.count(token_hash(access_token))) throw Error(Errc::AccessDenied, "client is not registered");
    if (!artifacts_) throw Error(Errc::RegistryUnavailable, "no artifacts allocated yet");
    return *artifacts_;
}

void IdentityProvider::deregister(const std::string& access_token)
{
    std::lock_guard lock(reg_mu_);
    auto it = clients_.find(token_hash(access_token));
    if (it == clients_.end()) throw Error(Errc::AccessDenied, "client is not registered");
    // the client_id hash stays reserved so the identifier is never reissued
    clients_.erase(it);
    rotate_locked();
}

void IdentityProvider::rotate_artifacts()
{
    std::lock_guard lock(reg_mu_);
    rotate_locked();
}

bool IdentityProvider::rotation_pending() const
{
    std::lock_guard lock(reg_mu_);
    return rotation_pending_;
}

std::uint64_t IdentityProvider::current_version() const
{
    const auto a = active();
    return a ? a->version : 0;
}

std::size_t IdentityProvider::registered_count() const
{
    std::lock_guard lock(reg_mu_);
    return clients_.size();
}

bool IdentityProvider::knows_client_id(const Fr& client_id) const
{
    std::lock_guard lock(reg_mu_);
    return client_id_hashes_.count(client_id_hash(client_id)) != 0;
}

UserSession IdentityProvider::authenticate_user(const std::string& username, const std::string& password)
{
    const auto now = oidc::unix_seconds();
    Bytes salt;
    Digest verifier{};
    {
        std::lock_guard lock(user_mu_);
        auto it = users_.find(username);
        if (it != users_.end()) {
            if (it->second.locked_until > now) throw Error(Errc::Throttled, "too many failed logins; retry later");
            salt = it->second.password_salt;
            verifier = it->second.password_verifier;
        }
    }
    // unknown users pay the same hashing cost
    const Digest got = pbkdf2_sha256(password, salt.empty() ? Bytes(16) : salt, config_.pbkdf2_iterations);
    std::lock_guard lock(user_mu_);
    auto it = users_.find(username);
    if (it == users_.end() || salt.empty()) throw Error(Errc::BadCredentials, "unknown user or wrong password");
    auto& u = it->second;
    if (!bytes_equal_ct(got, verifier)) {
        if (++u.failures >= config_.max_failures) {
            u.failures = 0;
            u.locked_until = now + config_.lockout_s;
        }
        throw Error(Errc::BadCredentials, "unknown user or wrong password");
    }
    u.failures = 0;
    UserSession s{to_hex(random_bytes(32)), username, now + config_.session_ttl_s};
    sessions_[s.id] = s;
    return s;
}

IssuedToken IdentityProvider::authorize(const oidc::AuthRequest& request, const std::string& session_id,
                                        const std::vector<std::string>& consent, AuthorizeTiming* timing)
{
    Bytes user_id, ppid_salt;
    std::map<std::string, std::string> attributes;
    {
        std::lock_guard lock(user_mu_);
        auto s = sessions_.find(session_id);
        if (s == sessions_.end() || s->second.expires_at <= oidc::unix_seconds()) {
            throw Error(Errc::AccessDenied, "no valid user session");
        }
        const auto& u = users_.at(s->second.username);
        user_id = u.user_id;
        ppid_salt = u.ppid_salt;
        attributes = u.attributes;
    }
    for (const auto& c : consent) {
        if (std::find(request.scope.begin(), request.scope.end(), c) == request.scope.end()) {
            throw Error(Errc::ConsentDenied, "consent for '" + c + "' was not requested");
        }
    }

    const auto artifacts = active();
    if (!artifacts) throw Error(Errc::StaleArtifacts, "no artifacts are active");
    if (request.proof.artifact_version != artifacts->version) {
        throw Error(Errc::StaleArtifacts, "proof made for artifact version " +
                                              std::to_string(request.proof.artifact_version) + ", current is " +
                                              std::to_string(artifacts->version));
    }
    if (request.proof.public_inputs != expected_inputs_) {
        throw Error(Errc::ProofInvalid, "public inputs are not this IdP's credential key");
    }
    auto t0 = std::chrono::steady_clock::now();
    std::string why;
    const bool ok = zk::groth16_verify(artifacts->verification_key, request.proof.public_inputs, request.proof.proof,
                                       &why);
    if (timing) timing->verify_ms = ms_since(t0);
    if (!ok) throw Error(Errc::ProofInvalid, "membership proof rejected: " + why);

    t0 = std::chrono::steady_clock::now();
    IssuedToken out;
    out.subject = oidc::derive_ppid(user_id, request.proof.proof, ppid_salt);
    out.claims = Json::object();
    for (const auto& c : consent) {
        if (auto a = attributes.find(c); a != attributes.end()) out.claims[c] = a->second;
    }
    const auto now = oidc::unix_seconds();
    Json payload{{"iss", config_.issuer},
                 {"sub", to_hex(out.subject)},
                 {"iat", now},
                 {"exp", now + config_.token_ttl_s},
                 {"nonce", request.state}};
    for (const auto& [k, v] : out.claims.items()) payload[k] = v;
    out.id_token = oidc::sign_token(token_key_, payload, token_kid_);
    if (timing) timing->oidc_ops_ms = ms_since(t0);
    return out;
}

Digest IdentityProvider::ppid_for(const std::string& username, const zk::Groth16Proof& proof) const
{
    std::lock_guard lock(user_mu_);
    auto it = users_.find(username);
    if (it == users_.end()) throw Error(Errc::BadCredentials, "unknown user");
    return oidc::derive_ppid(it->second.user_id, proof, it->second.ppid_salt);
}

}  // namespace expresso::idp
