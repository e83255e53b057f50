#include "expresso/rp/rp.hpp"

#include "expresso/circuit/program.hpp"
#include "expresso/registry/service.hpp"
#include "expresso/util/file.hpp"

namespace expresso::rp {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kReservedClaims{"iss", "sub", "iat", "exp", "nonce"};

}  // namespace

RelyingParty::RelyingParty(RpConfig config) : config_(std::move(config))
{
    if (config_.idp_url.empty() || config_.registry_url.empty() || config_.idp_id.empty()) {
        throw Error(Errc::InvalidArgument, "RP needs the IdP URL, the IdP id and the registry URL");
    }
    if (config_.redirect_handle.empty()) config_.redirect_handle = "proxy:" + to_hex(random_bytes(12));
}

std::unique_ptr<httplib::Client> RelyingParty::idp_client() const
{
    return net::make_client(config_.idp_url, config_.source_ip);
}

void RelyingParty::fetch_signing_key()
{
    const Json j = net::expect_json(idp_client()->Get("/token-signing-key"), Errc::IdPUnavailable);
    Bytes key = oidc::public_key_from_jwk(j.at("keys").at(0));
    std::lock_guard lock(key_mu_);
    token_key_ = std::move(key);
    issuer_ = j.at("issuer").get<std::string>();
}

Bytes RelyingParty::signing_key() const
{
    std::lock_guard lock(key_mu_);
    return token_key_;
}

bool RelyingParty::check_artifact_integrity(const ZkArtifacts& artifacts) const
{
    try {
        const registry::RegistryClient oidf(config_.registry_url, config_.source_ip);
        const auto latest = oidf.latest_digest(config_.idp_id);
        if (artifacts.compute_digest() != latest.artifact_digest) return false;
        if (artifacts.version != latest.version) return false;
        {
            std::lock_guard lock(boilerplate_mu_);
            if (!circuit_digest_) {
                const auto program = oidf.boilerplate();
                circuit_digest_ = circuit::compile(program).digest();
            }
        }
        return artifacts.proving_key.cs && artifacts.proving_key.cs->digest() == *circuit_digest_ &&
               artifacts.proving_key.cs->program_digest == artifacts.program_digest;
    } catch (const Error&) {
        return false;  // fail closed
    }
}

void RelyingParty::register_with_idp()
{
    const Json body{{"client_name", config_.name}, {"redirect_uri", config_.redirect_handle}};
    const Json j = net::expect_json(idp_client()->Post("/register", body.dump(), "application/json"),
                                    Errc::IdPUnavailable);
    State s;
    try {
        s.credential = ClientCredential::from_bytes(base64url_decode(j.at("credential").get<std::string>()));
        s.access_token = j.at("registration_access_token").get<std::string>();
    } catch (const Json::exception& e) {
        throw Error(Errc::MalformedEncoding, std::string("bad registration response: ") + e.what());
    }
    if (!s.credential.verify()) throw Error(Errc::InvalidCredential, "credential signature does not verify");
    auto artifacts = std::make_shared<const ZkArtifacts>(
        ZkArtifacts::deserialize(base64url_decode(j.at("artifacts").get<std::string>())));
    if (!check_artifact_integrity(*artifacts)) {
        throw Error(Errc::IntegrityMismatch, "artifacts from the IdP differ from the registry's latest digest");
    }
    s.artifacts = std::move(artifacts);
    fetch_signing_key();
    persist(s);
    std::unique_lock lock(mu_);
    state_ = std::move(s);
}

oidc::MembershipProof RelyingParty::generate_proof()
{
    State snap;
    {
        std::shared_lock lock(mu_);
        if (!state_) throw Error(Errc::NoProof, "not registered with the IdP");
        if (state_->cached_proof) return *state_->cached_proof;
        snap = *state_;
    }
    std::lock_guard prove(prove_mu_);
    {
        std::shared_lock lock(mu_);
        if (state_ && state_->cached_proof && state_->artifacts == snap.artifacts) return *state_->cached_proof;
    }
    const auto& pk = snap.artifacts->proving_key;
    const auto witness = circuit::build_witness(*pk.cs, snap.credential.idp_credential_pk, snap.credential);
    Rng rng = Rng::from_entropy();
    auto proof = std::make_shared<const oidc::MembershipProof>(
        oidc::MembershipProof{zk::groth16_prove(pk, witness, rng),
                              circuit::membership_public_inputs(snap.credential.idp_credential_pk),
                              snap.artifacts->version});
    std::unique_lock lock(mu_);
    // only cache if no refresh replaced the artifacts meanwhile
    if (state_ && state_->artifacts == snap.artifacts) state_->cached_proof = proof;
    return *proof;
}

oidc::AuthRequest RelyingParty::initiate_login(const std::vector<std::string>& scope)
{
    oidc::AuthRequest req;
    req.proof = generate_proof();
    req.scope = scope;
    req.state = base64url_encode(random_bytes(24));
    req.redirect_handle = config_.redirect_handle;
    return req;
}

ValidatedLogin RelyingParty::validate_token(const std::string& token, const std::string& expected_state) const
{
    const Bytes key = signing_key();
    if (key.empty()) throw Error(Errc::BadSignature, "no token-signing key known for the IdP");
    const Json payload = oidc::verify_token(token, key);
    {
        std::lock_guard lock(key_mu_);
        if (payload.value("iss", "") != issuer_) throw Error(Errc::BadSignature, "token issuer mismatch");
    }
    if (!payload.contains("exp") || payload.at("exp").get<std::int64_t>() + config_.clock_skew_s < oidc::unix_seconds()) {
        throw Error(Errc::Expired, "token has expired");
    }
    if (expected_state.empty() || payload.value("nonce", "") != expected_state) {
        throw Error(Errc::StateMismatch, "token is not bound to this login");
    }
    ValidatedLogin out;
    out.subject = payload.value("sub", "");
    if (out.subject.empty()) throw Error(Errc::MalformedEncoding, "token has no subject");
    out.claims = Json::object();
    for (const auto& [k, v] : payload.items()) {
        if (!kReservedClaims.count(k)) out.claims[k] = v;
    }
    return out;
}

bool RelyingParty::refresh_artifacts()
{
    std::string token;
    std::uint64_t have = 0;
    {
        std::shared_lock lock(mu_);
        if (!state_) throw Error(Errc::AccessDenied, "not registered with the IdP");
        token = state_->access_token;
        have = state_->artifacts->version;
    }
    auto cli = idp_client();
    const httplib::Headers auth{{"Authorization", "Bearer " + token}};
    auto fresh = std::make_shared<const ZkArtifacts>(
        ZkArtifacts::deserialize(net::expect_bytes(cli->Get("/artifacts/current", auth), Errc::IdPUnavailable)));
    if (!check_artifact_integrity(*fresh)) {
        throw Error(Errc::IntegrityMismatch, "refreshed artifacts differ from the registry's latest digest");
    }
    if (fresh->version == have) return false;
    std::unique_lock lock(mu_);
    if (!state_) throw Error(Errc::AccessDenied, "de-registered during refresh");
    state_->artifacts = std::move(fresh);
    state_->cached_proof.reset();
    persist(*state_);
    return true;
}

void RelyingParty::deregister()
{
    std::string token;
    {
        std::shared_lock lock(mu_);
        if (!state_) throw Error(Errc::AccessDenied, "not registered with the IdP");
        token = state_->access_token;
    }
    const httplib::Headers auth{{"Authorization", "Bearer " + token}};
    // local state is kept; the IdP simply stops honouring it
    net::expect_json(idp_client()->Delete("/register", auth), Errc::IdPUnavailable);
}

void RelyingParty::persist(const State& s) const
{
    if (config_.cache_dir.empty()) return;
    const std::string hex = to_hex(s.artifacts->artifact_digest);
    const fs::path artifact_path = config_.cache_dir / (hex + ".xza");
    if (!fs::exists(artifact_path)) s.artifacts->save(artifact_path);
    const Json j{{"credential", base64url_encode(s.credential.to_bytes())},
                 {"access_token", s.access_token},
                 {"artifact_digest", hex}};
    write_file_atomic(config_.cache_dir / "state.json", as_bytes(j.dump()));
}

bool RelyingParty::restore()
{
    if (config_.cache_dir.empty() || !fs::exists(config_.cache_dir / "state.json")) return false;
    const Bytes raw = read_file(config_.cache_dir / "state.json");
    const Json j = Json::parse(raw.begin(), raw.end());
    State s;
    s.credential = ClientCredential::from_bytes(base64url_decode(j.at("credential").get<std::string>()));
    s.access_token = j.at("access_token").get<std::string>();
    s.artifacts = std::make_shared<const ZkArtifacts>(
        ZkArtifacts::load(config_.cache_dir / (j.at("artifact_digest").get<std::string>() + ".xza")));
    if (!s.credential.verify()) throw Error(Errc::InvalidCredential, "stored credential does not verify");
    if (!check_artifact_integrity(*s.artifacts)) {
        throw Error(Errc::IntegrityMismatch, "stored artifacts are no longer the registry's latest");
    }
    fetch_signing_key();
    std::unique_lock lock(mu_);
    state_ = std::move(s);
    return true;
}

bool RelyingParty::registered() const
{
    std::shared_lock lock(mu_);
    return state_.has_value();
}

bool RelyingParty::has_cached_proof() const
{
    std::shared_lock lock(mu_);
    return state_ && state_->cached_proof;
}

std::uint64_t RelyingParty::artifact_version() const
{
    std::shared_lock lock(mu_);
    return state_ ? state_->artifacts->version : 0;
}

std::shared_ptr<const ZkArtifacts> RelyingParty::artifacts() const
{
    std::shared_lock lock(mu_);
    return state_ ? state_->artifacts : nullptr;
}

ClientCredential RelyingParty::credential() const
{
    std::shared_lock lock(mu_);
    if (!state_) throw Error(Errc::AccessDenied, "not registered with the IdP");
    return state_->credential;
}

}  // namespace expresso::rp
