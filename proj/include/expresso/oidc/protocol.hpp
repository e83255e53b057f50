#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "expresso/circuit/credential.hpp"
#include "expresso/util/crypto.hpp"
#include "expresso/zk/groth16.hpp"

// Wire types shared by the identity provider, relying parties and the user-agent simulator.
namespace expresso::oidc {

using Json = nlohmann::json;
using zk::Fr;

/// What an RP hands the IdP to show it is a registered member.
struct MembershipProof {
    zk::Groth16Proof proof;
    std::vector<Fr> public_inputs;  // encoding of the IdP credential key
    std::uint64_t artifact_version = 0;

    static constexpr std::size_t kMaxBytes = 4096;
    Bytes serialize() const;
    /// Errors: MalformedEncoding, LengthMismatch (payload over kMaxBytes).
    static MembershipProof deserialize(ByteView bytes);
    friend bool operator==(const MembershipProof&, const MembershipProof&) = default;
};

/// Authentication request as carried in user-agent fragment parameters. There is no client_id
/// and the redirect is a proxy handle, not the RP's address.
struct AuthRequest {
    MembershipProof proof;
    std::vector<std::string> scope;
    std::string state;
    std::string redirect_handle;

    std::string to_fragment() const;
    /// Errors: MalformedEncoding, InvalidArgument (missing fields).
    static AuthRequest from_fragment(std::string_view fragment);
};

/// proof_id = H(proof bytes); PPID = H(user_id | proof_id | salt) with length-prefixed fields.
Digest proof_id(const zk::Groth16Proof& proof);
Digest derive_ppid(ByteView user_id, const zk::Groth16Proof& proof, ByteView ppid_salt);

/// Compact signed token: base64url(header).base64url(payload).base64url(Ed25519 signature).
std::string sign_token(const Ed25519KeyPair& key, const Json& payload, const std::string& key_id);
/// Checks the signature only. Errors: MalformedEncoding, BadSignature.
Json verify_token(std::string_view token, ByteView public_key);

/// Public half of the token-signing key as a JWK.
Json signing_key_jwk(ByteView public_key, const std::string& key_id);
Bytes public_key_from_jwk(const Json& jwk);

std::int64_t unix_seconds();
std::string join_scope(const std::vector<std::string>& scope);
std::vector<std::string> split_scope(std::string_view text);

}  // namespace expresso::oidc
