#include "expresso/oidc/protocol.hpp"

#include <sstream>

#include "expresso/net/http.hpp"
#include "expresso/zk/encoding.hpp"

namespace expresso::oidc {

namespace {

constexpr std::uint32_t kProofMagic = 0x31504d58;  // "XMP1"

std::vector<std::string_view> split_dots(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    for (;;) {
        const auto dot = s.find('.', pos);
        out.push_back(s.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos));
        if (dot == std::string_view::npos) break;
        pos = dot + 1;
    }
    return out;
}

Json decode_json_part(std::string_view part)
{
    const Bytes raw = base64url_decode(part);
    try {
        return Json::parse(raw.begin(), raw.end());
    } catch (const Json::exception&) {
        throw Error(Errc::MalformedEncoding, "token segment is not JSON");
    }
}

}  // namespace

Bytes MembershipProof::serialize() const
{
    ByteWriter w;
    w.u32(kProofMagic);
    w.u64(artifact_version);
    w.blob(proof.serialize());
    zk::write_fr_vector(w, public_inputs);
    return std::move(w).take();
}

MembershipProof MembershipProof::deserialize(ByteView bytes)
{
    if (bytes.size() > kMaxBytes) throw Error(Errc::LengthMismatch, "membership proof exceeds 4096 bytes");
    ByteReader r(bytes);
    if (r.u32() != kProofMagic) throw Error(Errc::MalformedEncoding, "not a membership proof");
    MembershipProof p;
    p.artifact_version = r.u64();
    p.proof = zk::Groth16Proof::deserialize(r.blob());
    p.public_inputs = zk::read_fr_vector(r);
    r.expect_done();
    return p;
}

std::string AuthRequest::to_fragment() const
{
    return net::form_encode({{"response_type", "id_token"},
                             {"scope", join_scope(scope)},
                             {"state", state},
                             {"redirect_uri", redirect_handle},
                             {"proof", base64url_encode(proof.serialize())}});
}

AuthRequest AuthRequest::from_fragment(std::string_view fragment)
{
    const auto p = net::form_decode(fragment);
    for (const char* k : {"response_type", "scope", "state", "redirect_uri", "proof"}) {
        if (!p.count(k)) throw Error(Errc::InvalidArgument, std::string("authorization request lacks ") + k);
    }
    if (p.at("response_type") != "id_token") throw Error(Errc::InvalidArgument, "only response_type=id_token");
    AuthRequest a;
    a.scope = split_scope(p.at("scope"));
    a.state = p.at("state");
    a.redirect_handle = p.at("redirect_uri");
    a.proof = MembershipProof::deserialize(base64url_decode(p.at("proof")));
    return a;
}

Digest proof_id(const zk::Groth16Proof& proof) { return sha256(proof.serialize()); }

Digest derive_ppid(ByteView user_id, const zk::Groth16Proof& proof, ByteView ppid_salt)
{
    const Digest pid = proof_id(proof);
    Sha256 h;
    h.update_framed(user_id);
    h.update_framed(pid);
    h.update_framed(ppid_salt);
    return h.finish();
}

std::string sign_token(const Ed25519KeyPair& key, const Json& payload, const std::string& key_id)
{
    const Json header{{"alg", "EdDSA"}, {"typ", "JWT"}, {"kid", key_id}};
    const std::string signing_input =
        base64url_encode(as_bytes(header.dump())) + "." + base64url_encode(as_bytes(payload.dump()));
    const auto sig = key.sign(as_bytes(signing_input));
    return signing_input + "." + base64url_encode(sig);
}

Json verify_token(std::string_view token, ByteView public_key)
{
    const auto parts = split_dots(token);
    if (parts.size() != 3) throw Error(Errc::MalformedEncoding, "token must have three segments");
    const Json header = decode_json_part(parts[0]);
    if (header.value("alg", "") != "EdDSA") throw Error(Errc::BadSignature, "unsupported token algorithm");
    const Bytes sig = base64url_decode(parts[2]);
    const std::string_view signing_input = token.substr(0, parts[0].size() + 1 + parts[1].size());
    if (!ed25519_verify(public_key, as_bytes(signing_input), sig)) {
        throw Error(Errc::BadSignature, "token signature does not verify");
    }
    return decode_json_part(parts[1]);
}

Json signing_key_jwk(ByteView public_key, const std::string& key_id)
{
    return Json{{"kty", "OKP"}, {"crv", "Ed25519"}, {"use", "sig"}, {"kid", key_id}, {"x", base64url_encode(public_key)}};
}

Bytes public_key_from_jwk(const Json& jwk)
{
    if (jwk.value("kty", "") != "OKP" || jwk.value("crv", "") != "Ed25519") {
        throw Error(Errc::MalformedEncoding, "expected an Ed25519 JWK");
    }
    Bytes k = base64url_decode(jwk.at("x").get<std::string>());
    if (k.size() != 32) throw Error(Errc::MalformedEncoding, "Ed25519 key must be 32 bytes");
    return k;
}

std::int64_t unix_seconds()
{
    using namespace std::chrono;
    return duration_cast<seconds>(system_clock::now().time_since_epoch()).count();
}

std::string join_scope(const std::vector<std::string>& scope)
{
    std::string out;
    for (const auto& s : scope) out += (out.empty() ? "" : " ") + s;
    return out;
}

std::vector<std::string> split_scope(std::string_view text)
{
    std::vector<std::string> out;
    std::istringstream in{std::string(text)};
    for (std::string s; in >> s;) out.push_back(s);
    return out;
}

}  // namespace expresso::oidc
