#include "expresso/util/crypto.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <cstring>

namespace expresso {
namespace {

EVP_MD_CTX* md(void* p) { return static_cast<EVP_MD_CTX*>(p); }
EVP_CIPHER_CTX* cipher(void* p) { return static_cast<EVP_CIPHER_CTX*>(p); }

}  // namespace

Sha256::Sha256() : ctx_(EVP_MD_CTX_new())
{
    EVP_DigestInit_ex(md(ctx_), EVP_sha256(), nullptr);
}

Sha256::~Sha256() { EVP_MD_CTX_free(md(ctx_)); }

Sha256& Sha256::update(ByteView data)
{
    EVP_DigestUpdate(md(ctx_), data.data(), data.size());
    return *this;
}

Sha256& Sha256::update_framed(ByteView data)
{
    std::uint8_t len[8];
    for (int i = 0; i < 8; ++i) len[i] = static_cast<std::uint8_t>(static_cast<std::uint64_t>(data.size()) >> (8 * i));
    update(ByteView(len, 8));
    return update(data);
}

Digest Sha256::finish()
{
    Digest out{};
    unsigned int n = 0;
    EVP_DigestFinal_ex(md(ctx_), out.data(), &n);
    return out;
}

Digest sha256(ByteView data)
{
    return Sha256().update(data).finish();
}

std::array<std::uint8_t, 64> sha512(ByteView data)
{
    std::array<std::uint8_t, 64> out{};
    unsigned int n = 0;
    EVP_Digest(data.data(), data.size(), out.data(), &n, EVP_sha512(), nullptr);
    return out;
}

Bytes random_bytes(std::size_t n)
{
    Bytes out(n);
    if (n != 0 && RAND_bytes(out.data(), static_cast<int>(n)) != 1) {
        throw std::runtime_error("RAND_bytes failed");
    }
    return out;
}

Rng::Rng(ByteView seed) : ctx_(EVP_CIPHER_CTX_new())
{
    // key = SHA-256(seed); the 16-byte IV is counter||nonce, both zero.
    const Digest key = sha256(seed);
    const std::uint8_t iv[16] = {};
    EVP_EncryptInit_ex(cipher(ctx_), EVP_chacha20(), nullptr, key.data(), iv);
}

Rng::Rng(Rng&& o) noexcept : ctx_(o.ctx_) { o.ctx_ = nullptr; }

Rng& Rng::operator=(Rng&& o) noexcept
{
    std::swap(ctx_, o.ctx_);
    return *this;
}

Rng::~Rng()
{
    if (ctx_ != nullptr) EVP_CIPHER_CTX_free(cipher(ctx_));
}

void Rng::fill(std::span<std::uint8_t> out)
{
    std::memset(out.data(), 0, out.size());
    int len = 0;
    EVP_EncryptUpdate(cipher(ctx_), out.data(), &len, out.data(), static_cast<int>(out.size()));
}

std::uint64_t Rng::next_u64()
{
    std::uint8_t b[8];
    fill(b);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t Rng::uniform(std::uint64_t bound)
{
    if (bound == 0) return 0;
    const std::uint64_t limit = ~0ULL - (~0ULL % bound);
    for (;;) {
        const std::uint64_t v = next_u64();
        if (v < limit) return v % bound;
    }
}

Ed25519KeyPair Ed25519KeyPair::generate(ByteView seed32)
{
    if (seed32.size() != 32) throw Error(Errc::InvalidArgument, "ed25519 seed must be 32 bytes");
    Ed25519KeyPair kp;
    std::memcpy(kp.secret.data(), seed32.data(), 32);
    EVP_PKEY* key = EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, kp.secret.data(), 32);
    std::size_t len = 32;
    EVP_PKEY_get_raw_public_key(key, kp.public_key.data(), &len);
    EVP_PKEY_free(key);
    return kp;
}

std::array<std::uint8_t, 64> Ed25519KeyPair::sign(ByteView message) const
{
    std::array<std::uint8_t, 64> sig{};
    EVP_PKEY* key = EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, secret.data(), 32);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    std::size_t len = sig.size();
    EVP_DigestSignInit(ctx, nullptr, nullptr, nullptr, key);
    EVP_DigestSign(ctx, sig.data(), &len, message.data(), message.size());
    EVP_MD_CTX_free(ctx);
    EVP_PKEY_free(key);
    return sig;
}

bool ed25519_verify(ByteView public_key, ByteView message, ByteView signature)
{
    if (public_key.size() != 32 || signature.size() != 64) return false;
    EVP_PKEY* key = EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, public_key.data(), 32);
    if (key == nullptr) return false;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    bool ok = EVP_DigestVerifyInit(ctx, nullptr, nullptr, nullptr, key) == 1 &&
              EVP_DigestVerify(ctx, signature.data(), signature.size(), message.data(), message.size()) == 1;
    EVP_MD_CTX_free(ctx);
    EVP_PKEY_free(key);
    return ok;
}

Digest pbkdf2_sha256(std::string_view password, ByteView salt, int iterations)
{
    Digest out{};
    PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()), salt.data(), static_cast<int>(salt.size()),
                      iterations, EVP_sha256(), static_cast<int>(out.size()), out.data());
    return out;
}

bool bytes_equal_ct(ByteView a, ByteView b)
{
    return a.size() == b.size() && CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

}  // namespace expresso
