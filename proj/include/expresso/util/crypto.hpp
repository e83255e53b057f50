#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "expresso/util/bytes.hpp"

namespace expresso {

/// Incremental SHA-256 backed by OpenSSL.
class Sha256 {
public:
    Sha256();
    ~Sha256();
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    Sha256& update(ByteView data);
    Sha256& update(std::string_view s) { return update(as_bytes(s)); }
    /// Length-prefixed field, so adjacent fields cannot be re-split.
    Sha256& update_framed(ByteView data);
    Digest finish();

private:
    void* ctx_;
};

Digest sha256(ByteView data);
std::array<std::uint8_t, 64> sha512(ByteView data);

/// Operating-system entropy.
Bytes random_bytes(std::size_t n);

/// Deterministic byte stream keyed by a seed (ChaCha20 keystream).
class Rng {
public:
    explicit Rng(ByteView seed);
    explicit Rng(std::string_view seed) : Rng(as_bytes(seed)) {}
    static Rng from_entropy() { return Rng(random_bytes(32)); }

    Rng(Rng&&) noexcept;
    Rng& operator=(Rng&&) noexcept;
    Rng(const Rng&) = delete;
    Rng& operator=(const Rng&) = delete;
    ~Rng();

    void fill(std::span<std::uint8_t> out);
    Bytes bytes(std::size_t n)
    {
        Bytes b(n);
        fill(b);
        return b;
    }
    std::uint64_t next_u64();
    /// Uniform in [0, bound).
    std::uint64_t uniform(std::uint64_t bound);

private:
    void* ctx_;
};

/// Ed25519 key pair used for identity-token signatures.
struct Ed25519KeyPair {
    std::array<std::uint8_t, 32> secret{};
    std::array<std::uint8_t, 32> public_key{};

    static Ed25519KeyPair generate(ByteView seed32);
    std::array<std::uint8_t, 64> sign(ByteView message) const;
};

bool ed25519_verify(ByteView public_key, ByteView message, ByteView signature);

/// PBKDF2-HMAC-SHA256.
Digest pbkdf2_sha256(std::string_view password, ByteView salt, int iterations);

/// Constant-time comparison.
bool bytes_equal_ct(ByteView a, ByteView b);

}  // namespace expresso
