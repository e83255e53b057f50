#pragma once

#include <array>
#include <optional>

#include "expresso/util/bytes.hpp"
#include "expresso/zk/bn254.hpp"

namespace expresso::zk {

/// Order of the prime subgroup of Baby Jubjub.
struct JubScalarParams {
    static constexpr Limbs kModulus =
        limbs_from_hex("060c89ce5c263405370a08b6d0302b0bab3eedb83920ee0a677297dc392126f1");
};
using JubScalar = PrimeField<JubScalarParams>;

/// Twisted Edwards curve a*x^2 + y^2 = 1 + d*x^2*y^2 over Fr with a = 168700, d = 168696.
/// Points are kept affine; arithmetic runs in extended coordinates internally.
class EdwardsPoint {
public:
    static constexpr std::uint64_t kA = 168700;
    static constexpr std::uint64_t kD = 168696;
    static constexpr std::uint64_t kCofactor = 8;
    static constexpr std::size_t kEncodedBytes = 33;

    EdwardsPoint() : x_(Fr::zero()), y_(Fr::one()) {}
    /// Unchecked construction; use is_on_curve() / in_subgroup() before trusting external input.
    EdwardsPoint(const Fr& x, const Fr& y) : x_(x), y_(y) {}

    static EdwardsPoint identity() { return {}; }
    /// Generator of the prime-order subgroup (circomlib's Base8).
    static const EdwardsPoint& generator();

    const Fr& x() const { return x_; }
    const Fr& y() const { return y_; }
    bool is_identity() const { return x_.is_zero() && y_.is_one(); }

    bool is_on_curve() const;
    bool in_subgroup() const;

    friend bool operator==(const EdwardsPoint&, const EdwardsPoint&) = default;
    friend EdwardsPoint operator+(const EdwardsPoint& p, const EdwardsPoint& q);
    EdwardsPoint operator-() const { return {-x_, y_}; }
    EdwardsPoint dbl() const { return *this + *this; }

    EdwardsPoint mul(const Limbs& k) const;
    EdwardsPoint operator*(const JubScalar& s) const { return mul(s.to_canonical()); }
    EdwardsPoint operator*(const Fr& s) const { return mul(s.to_canonical()); }

    /// [flag][y LE]: flag bit 0 set when x is the lexicographically larger root.
    std::array<std::uint8_t, kEncodedBytes> to_bytes() const;
    /// Returns nullopt for malformed or off-curve encodings (subgroup membership is not checked here).
    static std::optional<EdwardsPoint> from_bytes(ByteView bytes);

private:
    Fr x_, y_;
};

Fr edwards_a();
Fr edwards_d();

}  // namespace expresso::zk
