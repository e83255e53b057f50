#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "expresso/zk/bn254.hpp"

namespace expresso::zk {

/// Affine point on y^2 = x^3 + b; `infinity` marks the identity.
template <class F>
struct AffinePoint {
    F x{}, y{};
    bool infinity = true;

    friend bool operator==(const AffinePoint&, const AffinePoint&) = default;
};

/// Jacobian-coordinate point on a short Weierstrass curve with a = 0.
template <class F, class Traits>
class JacobianPoint {
public:
    using Field = F;
    using Affine = AffinePoint<F>;

    JacobianPoint() : x_(F::one()), y_(F::one()), z_(F::zero()) {}
    JacobianPoint(const F& x, const F& y, const F& z) : x_(x), y_(y), z_(z) {}
    JacobianPoint(const Affine& a)  // NOLINT(google-explicit-constructor)
        : x_(a.infinity ? F::one() : a.x), y_(a.infinity ? F::one() : a.y), z_(a.infinity ? F::zero() : F::one())
    {
    }

    static JacobianPoint identity() { return {}; }
    static JacobianPoint generator() { return Affine{Traits::generator_x(), Traits::generator_y(), false}; }
    static F coeff_b() { return Traits::coeff_b(); }

    bool is_identity() const { return z_.is_zero(); }
    const F& x() const { return x_; }
    const F& y() const { return y_; }
    const F& z() const { return z_; }

    Affine to_affine() const
    {
        if (is_identity()) return Affine{};
        const F zinv = z_.inverse();
        const F zinv2 = zinv.square();
        return Affine{x_ * zinv2, y_ * zinv2 * zinv, false};
    }

    static bool is_on_curve(const Affine& p)
    {
        if (p.infinity) return true;
        return p.y.square() == p.x.square() * p.x + coeff_b();
    }
    bool is_on_curve() const { return is_on_curve(to_affine()); }

    friend bool operator==(const JacobianPoint& a, const JacobianPoint& b)
    {
        if (a.is_identity() || b.is_identity()) return a.is_identity() == b.is_identity();
        const F z1z1 = a.z_.square();
        const F z2z2 = b.z_.square();
        if (!(a.x_ * z2z2 == b.x_ * z1z1)) return false;
        return a.y_ * z2z2 * b.z_ == b.y_ * z1z1 * a.z_;
    }

    JacobianPoint operator-() const { return {x_, -y_, z_}; }

    JacobianPoint dbl() const
    {
        if (is_identity()) return *this;
        // dbl-2009-l
        const F a = x_.square();
        const F b = y_.square();
        const F c = b.square();
        F d = (x_ + b).square() - a - c;
        d = d + d;
        const F e = a + a + a;
        const F f = e.square();
        const F x3 = f - d - d;
        F c8 = c + c;
        c8 = c8 + c8;
        c8 = c8 + c8;
        const F y3 = e * (d - x3) - c8;
        const F yz = y_ * z_;
        return {x3, y3, yz + yz};
    }

    friend JacobianPoint operator+(const JacobianPoint& p, const JacobianPoint& q)
    {
        if (p.is_identity()) return q;
        if (q.is_identity()) return p;
        // add-2007-bl
        const F z1z1 = p.z_.square();
        const F z2z2 = q.z_.square();
        const F u1 = p.x_ * z2z2;
        const F u2 = q.x_ * z1z1;
        const F s1 = p.y_ * q.z_ * z2z2;
        const F s2 = q.y_ * p.z_ * z1z1;
        if (u1 == u2) {
            if (s1 == s2) return p.dbl();
            return identity();
        }
        const F h = u2 - u1;
        const F i = (h + h).square();
        const F j = h * i;
        F r = s2 - s1;
        r = r + r;
        const F v = u1 * i;
        const F x3 = r.square() - j - v - v;
        F s1j = s1 * j;
        s1j = s1j + s1j;
        const F y3 = r * (v - x3) - s1j;
        const F z3 = ((p.z_ + q.z_).square() - z1z1 - z2z2) * h;
        return {x3, y3, z3};
    }

    /// Mixed addition with an affine point.
    JacobianPoint add_mixed(const Affine& q) const
    {
        if (q.infinity) return *this;
        if (is_identity()) return JacobianPoint(q);
        // madd-2007-bl
        const F z1z1 = z_.square();
        const F u2 = q.x * z1z1;
        const F s2 = q.y * z_ * z1z1;
        if (u2 == x_) {
            if (s2 == y_) return dbl();
            return identity();
        }
        const F h = u2 - x_;
        const F hh = h.square();
        F i = hh + hh;
        i = i + i;
        const F j = h * i;
        F r = s2 - y_;
        r = r + r;
        const F v = x_ * i;
        const F x3 = r.square() - j - v - v;
        F yj = y_ * j;
        yj = yj + yj;
        const F y3 = r * (v - x3) - yj;
        const F z3 = (z_ + h).square() - z1z1 - hh;
        return {x3, y3, z3};
    }

    JacobianPoint& operator+=(const JacobianPoint& o) { return *this = *this + o; }
    JacobianPoint& operator-=(const JacobianPoint& o) { return *this = *this + (-o); }
    friend JacobianPoint operator-(const JacobianPoint& p, const JacobianPoint& q) { return p + (-q); }

    /// Variable-base scalar multiplication (width-5 NAF).
    JacobianPoint mul(const Limbs& k) const
    {
        const std::size_t bits = limbs_bit_length(k);
        if (bits == 0 || is_identity()) return identity();
        if (bits <= 4) {
            JacobianPoint acc;
            for (std::size_t i = bits; i-- > 0;) {
                acc = acc.dbl();
                if (limbs_bit(k, i)) acc += *this;
            }
            return acc;
        }
        return mul_naf(wnaf(k, 5));
    }

    /// Scalar multiplication with a width-5 NAF computed by wnaf(k, 5); lets callers reuse the
    /// recoding when one scalar multiplies many points.
    JacobianPoint mul_naf(const std::vector<int>& naf) const
    {
        if (is_identity()) return identity();
        JacobianPoint table[8];
        table[0] = *this;
        const JacobianPoint twice = dbl();
        for (int i = 1; i < 8; ++i) table[i] = table[i - 1] + twice;
        JacobianPoint acc;
        for (std::size_t i = naf.size(); i-- > 0;) {
            acc = acc.dbl();
            const int d = naf[i];
            if (d > 0) acc += table[(d - 1) / 2];
            if (d < 0) acc -= table[(-d - 1) / 2];
        }
        return acc;
    }

    template <class Scalar>
    JacobianPoint operator*(const Scalar& s) const
    {
        return mul(s.to_canonical());
    }

    /// Normalizes many points to affine with a single inversion.
    static std::vector<Affine> batch_to_affine(std::span<const JacobianPoint> points)
    {
        std::vector<F> zs(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) zs[i] = points[i].z_;
        batch_inverse<F>(zs);
        std::vector<Affine> out(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (points[i].is_identity()) continue;
            const F zinv2 = zs[i].square();
            out[i] = Affine{points[i].x_ * zinv2, points[i].y_ * zinv2 * zs[i], false};
        }
        return out;
    }

    static std::vector<int> wnaf(const Limbs& scalar, int width)
    {
        std::vector<int> out;
        Limbs k = scalar;
        const std::uint64_t mask = (1ULL << width) - 1;
        const std::int64_t half = 1LL << (width - 1);
        while (!limbs_is_zero(k)) {
            int digit = 0;
            if (k[0] & 1) {
                std::int64_t d = static_cast<std::int64_t>(k[0] & mask);
                if (d >= half) d -= (1LL << width);
                digit = static_cast<int>(d);
                if (d > 0) {
                    limbs_sub(k, Limbs{static_cast<std::uint64_t>(d), 0, 0, 0});
                } else {
                    limbs_add(k, Limbs{static_cast<std::uint64_t>(-d), 0, 0, 0});
                }
            }
            out.push_back(digit);
            limbs_shr1(k);
        }
        return out;
    }

private:
    F x_, y_, z_;
};

struct G1Traits {
    static Fq coeff_b() { return Fq::from_u64(3); }
    static Fq generator_x() { return Fq::one(); }
    static Fq generator_y() { return Fq::from_u64(2); }
};

struct G2Traits {
    static Fq2 coeff_b();
    static Fq2 generator_x();
    static Fq2 generator_y();
};

using G1 = JacobianPoint<Fq, G1Traits>;
using G2 = JacobianPoint<Fq2, G2Traits>;
using G1Affine = AffinePoint<Fq>;
using G2Affine = AffinePoint<Fq2>;

/// True when the point lies in the order-r subgroup (always true on G1, whose cofactor is one).
bool in_prime_subgroup(const G2& p);

}  // namespace expresso::zk
