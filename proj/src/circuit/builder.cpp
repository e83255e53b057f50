#include "expresso/circuit/builder.hpp"

#include "expresso/zk/poseidon.hpp"

namespace expresso::circuit {

using zk::EdwardsPoint;
using zk::JubScalar;
using zk::Limbs;
using zk::limbs_bit;
using zk::limbs_bit_length;

CircuitBuilder::CircuitBuilder(Mode mode) : mode_(mode) { witness_.push_back(Fr::one()); }

Wire CircuitBuilder::alloc(const Fr& value)
{
    const auto index = cs_.num_variables++;
    witness_.push_back(has_values() ? value : Fr::zero());
    return {LinearCombination::variable(index), witness_.back()};
}

Wire CircuitBuilder::public_input(const Fr& value)
{
    if (private_started_) throw Error(Errc::InvalidArgument, "public input allocated after private variables");
    ++cs_.num_public;
    return alloc(value);
}

Wire CircuitBuilder::private_input(const Fr& value)
{
    private_started_ = true;
    return alloc(value);
}

Wire CircuitBuilder::mul(const Wire& a, const Wire& b)
{
    if (auto k = a.lc.as_constant()) return b * *k;
    if (auto k = b.lc.as_constant()) return a * *k;
    const Wire c = private_input(a.value * b.value);
    enforce(a, b, c);
    return c;
}

void CircuitBuilder::enforce(const Wire& a, const Wire& b, const Wire& c)
{
    cs_.constraints.push_back({a.lc, b.lc, c.lc});
}

void CircuitBuilder::enforce_equal(const Wire& a, const Wire& b) { enforce(a - b, one(), constant(Fr::zero())); }

Wire CircuitBuilder::materialize(const Wire& a)
{
    if (a.lc.as_variable()) return a;
    const Wire v = private_input(a.value);
    enforce_equal(a, v);
    return v;
}

ConstraintSystem CircuitBuilder::finish(std::string program_name, const Digest& program_digest) &&
{
    cs_.program_name = std::move(program_name);
    cs_.program_digest = program_digest;
    return std::move(cs_);
}

std::vector<Wire> to_bits(CircuitBuilder& b, const Wire& a, std::size_t n)
{
    const Limbs v = a.value.to_canonical();
    std::vector<Wire> bits;
    bits.reserve(n);
    Wire packed = b.constant(Fr::zero());
    Fr weight = Fr::one();
    for (std::size_t i = 0; i < n; ++i) {
        const Wire bit = b.private_input(Fr::from_u64(i < 256 && limbs_bit(v, i) ? 1 : 0));
        b.enforce(bit, bit, bit);
        packed = packed + bit * weight;
        weight = weight.dbl();
        bits.push_back(bit);
    }
    b.enforce_equal(packed, a);
    return bits;
}

void enforce_bits_at_most(CircuitBuilder& b, std::span<const Wire> bits, const Limbs& bound)
{
    // Scan from the top bit while tracking "prefix equal to bound". Where the bound has a 0 bit,
    // an equal prefix forbids a 1; once the prefix drops below the bound nothing else is constrained.
    if (limbs_bit_length(bound) > bits.size()) return;
    Wire eq = b.one();
    bool eq_is_one = true;
    for (std::size_t i = bits.size(); i-- > 0;) {
        if (limbs_bit(bound, i)) {
            eq = eq_is_one ? bits[i] : b.mul(eq, bits[i]);
            eq_is_one = false;
        } else {
            b.enforce(eq, bits[i], b.constant(Fr::zero()));
        }
    }
}

Wire poseidon_hash(CircuitBuilder& b, std::span<const Wire> inputs)
{
    if (inputs.empty()) throw Error(Errc::InvalidArgument, "hash needs at least one input");
    const auto& params = zk::poseidon_params(zk::kHashWidth);
    const std::size_t t = params.width;
    std::vector<Wire> state(t, b.constant(Fr::zero()));
    state[0] = b.constant(Fr::from_u64(inputs.size()));

    auto sbox = [&](const Wire& x) {
        const Wire m = b.materialize(x);
        const Wire x2 = b.mul(m, m);
        const Wire x4 = b.mul(x2, x2);
        return b.mul(x4, m);
    };

    for (std::size_t k = 0; k < inputs.size(); k += zk::kHashRate) {
        for (std::size_t i = 0; i < zk::kHashRate && k + i < inputs.size(); ++i) state[1 + i] = state[1 + i] + inputs[k + i];
        for (std::size_t r = 0; r < params.rounds(); ++r) {
            for (std::size_t i = 0; i < t; ++i) state[i] = state[i] + b.constant(params.constant(r, i));
            if (params.is_full_round(r)) {
                for (auto& s : state) s = sbox(s);
            } else {
                state[0] = sbox(state[0]);
            }
            std::vector<Wire> next(t, b.constant(Fr::zero()));
            for (std::size_t i = 0; i < t; ++i) {
                for (std::size_t j = 0; j < t; ++j) next[i] = next[i] + state[j] * params.mds_at(i, j);
            }
            state = std::move(next);
        }
    }
    return state[0];
}

void enforce_on_curve(CircuitBuilder& b, const PointWire& p)
{
    // a x^2 + y^2 = 1 + d x^2 y^2
    const Wire x2 = b.mul(p.x, p.x);
    const Wire y2 = b.mul(p.y, p.y);
    b.enforce(x2 * zk::edwards_d(), y2, x2 * zk::edwards_a() + y2 - b.one());
}

PointWire edwards_add(CircuitBuilder& b, const PointWire& p, const PointWire& q)
{
    const Fr a = zk::edwards_a();
    const Fr d = zk::edwards_d();
    const Wire beta = b.mul(p.x, q.y);
    const Wire gamma = b.mul(p.y, q.x);
    const Wire delta = b.mul(p.y - p.x * a, q.x + q.y);
    const Wire tau = b.mul(beta, gamma);

    const Fr den_x = Fr::one() + d * tau.value;
    const Fr den_y = Fr::one() - d * tau.value;
    const Wire x3 = b.private_input((beta.value + gamma.value) * den_x.inverse());
    const Wire y3 = b.private_input((delta.value + a * beta.value - gamma.value) * den_y.inverse());
    b.enforce(x3, b.one() + tau * d, beta + gamma);
    b.enforce(y3, b.one() - tau * d, delta + beta * a - gamma);
    return {x3, y3};
}

PointWire edwards_double(CircuitBuilder& b, const PointWire& p) { return edwards_add(b, p, p); }

PointWire constant_point(const CircuitBuilder& b, const EdwardsPoint& p) { return {b.constant(p.x()), b.constant(p.y())}; }

PointWire fixed_base_mul(CircuitBuilder& b, std::span<const Wire> bits, const EdwardsPoint& base)
{
    PointWire acc;
    bool first = true;
    EdwardsPoint window_base = base;
    for (std::size_t i = 0; i < bits.size(); i += 2) {
        const Wire b0 = bits[i];
        const Wire b1 = i + 1 < bits.size() ? bits[i + 1] : b.constant(Fr::zero());
        const EdwardsPoint c0 = EdwardsPoint::identity();
        const EdwardsPoint c1 = window_base;
        const EdwardsPoint c2 = window_base.dbl();
        const EdwardsPoint c3 = c2 + window_base;
        const Wire b01 = b.mul(b0, b1);
        // multilinear interpolation of the 4-entry table in (b0, b1)
        auto lookup = [&](const Fr& v0, const Fr& v1, const Fr& v2, const Fr& v3) {
            return b.constant(v0) + b0 * (v1 - v0) + b1 * (v2 - v0) + b01 * (v3 - v2 - v1 + v0);
        };
        const PointWire sel{lookup(c0.x(), c1.x(), c2.x(), c3.x()), lookup(c0.y(), c1.y(), c2.y(), c3.y())};
        acc = first ? sel : edwards_add(b, acc, sel);
        first = false;
        window_base = c2.dbl();
    }
    if (first) return constant_point(b, EdwardsPoint::identity());
    return acc;
}

PointWire variable_base_mul(CircuitBuilder& b, std::span<const Wire> bits, const PointWire& p)
{
    auto select = [&](const Wire& bit) {
        // bit ? p : identity
        return PointWire{b.mul(bit, p.x), b.one() + b.mul(bit, p.y - b.one())};
    };
    if (bits.empty()) return constant_point(b, EdwardsPoint::identity());
    PointWire acc = select(bits.back());
    for (std::size_t i = bits.size() - 1; i-- > 0;) {
        acc = edwards_double(b, acc);
        acc = edwards_add(b, acc, select(bits[i]));
    }
    return acc;
}

void enforce_in_subgroup(CircuitBuilder& b, const PointWire& p)
{
    static const JubScalar inv8 = JubScalar::from_u64(EdwardsPoint::kCofactor).inverse();
    EdwardsPoint pre;
    if (b.has_values()) pre = EdwardsPoint(p.x.value, p.y.value) * inv8;
    const PointWire q{b.private_input(pre.x()), b.private_input(pre.y())};
    enforce_on_curve(b, q);
    PointWire r = edwards_double(b, q);
    r = edwards_double(b, r);
    r = edwards_double(b, r);
    enforce_point_equal(b, r, p);
}

void enforce_point_equal(CircuitBuilder& b, const PointWire& p, const PointWire& q)
{
    b.enforce_equal(p.x, q.x);
    b.enforce_equal(p.y, q.y);
}

}  // namespace expresso::circuit
