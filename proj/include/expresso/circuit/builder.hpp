#pragma once

#include <span>
#include <vector>

#include "expresso/circuit/r1cs.hpp"
#include "expresso/zk/babyjubjub.hpp"

namespace expresso::circuit {

/// A linear combination together with its value under the witness being built.
/// In compile mode every value is zero and only the combination matters.
struct Wire {
    LinearCombination lc;
    Fr value;

    friend Wire operator+(const Wire& a, const Wire& b) { return {a.lc + b.lc, a.value + b.value}; }
    friend Wire operator-(const Wire& a, const Wire& b) { return {a.lc - b.lc, a.value - b.value}; }
    friend Wire operator*(const Wire& a, const Fr& k) { return {a.lc * k, a.value * k}; }
};

struct PointWire {
    Wire x, y;
};

/// Records constraints and (optionally) witness values. The constraint sequence depends only on
/// the calls made, never on the values, so compile and witness runs produce identical systems.
class CircuitBuilder {
public:
    enum class Mode { Compile, Witness };

    explicit CircuitBuilder(Mode mode);

    Mode mode() const { return mode_; }
    bool has_values() const { return mode_ == Mode::Witness; }

    Wire one() const { return constant(Fr::one()); }
    Wire constant(const Fr& v) const { return {LinearCombination::constant(v), v}; }

    /// Public inputs must all be allocated before the first private variable.
    Wire public_input(const Fr& value);
    Wire private_input(const Fr& value);

    /// c = a * b as a fresh variable (one constraint).
    Wire mul(const Wire& a, const Wire& b);
    void enforce(const Wire& a, const Wire& b, const Wire& c);
    void enforce_equal(const Wire& a, const Wire& b);
    /// Returns a wire that is a single variable with coefficient one, adding a constraint if needed.
    Wire materialize(const Wire& a);

    std::size_t constraint_count() const { return cs_.constraints.size(); }

    ConstraintSystem finish(std::string program_name, const Digest& program_digest) &&;
    const WitnessVector& witness() const { return witness_; }

private:
    Wire alloc(const Fr& value);

    Mode mode_;
    bool private_started_ = false;
    ConstraintSystem cs_;
    WitnessVector witness_;
};

// ---- gadgets ----

/// Little-endian bit decomposition of `a` into exactly n booleans (n + 1 constraints).
std::vector<Wire> to_bits(CircuitBuilder& b, const Wire& a, std::size_t n);

/// Enforces that the integer encoded by `bits` (little-endian) is at most `bound`; one constraint per bit.
void enforce_bits_at_most(CircuitBuilder& b, std::span<const Wire> bits, const zk::Limbs& bound);

/// Width-6 Poseidon sponge matching zk::circuit_hash.
Wire poseidon_hash(CircuitBuilder& b, std::span<const Wire> inputs);

void enforce_on_curve(CircuitBuilder& b, const PointWire& p);
PointWire edwards_add(CircuitBuilder& b, const PointWire& p, const PointWire& q);
PointWire edwards_double(CircuitBuilder& b, const PointWire& p);
PointWire constant_point(const CircuitBuilder& b, const zk::EdwardsPoint& p);
/// bits (little-endian) * base for a constant base, using 2-bit windows.
PointWire fixed_base_mul(CircuitBuilder& b, std::span<const Wire> bits, const zk::EdwardsPoint& base);
/// bits (little-endian) * p for a variable point, double-and-add.
PointWire variable_base_mul(CircuitBuilder& b, std::span<const Wire> bits, const PointWire& p);
/// Proves p = 8 * p' for a witnessed p', i.e. p lies in the prime-order subgroup.
void enforce_in_subgroup(CircuitBuilder& b, const PointWire& p);
void enforce_point_equal(CircuitBuilder& b, const PointWire& p, const PointWire& q);

}  // namespace expresso::circuit
