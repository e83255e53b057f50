#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "expresso/util/bytes.hpp"
#include "expresso/zk/bn254.hpp"

namespace expresso::circuit {

using zk::Fr;

/// Sparse linear combination over witness variables; terms sorted by index, no zero coefficients.
class LinearCombination {
public:
    struct Term {
        std::uint32_t index;
        Fr coeff;
        friend bool operator==(const Term&, const Term&) = default;
    };

    LinearCombination() = default;
    static LinearCombination variable(std::uint32_t index, const Fr& coeff = Fr::one());
    static LinearCombination constant(const Fr& value);

    const std::vector<Term>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    /// Index of the variable if this is exactly 1 * var.
    std::optional<std::uint32_t> as_variable() const;
    /// Value if the combination only references the constant-one variable.
    std::optional<Fr> as_constant() const;

    LinearCombination& operator+=(const LinearCombination& o);
    LinearCombination& operator-=(const LinearCombination& o);
    LinearCombination& operator*=(const Fr& k);
    friend LinearCombination operator+(LinearCombination a, const LinearCombination& b) { return a += b; }
    friend LinearCombination operator-(LinearCombination a, const LinearCombination& b) { return a -= b; }
    friend LinearCombination operator*(LinearCombination a, const Fr& k) { return a *= k; }
    friend bool operator==(const LinearCombination&, const LinearCombination&) = default;

    Fr evaluate(std::span<const Fr> witness) const;

private:
    std::vector<Term> terms_;
};

/// <A, w> * <B, w> = <C, w>
struct Constraint {
    LinearCombination a, b, c;
    friend bool operator==(const Constraint&, const Constraint&) = default;
};

/// Witness layout: [1, public inputs..., private variables...].
using WitnessVector = std::vector<Fr>;

struct ConstraintSystem {
    std::string program_name;
    Digest program_digest{};
    std::uint32_t num_public = 0;     // excluding the constant-one variable
    std::uint32_t num_variables = 1;  // including the constant-one variable
    std::vector<Constraint> constraints;

    std::size_t constraint_count() const { return constraints.size(); }
    std::size_t public_input_count() const { return num_public; }
    std::size_t variable_count() const { return num_variables; }
    /// Number of non-zero matrix entries across A, B and C.
    std::size_t nonzero_count() const;

    /// Export format (docs/FORMATS.md): header, then every constraint's three combinations.
    Bytes serialize() const;
    static ConstraintSystem deserialize(ByteView bytes);
    /// SHA-256 of serialize().
    Digest digest() const;

    friend bool operator==(const ConstraintSystem&, const ConstraintSystem&) = default;
};

/// Index of the first violated constraint, if any. Throws LengthMismatch on a wrong-length witness.
std::optional<std::size_t> first_unsatisfied(const ConstraintSystem& cs, std::span<const Fr> witness);

/// True iff the leading entry is one and every constraint holds.
bool evaluate(const ConstraintSystem& cs, std::span<const Fr> witness);

}  // namespace expresso::circuit
