#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "expresso/circuit/credential.hpp"
#include "expresso/circuit/r1cs.hpp"

namespace expresso::circuit {

enum class Visibility { Public, Private };
enum class ValueType { Point, Scalar, Field };

struct ParameterDecl {
    std::string name;
    Visibility visibility;
    ValueType type;
    friend bool operator==(const ParameterDecl&, const ParameterDecl&) = default;
};

std::string_view to_string(Visibility v);
std::string_view to_string(ValueType t);

/// Source text of a statement in the restricted circuit language together with the parameter
/// schema it must declare. See docs/PROGRAM_LANGUAGE.md.
struct BoilerplateProgram {
    std::string source_text;
    std::vector<ParameterDecl> parameter_schema;

    Digest program_digest() const;

    /// The standard membership program (programs/membership.zkp, compiled in).
    static const BoilerplateProgram& membership();
    static std::vector<ParameterDecl> membership_schema();
};

/// Inputs by parameter name; points as curve points, scalars and field elements as Fr.
using InputValue = std::variant<zk::EdwardsPoint, Fr>;
using InputAssignment = std::map<std::string, InputValue>;

/// Deterministic compilation. Errors: ParseError (with line and column), SchemaMismatch.
ConstraintSystem compile(const BoilerplateProgram& program);

/// Runs the program with concrete inputs and returns the full witness. The constraint system
/// must be the one compiled from `program` (SchemaMismatch otherwise). The witness is not
/// checked against the constraints here; see evaluate().
WitnessVector synthesize_witness(const BoilerplateProgram& program, const ConstraintSystem& cs,
                                 const InputAssignment& inputs);

/// Witness for the membership program. Throws InvalidCredential when the signature does not
/// verify natively, before any circuit work.
WitnessVector build_witness(const ConstraintSystem& cs, const zk::EdwardsPoint& pk, const ClientCredential& credential);

/// Field encoding of the public inputs of the membership program: (pk.x, pk.y).
std::vector<Fr> membership_public_inputs(const zk::EdwardsPoint& pk);

}  // namespace expresso::circuit
