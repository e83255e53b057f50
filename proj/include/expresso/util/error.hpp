#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace expresso {

enum class Errc {
    MalformedEncoding,
    InvalidArgument,
    // zk-core
    UnsatisfiedConstraints,
    KeyMismatch,
    // membership-circuit
    ParseError,
    SchemaMismatch,
    InvalidCredential,
    LengthMismatch,
    // ceremony
    DegreeTooSmall,
    InvalidPriorState,
    EmptyCeremony,
    // oidf-registry
    PoolExhausted,
    UnknownIdP,
    NoAllocation,
    // idp-service
    RegistryUnavailable,
    BadCredentials,
    Throttled,
    ProofInvalid,
    StaleArtifacts,
    ConsentDenied,
    NotRegistered,
    // rp-client
    IntegrityMismatch,
    NoProof,
    BadSignature,
    Expired,
    StateMismatch,
    AccessDenied,
    IdPUnavailable,
    // harness
    StepFailure,
    RelayFailure,
    ScenarioInvalid,
};

std::string_view errc_name(Errc code);
/// Inverse of errc_name; nullopt for unknown names.
std::optional<Errc> errc_from_name(std::string_view name);

/// Exception carrying one of the protocol error codes.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail)
        : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code), detail_(detail)
    {
    }

    Errc code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    Errc code_;
    std::string detail_;
};

}  // namespace expresso
