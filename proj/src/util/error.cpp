#include "expresso/util/error.hpp"

namespace expresso {

std::string_view errc_name(Errc code)
{
    switch (code) {
    case Errc::MalformedEncoding: return "MalformedEncoding";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::UnsatisfiedConstraints: return "UnsatisfiedConstraints";
    case Errc::KeyMismatch: return "KeyMismatch";
    case Errc::ParseError: return "ParseError";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::InvalidCredential: return "InvalidCredential";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::DegreeTooSmall: return "DegreeTooSmall";
    case Errc::InvalidPriorState: return "InvalidPriorState";
    case Errc::EmptyCeremony: return "EmptyCeremony";
    case Errc::PoolExhausted: return "PoolExhausted";
    case Errc::UnknownIdP: return "UnknownIdP";
    case Errc::NoAllocation: return "NoAllocation";
    case Errc::RegistryUnavailable: return "RegistryUnavailable";
    case Errc::BadCredentials: return "BadCredentials";
    case Errc::Throttled: return "Throttled";
    case Errc::ProofInvalid: return "ProofInvalid";
    case Errc::StaleArtifacts: return "StaleArtifacts";
    case Errc::ConsentDenied: return "ConsentDenied";
    case Errc::NotRegistered: return "NotRegistered";
    case Errc::IntegrityMismatch: return "IntegrityMismatch";
    case Errc::NoProof: return "NoProof";
    case Errc::BadSignature: return "BadSignature";
    case Errc::Expired: return "Expired";
    case Errc::StateMismatch: return "StateMismatch";
    case Errc::AccessDenied: return "AccessDenied";
    case Errc::IdPUnavailable: return "IdPUnavailable";
    case Errc::StepFailure: return "StepFailure";
    case Errc::RelayFailure: return "RelayFailure";
    case Errc::ScenarioInvalid: return "ScenarioInvalid";
    }
    return "Unknown";
}

std::optional<Errc> errc_from_name(std::string_view name)
{
    for (int i = 0; i <= static_cast<int>(Errc::ScenarioInvalid); ++i) {
        if (errc_name(static_cast<Errc>(i)) == name) return static_cast<Errc>(i);
    }
    return std::nullopt;
}

}  // namespace expresso
