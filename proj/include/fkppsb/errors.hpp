#pragma once

#include <stdexcept>
#include <string>

namespace fkppsb {

// Machine-readable reason attached to every simulation error.  Callers that
// want to branch on the failure mode catch SimError and switch on code();
// everything else can treat it as a std::runtime_error.
enum class ErrorCode {
    NonFiniteRate,      // a model rate is NaN or infinite
    NegativeRate,       // a model rate is < 0
    UnstableTimeStep,   // dt violates the explicit-scheme stability bound
    TableOutOfRange,    // tabulated initial data outside [0,1]
    EmptyInitial,       // no particles / empty initial configuration
    BoundaryContact,    // a tracked front reached the edge of the domain
    NoCrossing,         // no level crossing exists in the profile
    RequiresDeterministic, // operation only defined for zero noise
    Extinct,            // dual population died out before the horizon
    ExplosionGuard,     // dual population exceeded the configured cap
    InsufficientSamples,// estimator asked for too few replicates
    NonPositiveArgument,// argument must be strictly positive
    MissingRequired,    // config key required but absent
    UnknownKey,         // config key or section not in the schema
    TypeMismatch,       // config value failed to parse as its declared type
    IoFailure,          // file could not be opened or written
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::NonFiniteRate: return "NonFiniteRate";
        case ErrorCode::NegativeRate: return "NegativeRate";
        case ErrorCode::UnstableTimeStep: return "UnstableTimeStep";
        case ErrorCode::TableOutOfRange: return "TableOutOfRange";
        case ErrorCode::EmptyInitial: return "EmptyInitial";
        case ErrorCode::BoundaryContact: return "BoundaryContact";
        case ErrorCode::NoCrossing: return "NoCrossing";
        case ErrorCode::RequiresDeterministic: return "RequiresDeterministic";
        case ErrorCode::Extinct: return "Extinct";
        case ErrorCode::ExplosionGuard: return "ExplosionGuard";
        case ErrorCode::InsufficientSamples: return "InsufficientSamples";
        case ErrorCode::NonPositiveArgument: return "NonPositiveArgument";
        case ErrorCode::MissingRequired: return "MissingRequired";
        case ErrorCode::UnknownKey: return "UnknownKey";
        case ErrorCode::TypeMismatch: return "TypeMismatch";
        case ErrorCode::IoFailure: return "IoFailure";
    }
    return "Unknown";
}

class SimError : public std::runtime_error {
public:
    SimError(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace fkppsb
