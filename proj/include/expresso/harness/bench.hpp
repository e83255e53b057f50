#pragma once

#include <string>

#include "expresso/harness/deployment.hpp"

namespace expresso::harness {

/// Measured run. Times are wall-clock milliseconds; verification and OIDC ops are IdP-side
/// means, user authentication is measured at the user agent with the proof already cached.
struct BenchReport {
    std::size_t reps = 0;
    double proving_ms = 0;  // one-time, cold cache
    double verification_ms = 0;
    double oidc_ops_ms = 0;
    double user_auth_ms = 0;
    double user_auth_max_ms = 0;
    std::size_t proof_bytes = 0;
    std::size_t pk_bytes = 0;
    std::size_t vk_bytes = 0;
    std::size_t constraints = 0;

    Json to_json() const;
    static BenchReport from_json(const Json& j);
    friend bool operator==(const BenchReport&, const BenchReport&) = default;
};

/// Published figures of the original prototype, printed for comparison only.
struct ReferenceRow {
    static constexpr double proving_ms = 4338;
    static constexpr double verification_ms = 237.30;
    static constexpr double oidc_ops_ms = 1.8;
    static constexpr double user_auth_ms = 239.2;
    static constexpr std::size_t constraints = 94180;
    static constexpr double pk_mb = 38.4;
    static constexpr double vk_kb = 4;
    static constexpr double proof_kb = 4;
};

enum class ReportFormat { Text, Json };

/// Errors: InvalidArgument when nothing was measured.
std::string emit_report(const BenchReport& report, ReportFormat format);

/// Registers a fresh RP, times its first proof, then `reps` cached-proof logins.
BenchReport run_bench(Deployment& d, std::size_t reps, const std::string& username = "alice");

}  // namespace expresso::harness
