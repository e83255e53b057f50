#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "expresso/harness/bench.hpp"

namespace expresso::harness {

// Scenario files: one step per line, '#' starts a comment. See docs/SCENARIOS.md.
//
//   register shop
//   login alice shop scope=openid,email consent=openid,email
//   repeat 50 login alice shop
//   deregister shop
//   login alice shop expect=StaleArtifacts
//   rotate-check
//   collusion bob shop news
//   integrity-attack 5

struct RegisterStep {
    std::string rp;
};
struct LoginStep {
    std::string user;
    std::string rp;
    std::vector<std::string> scope{"openid"};
    std::vector<std::string> consent{"openid"};
    std::optional<std::string> expect_error;  // "fail" accepts any error
};
struct DeregisterStep {
    std::string rp;
};
struct RotateCheckStep {};
struct CollusionStep {
    std::string user;
    std::string rp_a, rp_b;
};
struct IntegrityAttackStep {
    std::size_t trials = 5;
};

using StepKind = std::variant<RegisterStep, LoginStep, DeregisterStep, RotateCheckStep, CollusionStep, IntegrityAttackStep>;

struct Step {
    StepKind kind;
    int line = 0;
    std::string text;
};

struct ScenarioScript {
    std::vector<Step> steps;

    /// Errors: ScenarioInvalid (syntax, or steps out of phase order) with the line number.
    static ScenarioScript parse(std::string_view text);
    /// Phase ordering: an RP must be registered before any step uses it, and only once.
    void validate() const;
};

struct StepOutcome {
    std::size_t index = 0;
    std::string text;
    std::string detail;
    double ms = 0;
};

struct ScenarioResult {
    std::vector<StepOutcome> steps;
    std::optional<BenchReport> report;  // present when at least one login succeeded
};

/// Runs every step over HTTP through the user agent. Errors: StepFailure naming the step and cause.
ScenarioResult run_scenario(Deployment& d, const ScenarioScript& script);

}  // namespace expresso::harness
