#pragma once

#include <optional>
#include <string>
#include <vector>

#include "expresso/harness/deployment.hpp"

namespace expresso::harness {

struct TrialReport {
    std::string name;
    std::size_t trials = 0;
    std::size_t passed = 0;  // trials in which the property held
    std::vector<std::string> failures;

    bool ok() const { return trials > 0 && passed == trials && failures.empty(); }
    std::string summary() const;
};

/// A malicious IdP front end: relays to the honest IdP but hands registering RPs a substituted
/// artifact container.
class ArtifactSwapProxy {
public:
    explicit ArtifactSwapProxy(std::string upstream_url);
    /// nullopt relays artifacts unchanged.
    void set_substitute(std::optional<ceremony::ZkArtifacts> artifacts);
    int start(const std::string& host) { return http_.start(host); }
    void stop() { http_.stop(); }
    std::string base_url() const { return http_.base_url(); }

private:
    std::string upstream_;
    std::mutex mu_;
    std::optional<Bytes> substitute_;
    std::optional<std::string> substitute_digest_;
    net::HttpServer http_;
};

/// The IdP substitutes artifacts (trapdoor-known keys, a modified key, another IdP's keys, a
/// relabelled version, a superseded version); every registration must fail the integrity check.
TrialReport integrity_attack(Deployment& d, std::size_t trials);

/// `users` users log in `repeats` times at two RPs: subjects must be stable per RP and differ
/// across RPs and users.
TrialReport collusion_check(Deployment& d, std::size_t users, std::size_t repeats);

/// Per trial: register an RP, de-register it, then try its cached proof, a fresh proof from its
/// old keys, and the same relabelled as current; all must be refused, and a remaining RP must
/// log in after refreshing.
TrialReport revocation_attack(Deployment& d, std::size_t trials);

}  // namespace expresso::harness
