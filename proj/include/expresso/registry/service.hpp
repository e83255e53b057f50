#pragma once

#include <string>
#include <vector>

#include "expresso/net/http.hpp"
#include "expresso/registry/registry.hpp"

namespace expresso::registry {

/// HTTP front for a Registry. Routes are listed in docs/API.md.
class RegistryServer {
public:
    explicit RegistryServer(Registry& registry);
    int start(const std::string& host, int port = 0) { return http_.start(host, port); }
    void stop() { http_.stop(); }
    std::string base_url() const { return http_.base_url(); }

private:
    Registry& registry_;
    net::HttpServer http_;
};

/// Remote access used by IdPs and RPs. Transport failures surface as RegistryUnavailable.
class RegistryClient {
public:
    explicit RegistryClient(std::string base_url, std::string source_ip = "");

    circuit::BoilerplateProgram boilerplate() const;
    DigestRecord latest_digest(const std::string& idp_id) const;
    std::vector<DigestRecord> digest_history(const std::string& idp_id) const;
    /// Allocates and downloads; the container must hash to the advertised digest.
    ZkArtifacts request_artifacts(const std::string& idp_id) const;
    Bytes transcript(const Digest& transcript_digest) const;
    Bytes phase1() const;

    const std::string& base_url() const { return base_url_; }

private:
    std::string base_url_;
    std::string source_ip_;
};

net::Json to_json(const DigestRecord& r);
DigestRecord digest_record_from_json(const net::Json& j);

}  // namespace expresso::registry
