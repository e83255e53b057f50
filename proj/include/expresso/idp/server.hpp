#pragma once

#include <deque>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "expresso/idp/idp.hpp"
#include "expresso/net/http.hpp"

namespace expresso::idp {

/// One line of the IdP's access log: everything the IdP learns about who contacted it.
struct RequestLogEntry {
    std::string remote_addr;
    std::string method;
    std::string target;  // path plus query string
    std::multimap<std::string, std::string> headers;
};

/// Aggregate authorize timings, for the benchmark report.
struct TimingTotals {
    std::size_t count = 0;
    double verify_ms = 0;
    double oidc_ops_ms = 0;
};

/// HTTP front for an IdentityProvider. Routes are listed in docs/API.md.
class IdpServer {
public:
    explicit IdpServer(IdentityProvider& idp);
    int start(const std::string& host, int port = 0) { return http_.start(host, port); }
    void stop() { http_.stop(); }
    std::string base_url() const { return http_.base_url(); }

    std::vector<RequestLogEntry> request_log() const;
    void clear_request_log();
    TimingTotals timings() const;
    void reset_timings();

private:
    struct PendingAuth {
        oidc::AuthRequest request;
        std::int64_t expires_at;
    };

    IdentityProvider& idp_;
    net::HttpServer http_;
    mutable std::mutex mu_;
    std::vector<RequestLogEntry> log_;
    std::map<std::string, PendingAuth> pending_;
    TimingTotals totals_;
};

}  // namespace expresso::idp
