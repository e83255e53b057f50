#pragma once

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "expresso/net/http.hpp"

namespace expresso::harness {

using net::Json;

struct UserAgentConfig {
    std::string source_ip = "127.0.0.2";
    std::size_t fragment_limit = 8192;
};

struct LoginOutcome {
    std::string subject;
    Json claims;
    double user_auth_ms = 0;  // authorize through callback, with the proof already cached at the RP
    double total_ms = 0;      // including the RP's /login step
    std::size_t fragment_bytes = 0;
};

/// Stand-in for a browser: relays fragment parameters between RPs and the IdP from its own
/// address, sending no Referer or Origin. It also owns the proxy-handle -> callback mapping.
class UserAgent {
public:
    explicit UserAgent(UserAgentConfig config = {});

    void map_handle(const std::string& handle, const std::string& callback_url);
    void unmap_handle(const std::string& handle);

    struct Response {
        int status = 0;
        std::string body;
    };
    /// GET `to_url`?`fragment`. Errors: RelayFailure (over the fragment limit, or transport failure).
    Response forward(const std::string& to_url, const std::string& fragment) const;

    /// IdP leg only: authorize, log in, consent. Returns where the IdP sends the user agent next.
    struct Redirect {
        std::string handle;
        std::string fragment;
    };
    Redirect authorize(const std::string& authorize_url, const std::string& fragment, const std::string& username,
                       const std::string& password, const std::vector<std::string>& consent) const;

    /// Full implicit-flow login. Errors carry the code reported by whichever party refused.
    LoginOutcome login(const std::string& rp_url, const std::string& username, const std::string& password,
                       const std::vector<std::string>& scope, const std::vector<std::string>& consent) const;

    const UserAgentConfig& config() const { return config_; }

private:
    std::string resolve(const std::string& handle) const;

    UserAgentConfig config_;
    mutable std::mutex mu_;
    std::map<std::string, std::string> handles_;
};

}  // namespace expresso::harness
