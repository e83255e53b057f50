#pragma once

#include <map>
#include <memory>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "expresso/util/bytes.hpp"
#include "expresso/util/error.hpp"

namespace expresso::net {

using Json = nlohmann::json;

/// httplib server on a background thread, bound to one address.
class HttpServer {
public:
    HttpServer() = default;
    ~HttpServer() { stop(); }
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    httplib::Server& routes() { return server_; }
    /// Port 0 picks a free port. Returns the bound port.
    int start(const std::string& host, int port = 0);
    void stop();
    bool running() const { return thread_.joinable(); }
    std::string base_url() const { return "http://" + host_ + ":" + std::to_string(port_); }
    const std::string& host() const { return host_; }
    int port() const { return port_; }

private:
    httplib::Server server_;
    std::thread thread_;
    std::string host_;
    int port_ = 0;
};

int status_for(Errc code);
void send_json(httplib::Response& res, const Json& body, int status = 200);
void send_error(httplib::Response& res, const Error& e);
void send_bytes(httplib::Response& res, ByteView bytes, const std::string& content_type = "application/octet-stream");

/// Runs `f`, mapping Error and malformed-JSON exceptions onto error responses.
template <class F>
void guarded(httplib::Response& res, F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        send_error(res, e);
    } catch (const Json::exception& e) {
        send_error(res, Error(Errc::InvalidArgument, std::string("bad request body: ") + e.what()));
    }
}

/// Client for "http://host:port". A non-empty `source_ip` binds outgoing connections to that
/// local address (used to give simulated parties distinct loopback addresses).
std::unique_ptr<httplib::Client> make_client(const std::string& base_url, const std::string& source_ip = "");

/// Decodes a response, rethrowing server-side errors with their original code and transport
/// failures as `unreachable`.
Json expect_json(const httplib::Result& r, Errc unreachable);
Json expect_json(int status, const std::string& body, Errc unreachable);
Bytes expect_bytes(const httplib::Result& r, Errc unreachable);

Digest parse_digest(std::string_view hex);

/// "http://host:port/path" -> {"http://host:port", "/path"}. Errors: InvalidArgument.
std::pair<std::string, std::string> split_url(std::string_view url);
/// Host part of a base URL.
std::string url_host(std::string_view url);

using Params = std::vector<std::pair<std::string, std::string>>;
/// application/x-www-form-urlencoded, also used for fragment parameters.
std::string form_encode(const Params& params);
/// Duplicate keys keep the first value. Errors: MalformedEncoding.
std::map<std::string, std::string> form_decode(std::string_view text);

}  // namespace expresso::net
