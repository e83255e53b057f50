#include "expresso/net/http.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>

#include <chrono>

namespace expresso::net {

int HttpServer::start(const std::string& host, int port)
{
    if (running()) throw Error(Errc::InvalidArgument, "server already running");
    host_ = host;
    if (port == 0) {
        port_ = server_.bind_to_any_port(host);
    } else {
        port_ = server_.bind_to_port(host, port) ? port : -1;
    }
    if (port_ <= 0) throw Error(Errc::InvalidArgument, "cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
}

void HttpServer::stop()
{
    if (!thread_.joinable()) return;
    server_.stop();
    thread_.join();
}

int status_for(Errc code)
{
    switch (code) {
    case Errc::MalformedEncoding:
    case Errc::InvalidArgument:
    case Errc::ParseError:
    case Errc::SchemaMismatch:
    case Errc::LengthMismatch:
    case Errc::KeyMismatch:
    case Errc::InvalidCredential:
    case Errc::ProofInvalid:
    case Errc::StateMismatch:
        return 400;
    case Errc::BadCredentials:
    case Errc::BadSignature:
    case Errc::Expired:
        return 401;
    case Errc::AccessDenied:
    case Errc::NotRegistered:
    case Errc::ConsentDenied:
        return 403;
    case Errc::UnknownIdP:
    case Errc::NoAllocation:
        return 404;
    case Errc::StaleArtifacts:
        return 409;
    case Errc::Throttled:
        return 429;
    case Errc::PoolExhausted:
    case Errc::RegistryUnavailable:
    case Errc::IdPUnavailable:
        return 503;
    default:
        return 500;
    }
}

void send_json(httplib::Response& res, const Json& body, int status)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e)
{
    send_json(res, Json{{"error", std::string(errc_name(e.code()))}, {"detail", e.detail()}}, status_for(e.code()));
}

void send_bytes(httplib::Response& res, ByteView bytes, const std::string& content_type)
{
    res.status = 200;
    res.set_content(std::string(bytes.begin(), bytes.end()), content_type);
}

std::unique_ptr<httplib::Client> make_client(const std::string& base_url, const std::string& source_ip)
{
    auto cli = std::make_unique<httplib::Client>(base_url);
    cli->set_connection_timeout(std::chrono::seconds(5));
    cli->set_read_timeout(std::chrono::seconds(300));
    cli->set_keep_alive(false);
    if (!source_ip.empty()) {
        cli->set_socket_options([source_ip](socket_t sock) {
            int one = 1;
            setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
            sockaddr_in addr{};
            addr.sin_family = AF_INET;
            addr.sin_port = 0;
            inet_pton(AF_INET, source_ip.c_str(), &addr.sin_addr);
            bind(sock, reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
        });
    }
    return cli;
}

namespace {

void raise_for_status(int status, const std::string& body, Errc unreachable)
{
    if (status >= 200 && status < 300) return;
    Errc code = unreachable;
    std::string detail = "HTTP " + std::to_string(status);
    try {
        const auto j = Json::parse(body);
        if (auto c = errc_from_name(j.at("error").get<std::string>())) code = *c;
        detail = j.value("detail", detail);
    } catch (const Json::exception&) {
        // not one of ours; keep the transport code
    }
    throw Error(code, detail);
}

void raise_for(const httplib::Result& r, Errc unreachable)
{
    if (!r) throw Error(unreachable, "request failed: " + httplib::to_string(r.error()));
    raise_for_status(r->status, r->body, unreachable);
}

}  // namespace

Json expect_json(const httplib::Result& r, Errc unreachable)
{
    raise_for(r, unreachable);
    return expect_json(r->status, r->body, unreachable);
}

Json expect_json(int status, const std::string& body, Errc unreachable)
{
    raise_for_status(status, body, unreachable);
    try {
        return Json::parse(body);
    } catch (const Json::exception& e) {
        throw Error(Errc::MalformedEncoding, std::string("bad JSON response: ") + e.what());
    }
}

Bytes expect_bytes(const httplib::Result& r, Errc unreachable)
{
    raise_for(r, unreachable);
    return Bytes(r->body.begin(), r->body.end());
}

Digest parse_digest(std::string_view hex)
{
    const Bytes b = from_hex(hex);
    if (b.size() != 32) throw Error(Errc::MalformedEncoding, "digest must be 32 bytes of hex");
    Digest d{};
    std::copy(b.begin(), b.end(), d.begin());
    return d;
}

std::pair<std::string, std::string> split_url(std::string_view url)
{
    const auto scheme = url.find("://");
    if (scheme == std::string_view::npos) throw Error(Errc::InvalidArgument, "URL without scheme: " + std::string(url));
    const auto slash = url.find('/', scheme + 3);
    if (slash == std::string_view::npos) return {std::string(url), "/"};
    return {std::string(url.substr(0, slash)), std::string(url.substr(slash))};
}

std::string url_host(std::string_view url)
{
    const auto base = split_url(url).first;
    const auto start = base.find("://") + 3;
    const auto colon = base.find(':', start);
    return base.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
}

std::string form_encode(const Params& params)
{
    std::string out;
    for (const auto& [k, v] : params) {
        if (!out.empty()) out += '&';
        out += httplib::detail::encode_query_param(k) + "=" + httplib::detail::encode_query_param(v);
    }
    return out;
}

std::map<std::string, std::string> form_decode(std::string_view text)
{
    std::map<std::string, std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size() && !text.empty()) {
        const auto amp = std::min(text.find('&', pos), text.size());
        const auto part = text.substr(pos, amp - pos);
        if (!part.empty()) {
            const auto eq = part.find('=');
            if (eq == std::string_view::npos) throw Error(Errc::MalformedEncoding, "parameter without '='");
            out.emplace(httplib::detail::decode_url(std::string(part.substr(0, eq)), true),
                        httplib::detail::decode_url(std::string(part.substr(eq + 1)), true));
        }
        pos = amp + 1;
    }
    return out;
}

}  // namespace expresso::net
