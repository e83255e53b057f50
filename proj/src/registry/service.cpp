#include "expresso/registry/service.hpp"

namespace expresso::registry {

using net::Json;
using net::guarded;

namespace {

circuit::Visibility parse_visibility(const std::string& s)
{
    if (s == "public") return circuit::Visibility::Public;
    if (s == "private") return circuit::Visibility::Private;
    throw Error(Errc::MalformedEncoding, "unknown visibility '" + s + "'");
}

circuit::ValueType parse_type(const std::string& s)
{
    if (s == "point") return circuit::ValueType::Point;
    if (s == "scalar") return circuit::ValueType::Scalar;
    if (s == "field") return circuit::ValueType::Field;
    throw Error(Errc::MalformedEncoding, "unknown parameter type '" + s + "'");
}

}  // namespace

Json to_json(const DigestRecord& r)
{
    return Json{{"idp_id", r.idp_id},
                {"version", r.version},
                {"artifact_digest", to_hex(r.artifact_digest)},
                {"published_at", r.published_at}};
}

DigestRecord digest_record_from_json(const Json& j)
{
    try {
        return DigestRecord{j.at("idp_id"), j.at("version").get<std::uint64_t>(),
                            net::parse_digest(j.at("artifact_digest").get<std::string>()),
                            j.at("published_at").get<std::int64_t>()};
    } catch (const Json::exception& e) {
        throw Error(Errc::MalformedEncoding, std::string("bad digest record: ") + e.what());
    }
}

RegistryServer::RegistryServer(Registry& registry) : registry_(registry)
{
    auto& r = http_.routes();
    r.Get("/boilerplate", [this](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] {
            const auto& p = registry_.get_boilerplate();
            Json params = Json::array();
            for (const auto& d : p.parameter_schema) {
                params.push_back({{"name", d.name},
                                  {"visibility", std::string(circuit::to_string(d.visibility))},
                                  {"type", std::string(circuit::to_string(d.type))}});
            }
            net::send_json(res, Json{{"program_name", registry_.constraint_system().program_name},
                                     {"source", p.source_text},
                                     {"program_digest", to_hex(p.program_digest())},
                                     {"circuit_digest", to_hex(registry_.constraint_system().digest())},
                                     {"parameters", params}});
        });
    });
    r.Get(R"(/idp/([^/]+)/digest/latest)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { net::send_json(res, to_json(registry_.get_latest_digest(req.matches[1]))); });
    });
    r.Get(R"(/idp/([^/]+)/digest/history)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            Json out = Json::array();
            for (const auto& rec : registry_.digest_history(req.matches[1])) out.push_back(to_json(rec));
            net::send_json(res, out);
        });
    });
    r.Post(R"(/idp/([^/]+)/artifacts)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto a = registry_.request_artifacts(req.matches[1]);
            const auto hex = to_hex(a.artifact_digest);
            net::send_json(res, Json{{"version", a.version},
                                     {"artifact_digest", hex},
                                     {"transcript_digest", to_hex(a.transcript_digest)},
                                     {"blob", "/blob/" + hex}});
        });
    });
    r.Get(R"(/blob/([0-9a-f]{64}))", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto b = registry_.artifact_blob(net::parse_digest(req.matches[1].str()));
            if (!b) throw Error(Errc::NoAllocation, "no delivered artifact with that digest");
            net::send_bytes(res, *b);
        });
    });
    r.Get(R"(/transcript/([0-9a-f]{64}))", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto b = registry_.transcript_blob(net::parse_digest(req.matches[1].str()));
            if (!b) throw Error(Errc::NoAllocation, "no transcript with that digest");
            net::send_bytes(res, *b);
        });
    });
    r.Get("/phase1", [this](const httplib::Request&, httplib::Response& res) {
        net::send_bytes(res, registry_.phase1_bytes());
    });
}

RegistryClient::RegistryClient(std::string base_url, std::string source_ip)
    : base_url_(std::move(base_url)), source_ip_(std::move(source_ip))
{
}

circuit::BoilerplateProgram RegistryClient::boilerplate() const
{
    const Json j = net::expect_json(net::make_client(base_url_, source_ip_)->Get("/boilerplate"),
                                    Errc::RegistryUnavailable);
    circuit::BoilerplateProgram p;
    try {
        p.source_text = j.at("source").get<std::string>();
        for (const auto& d : j.at("parameters")) {
            p.parameter_schema.push_back(
                {d.at("name").get<std::string>(), parse_visibility(d.at("visibility")), parse_type(d.at("type"))});
        }
    } catch (const Json::exception& e) {
        throw Error(Errc::MalformedEncoding, std::string("bad boilerplate response: ") + e.what());
    }
    return p;
}

DigestRecord RegistryClient::latest_digest(const std::string& idp_id) const
{
    return digest_record_from_json(net::expect_json(
        net::make_client(base_url_, source_ip_)->Get("/idp/" + idp_id + "/digest/latest"), Errc::RegistryUnavailable));
}

std::vector<DigestRecord> RegistryClient::digest_history(const std::string& idp_id) const
{
    const Json j = net::expect_json(net::make_client(base_url_, source_ip_)->Get("/idp/" + idp_id + "/digest/history"),
                                    Errc::RegistryUnavailable);
    std::vector<DigestRecord> out;
    for (const auto& e : j) out.push_back(digest_record_from_json(e));
    return out;
}

ZkArtifacts RegistryClient::request_artifacts(const std::string& idp_id) const
{
    auto cli = net::make_client(base_url_, source_ip_);
    const Json j = net::expect_json(cli->Post("/idp/" + idp_id + "/artifacts"), Errc::RegistryUnavailable);
    const Digest want = net::parse_digest(j.at("artifact_digest").get<std::string>());
    auto a = ZkArtifacts::deserialize(net::expect_bytes(cli->Get(j.at("blob").get<std::string>()),
                                                        Errc::RegistryUnavailable));
    if (a.artifact_digest != want) throw Error(Errc::IntegrityMismatch, "downloaded artifacts differ from the allocation");
    return a;
}

Bytes RegistryClient::transcript(const Digest& transcript_digest) const
{
    return net::expect_bytes(net::make_client(base_url_, source_ip_)->Get("/transcript/" + to_hex(transcript_digest)),
                             Errc::RegistryUnavailable);
}

Bytes RegistryClient::phase1() const
{
    return net::expect_bytes(net::make_client(base_url_, source_ip_)->Get("/phase1"), Errc::RegistryUnavailable);
}

}  // namespace expresso::registry
