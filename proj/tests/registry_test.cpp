#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include "expresso/registry/service.hpp"
#include "expresso/util/crypto.hpp"
#include "expresso/util/file.hpp"
#include "expresso/zk/fft.hpp"

using namespace expresso;
using namespace expresso::registry;
using circuit::BoilerplateProgram;
using circuit::ValueType;
using circuit::Visibility;
namespace fs = std::filesystem;

namespace {

const BoilerplateProgram& small_program()
{
    static const BoilerplateProgram p{
        "program small v1\n"
        "public c: field\n"
        "public d: field\n"
        "private a: field\n"
        "private b: field\n"
        "let s = a * b\n"
        "assert s * a == c\n"
        "assert a + b == d\n",
        {{"c", Visibility::Public, ValueType::Field},
         {"d", Visibility::Public, ValueType::Field},
         {"a", Visibility::Private, ValueType::Field},
         {"b", Visibility::Private, ValueType::Field}}};
    return p;
}

std::shared_ptr<const ceremony::Phase1Parameters> shared_phase1()
{
    static const auto p = [] {
        const auto n = static_cast<std::uint32_t>(zk::qap_domain_size(circuit::compile(small_program())));
        return std::make_shared<const ceremony::Phase1Parameters>(ceremony::phase1_generate(n, as_bytes("registry")));
    }();
    return p;
}

RegistryConfig config(std::vector<std::string> idps, fs::path dir = {})
{
    RegistryConfig c;
    c.idps = std::move(idps);
    c.data_dir = std::move(dir);
    return c;
}

std::unique_ptr<Registry> make_registry(std::vector<std::string> idps, fs::path dir = {})
{
    return std::make_unique<Registry>(config(std::move(idps), std::move(dir)), shared_phase1(), small_program());
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("expresso-registry-" + to_hex(random_bytes(6)))) {}
    ~TempDir() { fs::remove_all(path); }
};

Errc code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return Errc::StepFailure;
}

}  // namespace

TEST(Registry, VersionsIncreaseAndLatestMatchesDelivery)
{
    auto reg = make_registry({"idp-a"});
    reg->replenish(2);
    const auto a1 = reg->request_artifacts("idp-a");
    EXPECT_EQ(a1.version, 1u);
    EXPECT_EQ(reg->get_latest_digest("idp-a").artifact_digest, a1.artifact_digest);
    const auto a2 = reg->request_artifacts("idp-a");
    EXPECT_EQ(a2.version, 2u);
    EXPECT_TRUE(a2.digest_valid());
    EXPECT_EQ(reg->get_latest_digest("idp-a").artifact_digest, a2.artifact_digest);
    EXPECT_NE(a1.artifact_digest, a2.artifact_digest);
    const auto h = reg->digest_history("idp-a");
    ASSERT_EQ(h.size(), 2u);
    EXPECT_EQ(h[0].version, 1u);
    EXPECT_EQ(h[1].artifact_digest, a2.artifact_digest);
    EXPECT_LE(h[0].published_at, h[1].published_at);
}

TEST(Registry, ErrorsForUnknownAndUnallocated)
{
    auto reg = make_registry({"idp-a"});
    EXPECT_EQ(code_of([&] { reg->request_artifacts("nobody"); }), Errc::UnknownIdP);
    EXPECT_EQ(code_of([&] { reg->get_latest_digest("nobody"); }), Errc::UnknownIdP);
    EXPECT_EQ(code_of([&] { reg->get_latest_digest("idp-a"); }), Errc::NoAllocation);
    EXPECT_EQ(code_of([&] { reg->request_artifacts("idp-a"); }), Errc::PoolExhausted);
    EXPECT_EQ(code_of([&] { reg->replenish(0); }), Errc::InvalidArgument);
    EXPECT_EQ(code_of([&] { reg->enroll(""); }), Errc::InvalidArgument);
}

TEST(Registry, ExhaustionSweep)
{
    // n pooled artifacts and k > n requests: exactly n succeed, the rest report exhaustion
    for (std::size_t n : {0u, 1u, 3u}) {
        auto reg = make_registry({"idp-a", "idp-b"});
        if (n) reg->replenish(n);
        std::size_t ok = 0, exhausted = 0;
        for (std::size_t i = 0; i < n + 2; ++i) {
            try {
                reg->request_artifacts(i % 2 ? "idp-b" : "idp-a");
                ++ok;
            } catch (const Error& e) {
                EXPECT_EQ(e.code(), Errc::PoolExhausted);
                ++exhausted;
            }
        }
        EXPECT_EQ(ok, n);
        EXPECT_EQ(exhausted, 2u);
        EXPECT_EQ(reg->pending_count(), 0u);
        // after replenishing, requests succeed again and versions continue
        reg->replenish(1);
        EXPECT_EQ(reg->request_artifacts("idp-a").version, (n + 1) / 2 + 1);
    }
}

TEST(Registry, TenantsAreIsolated)
{
    auto reg = make_registry({"idp-a", "idp-b"});
    reg->replenish(3);
    const auto a1 = reg->request_artifacts("idp-a");
    const auto b1 = reg->request_artifacts("idp-b");
    EXPECT_EQ(a1.version, 1u);
    EXPECT_EQ(b1.version, 1u);
    EXPECT_NE(a1.transcript_digest, b1.transcript_digest);
    EXPECT_NE(a1.verification_key.serialize(), b1.verification_key.serialize());
    EXPECT_EQ(reg->get_latest_digest("idp-a").artifact_digest, a1.artifact_digest);
    const auto b2 = reg->request_artifacts("idp-b");
    EXPECT_EQ(b2.version, 2u);
    EXPECT_EQ(reg->get_latest_digest("idp-a").artifact_digest, a1.artifact_digest);
    EXPECT_EQ(reg->digest_history("idp-a").size(), 1u);
}

TEST(Registry, BoilerplateMatchesArtifacts)
{
    auto reg = make_registry({"idp-a"});
    reg->replenish(1);
    const auto a = reg->request_artifacts("idp-a");
    EXPECT_EQ(a.program_digest, reg->get_boilerplate().program_digest());
    // anyone can recompile the published program and obtain the same circuit
    const auto cs = circuit::compile(reg->get_boilerplate());
    EXPECT_EQ(cs.digest(), reg->constraint_system().digest());
    EXPECT_EQ(a.proving_key.cs->digest(), cs.digest());
}

TEST(Registry, ReplenishRunsIndependentCeremonies)
{
    auto reg = make_registry({"idp-a"});
    reg->replenish(3);
    EXPECT_EQ(reg->ceremonies_run(), 3u);
    const auto pending = reg->pending_digests();
    ASSERT_EQ(pending.size(), 3u);
    EXPECT_EQ(std::set<Digest>(pending.begin(), pending.end()).size(), 3u);
    std::set<Digest> transcripts;
    for (int i = 0; i < 3; ++i) {
        const auto a = reg->request_artifacts("idp-a");
        const auto tbytes = reg->transcript_blob(a.transcript_digest);
        ASSERT_TRUE(tbytes);
        const auto t = ceremony::CeremonyTranscript::deserialize(*tbytes);
        ASSERT_TRUE(t.beacon);
        EXPECT_EQ(t.records.size(), 2u);
        std::string why;
        EXPECT_TRUE(ceremony::verify_artifacts(a, t, reg->phase1(), reg->constraint_system(), as_bytes("chk"), &why))
            << why;
        transcripts.insert(a.transcript_digest);
    }
    EXPECT_EQ(transcripts.size(), 3u);
}

TEST(Registry, StorageStaysBounded)
{
    TempDir dir;
    auto reg = make_registry({"idp-a"}, dir.path);
    reg->replenish(1);
    for (int i = 0; i < 4; ++i) {
        reg->replenish(1);
        reg->request_artifacts("idp-a");
        // one pooled container plus the single delivered one
        EXPECT_EQ(reg->stored_artifact_count(), 2u);
    }
    const auto latest = reg->get_latest_digest("idp-a");
    EXPECT_TRUE(reg->artifact_blob(latest.artifact_digest));
    EXPECT_FALSE(reg->artifact_blob(reg->digest_history("idp-a").front().artifact_digest));
}

TEST(Registry, WatermarkTriggersReplenishment)
{
    auto cfg = config({"idp-a"});
    cfg.low_watermark = 1;
    cfg.replenish_batch = 1;
    cfg.auto_replenish = true;
    Registry reg(cfg, shared_phase1(), small_program());
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(60);
    while (reg.pending_count() < 1 && std::chrono::steady_clock::now() < deadline) {
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    ASSERT_GE(reg.pending_count(), 1u);
    reg.request_artifacts("idp-a");
    while (reg.pending_count() < 1 && std::chrono::steady_clock::now() < deadline) {
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    EXPECT_GE(reg.pending_count(), 1u);
    reg.stop_replenisher();
}

TEST(Registry, ConcurrentRequestsNeverShareArtifacts)
{
    auto reg = make_registry({"idp-a", "idp-b"});
    reg->replenish(8);
    std::mutex mu;
    std::vector<ZkArtifacts> got;
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&, t] {
            for (int i = 0; i < 2; ++i) {
                auto a = reg->request_artifacts(t % 2 ? "idp-b" : "idp-a");
                std::lock_guard lock(mu);
                got.push_back(std::move(a));
            }
        });
    }
    for (auto& th : threads) th.join();
    std::set<Digest> transcripts;
    for (const auto& a : got) transcripts.insert(a.transcript_digest);
    EXPECT_EQ(transcripts.size(), 8u);
    for (const char* id : {"idp-a", "idp-b"}) {
        const auto h = reg->digest_history(id);
        ASSERT_EQ(h.size(), 4u);
        for (std::size_t i = 0; i < h.size(); ++i) EXPECT_EQ(h[i].version, i + 1);
    }
}

TEST(Registry, StateSurvivesRestart)
{
    TempDir dir;
    DigestRecord latest;
    std::vector<Digest> pending;
    {
        auto reg = make_registry({"idp-a"}, dir.path);
        reg->replenish(3);
        reg->request_artifacts("idp-a");
        latest = reg->get_latest_digest("idp-a");
        pending = reg->pending_digests();
    }
    // a torn trailing line, as left by a crash mid-append
    {
        std::ofstream log(dir.path / "registry.log", std::ios::app);
        log << R"({"op":"allocate","idp":"idp-a","vers)";
    }
    auto reg = make_registry({}, dir.path);
    EXPECT_TRUE(reg->is_enrolled("idp-a"));
    EXPECT_EQ(reg->get_latest_digest("idp-a"), latest);
    EXPECT_EQ(reg->pending_digests(), pending);
    const auto a = reg->request_artifacts("idp-a");
    EXPECT_EQ(a.version, 2u);
    EXPECT_EQ(reg->digest_history("idp-a").size(), 2u);
}

TEST(Registry, Phase1PersistsInDataDir)
{
    TempDir dir;
    Bytes first;
    {
        Registry reg(config({"idp-a"}, dir.path), nullptr, small_program());
        first = reg.phase1_bytes();
        EXPECT_TRUE(fs::exists(dir.path / "phase1.bin"));
    }
    Registry reg(config({"idp-a"}, dir.path), nullptr, small_program());
    EXPECT_EQ(reg.phase1_bytes(), first);
}

TEST(Registry, ConfigFile)
{
    TempDir dir;
    fs::create_directories(dir.path);
    write_file_atomic(dir.path / "ok.json",
                      as_bytes(R"({"idps":["x","y"],"low_watermark":3,"auto_replenish":true,"beacon_source":"b"})"));
    const auto c = RegistryConfig::load(dir.path / "ok.json");
    EXPECT_EQ(c.idps, (std::vector<std::string>{"x", "y"}));
    EXPECT_EQ(c.low_watermark, 3u);
    EXPECT_TRUE(c.auto_replenish);
    EXPECT_EQ(c.beacon_source, "b");
    write_file_atomic(dir.path / "bad.json", as_bytes(R"({"idps":[],"pool":4})"));
    EXPECT_EQ(code_of([&] { RegistryConfig::load(dir.path / "bad.json"); }), Errc::InvalidArgument);
}

TEST(RegistryHttp, RoundTrip)
{
    auto reg = make_registry({"idp-a"});
    reg->replenish(1);
    RegistryServer server(*reg);
    server.start("127.0.0.1");
    RegistryClient client(server.base_url());

    const auto bp = client.boilerplate();
    EXPECT_EQ(bp.program_digest(), small_program().program_digest());
    EXPECT_EQ(bp.parameter_schema, small_program().parameter_schema);

    EXPECT_EQ(code_of([&] { client.latest_digest("idp-a"); }), Errc::NoAllocation);
    EXPECT_EQ(code_of([&] { client.request_artifacts("ghost"); }), Errc::UnknownIdP);
    const auto a = client.request_artifacts("idp-a");
    EXPECT_EQ(a.version, 1u);
    EXPECT_EQ(client.latest_digest("idp-a").artifact_digest, a.artifact_digest);
    EXPECT_EQ(client.digest_history("idp-a").size(), 1u);
    EXPECT_EQ(code_of([&] { client.request_artifacts("idp-a"); }), Errc::PoolExhausted);
    EXPECT_EQ(ceremony::CeremonyTranscript::deserialize(client.transcript(a.transcript_digest)).final_digest,
              a.transcript_digest);
    EXPECT_EQ(client.phase1(), reg->phase1_bytes());
    const int port = std::stoi(server.base_url().substr(server.base_url().rfind(':') + 1));
    server.stop();
    EXPECT_EQ(code_of([&] { RegistryClient("http://127.0.0.1:" + std::to_string(port)).latest_digest("idp-a"); }),
              Errc::RegistryUnavailable);
}
