#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <thread>

#include "expresso/harness/attacks.hpp"
#include "expresso/harness/bench.hpp"
#include "expresso/harness/scenario.hpp"
#include "expresso/harness/deployment.hpp"

using namespace expresso;
using namespace expresso::harness;

namespace {

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

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

class EndToEnd : public ::testing::Test {
protected:
    static void SetUpTestSuite()
    {
        DeploymentConfig cfg;
        cfg.initial_pool = 1;
        world = new Deployment(cfg);
        world->add_rp("shop");
        world->add_rp("news");
    }
    static void TearDownTestSuite()
    {
        delete world;
        world = nullptr;
    }
    // Later tests rotate the IdP; the two fixture RPs catch up here.
    static void refresh_fixture_rps()
    {
        world->rp(0).refresh_artifacts();
        world->rp(1).refresh_artifacts();
    }
    static void wait_for_pool()
    {
        const auto deadline = std::chrono::steady_clock::now() + std::chrono::minutes(5);
        while (world->registry().pending_count() == 0 && std::chrono::steady_clock::now() < deadline) {
            std::this_thread::sleep_for(std::chrono::milliseconds(200));
        }
    }
    static Deployment* world;
};
Deployment* EndToEnd::world = nullptr;

}  // namespace

TEST_F(EndToEnd, RegisteredRpsShareTheLatestArtifacts)
{
    const auto latest = world->registry().get_latest_digest("idp-1");
    EXPECT_EQ(world->rp(0).artifacts()->artifact_digest, latest.artifact_digest);
    EXPECT_EQ(world->rp(1).artifacts()->artifact_digest, latest.artifact_digest);
    EXPECT_NE(world->rp(0).credential().client_id, world->rp(1).credential().client_id);
    EXPECT_TRUE(world->rp(0).credential().verify());
    EXPECT_TRUE(world->idp().knows_client_id(world->rp(0).credential().client_id));
}

TEST_F(EndToEnd, LoginReturnsConsentedClaimsAndStableSubject)
{
    const auto first = world->login("alice", 0, {"openid", "email", "name"}, {"openid", "email"});
    EXPECT_EQ(first.claims.at("email"), "alice@example.org");
    EXPECT_FALSE(first.claims.contains("name"));
    const auto again = world->login("alice", 0);
    EXPECT_EQ(first.subject, again.subject);
    EXPECT_TRUE(again.claims.empty());
    const auto other = world->login("alice", 1);
    EXPECT_NE(first.subject, other.subject);
    EXPECT_NE(world->login("bob", 0).subject, first.subject);
    EXPECT_LE(first.fragment_bytes, world->user_agent().config().fragment_limit);
}

TEST_F(EndToEnd, AuthRequestsRevealNoClientIdentity)
{
    const auto a = world->rp(0).initiate_login({"openid"});
    const auto b = world->rp(1).initiate_login({"openid"});
    EXPECT_EQ(a.proof.public_inputs, b.proof.public_inputs);
    for (std::size_t i = 0; i < 2; ++i) {
        const auto req = world->rp(i).initiate_login({"openid"});
        const auto cred = world->rp(i).credential();
        const auto raw = req.proof.serialize();
        const std::string raw_s(raw.begin(), raw.end());
        const auto id = cred.client_id.to_bytes();
        const auto sig = cred.signature.to_bytes();
        for (const auto& needle : {std::string(id.begin(), id.end()), std::string(sig.begin(), sig.end())}) {
            EXPECT_FALSE(contains(raw_s, needle));
        }
        EXPECT_FALSE(contains(req.to_fragment(), to_hex(id)));
        EXPECT_FALSE(contains(req.to_fragment(), base64url_encode(id)));
        EXPECT_FALSE(contains(req.to_fragment(), world->rp_server(i).base_url()));
    }
    EXPECT_NE(a.state, b.state);
}

TEST_F(EndToEnd, IdpNeverSeesRpAddresses)
{
    world->login("carol", 0);
    world->login("carol", 1);
    world->rp(0).refresh_artifacts();
    EXPECT_TRUE(world->rp_address_leaks().empty()) << world->rp_address_leaks().front();
    bool saw_user_agent = false;
    for (const auto& e : world->idp_server().request_log()) {
        saw_user_agent |= e.remote_addr == "127.0.0.2";
        EXPECT_EQ(e.headers.count("Referer"), 0u);
        EXPECT_EQ(e.headers.count("Origin"), 0u);
    }
    EXPECT_TRUE(saw_user_agent);
}

TEST_F(EndToEnd, TokensAreBoundAndSigned)
{
    auto& rp = world->rp(0);
    const auto req = rp.initiate_login({"openid"});
    const auto alice = world->user("alice");
    const auto red = world->user_agent().authorize(world->idp_url() + "/authorize", req.to_fragment(), alice.username,
                                                   alice.password, {"openid"});
    const auto p = net::form_decode(red.fragment);
    ASSERT_TRUE(p.count("id_token"));
    const std::string token = p.at("id_token");
    EXPECT_EQ(p.at("state"), req.state);
    EXPECT_NO_THROW(rp.validate_token(token, req.state));
    EXPECT_EQ(code_of([&] { rp.validate_token(token, "some-other-state"); }), Errc::StateMismatch);

    std::string forged = token;
    forged[forged.rfind('.') + 3] ^= 1;
    EXPECT_EQ(code_of([&] { rp.validate_token(forged, req.state); }), Errc::BadSignature);
    const auto wrong_key = Ed25519KeyPair::generate(random_bytes(32));
    const auto resigned = oidc::sign_token(wrong_key, oidc::verify_token(token, world->idp().token_signing_key()), "x");
    EXPECT_EQ(code_of([&] { rp.validate_token(resigned, req.state); }), Errc::BadSignature);

    // the token never names the client
    const auto payload = oidc::verify_token(token, world->idp().token_signing_key());
    EXPECT_FALSE(payload.contains("aud"));
    EXPECT_FALSE(contains(payload.dump(), rp.credential().client_id.to_hex()));
}

TEST_F(EndToEnd, ProtocolErrors)
{
    const auto alice = world->user("alice");
    const std::string authorize = world->idp_url() + "/authorize";
    const auto req = world->rp(0).initiate_login({"openid"});
    auto red = world->user_agent().authorize(authorize, req.to_fragment(), "alice", alice.password, {"openid", "email"});
    EXPECT_EQ(net::form_decode(red.fragment).at("error"), "ConsentDenied");

    // a proof bound to a different IdP key
    auto wrong = req;
    wrong.proof.public_inputs[0] += zk::Fr::one();
    red = world->user_agent().authorize(authorize, wrong.to_fragment(), "alice", alice.password, {"openid"});
    EXPECT_EQ(net::form_decode(red.fragment).at("error"), "ProofInvalid");

    EXPECT_EQ(code_of([&] { world->user_agent().authorize(authorize, req.to_fragment(), "alice", "nope", {}); }),
              Errc::BadCredentials);

    UserAgent tight({"127.0.0.2", 64});
    EXPECT_EQ(code_of([&] { tight.forward(authorize, req.to_fragment()); }), Errc::RelayFailure);
}

TEST_F(EndToEnd, ThrottlesRepeatedFailures)
{
    world->add_user({"mallory-target", "right", {}});
    for (int i = 0; i < 5; ++i) {
        EXPECT_EQ(code_of([&] { world->idp().authenticate_user("mallory-target", "wrong"); }), Errc::BadCredentials);
    }
    EXPECT_EQ(code_of([&] { world->idp().authenticate_user("mallory-target", "right"); }), Errc::Throttled);
}

TEST_F(EndToEnd, IntegrityAttackIsDetected)
{
    const auto r = integrity_attack(*world, 5);
    EXPECT_TRUE(r.ok()) << r.summary();
}

TEST_F(EndToEnd, RevokedRpIsLockedOut)
{
    const auto r = revocation_attack(*world, 1);
    EXPECT_TRUE(r.ok()) << r.summary();
}

TEST_F(EndToEnd, ProofCacheAndRefresh)
{
    refresh_fixture_rps();
    auto& rp = world->rp(0);
    const auto first = rp.generate_proof();
    ASSERT_TRUE(rp.has_cached_proof());
    const auto t0 = std::chrono::steady_clock::now();
    EXPECT_EQ(rp.generate_proof(), first);
    EXPECT_LT(std::chrono::steady_clock::now() - t0, std::chrono::milliseconds(50));

    const auto version = rp.artifact_version();
    EXPECT_FALSE(rp.refresh_artifacts());
    EXPECT_EQ(rp.artifact_version(), version);
    EXPECT_TRUE(rp.has_cached_proof());

    const auto old = *rp.artifacts();
    EXPECT_TRUE(rp.check_artifact_integrity(old));
    auto flipped = old;
    auto bytes = flipped.proving_key.serialize();
    bytes[bytes.size() / 2] ^= 0x01;
    try {
        flipped.proving_key = zk::ProvingKey::deserialize(bytes);
        EXPECT_FALSE(rp.check_artifact_integrity(flipped));
    } catch (const Error&) {
        // an undecodable key is rejected even earlier
    }

    world->rotate_idp();
    EXPECT_TRUE(rp.refresh_artifacts());
    EXPECT_EQ(rp.artifact_version(), version + 1);
    EXPECT_FALSE(rp.has_cached_proof());
    EXPECT_FALSE(rp.check_artifact_integrity(old));
    EXPECT_NO_THROW(world->login("carol", 0));
    EXPECT_TRUE(rp.has_cached_proof());
    refresh_fixture_rps();
}

TEST_F(EndToEnd, RelyingPartyStateSurvivesRestart)
{
    const auto dir = std::filesystem::temp_directory_path() / ("expresso-rp-" + to_hex(random_bytes(6)));
    auto cfg = world->rp_config("persistent");
    cfg.cache_dir = dir;
    {
        rp::RelyingParty fresh(cfg);
        EXPECT_FALSE(fresh.restore());
        wait_for_pool();  // the IdP may still owe a rotation
        fresh.register_with_idp();
        fresh.generate_proof();
    }
    rp::RelyingParty restarted(cfg);
    ASSERT_TRUE(restarted.restore());
    EXPECT_TRUE(restarted.registered());
    EXPECT_TRUE(restarted.credential().verify());
    EXPECT_EQ(restarted.artifacts()->artifact_digest,
              world->registry().get_latest_digest("idp-1").artifact_digest);
    EXPECT_NO_THROW(restarted.generate_proof());
    restarted.deregister();
    world->rotate_idp();
    refresh_fixture_rps();
    std::filesystem::remove_all(dir);
}

TEST_F(EndToEnd, BenchReportIsConsistent)
{
    const auto r = run_bench(*world, 5);
    EXPECT_EQ(r.reps, 5u);
    EXPECT_GT(r.proving_ms, 0);
    EXPECT_GT(r.verification_ms, 0);
    // user authentication includes the IdP's verification and token work
    EXPECT_GE(r.user_auth_ms, r.verification_ms + r.oidc_ops_ms);
    EXPECT_EQ(r.constraints, world->registry().constraint_system().constraint_count());
    EXPECT_LE(r.proof_bytes, 4096u);
}

TEST_F(EndToEnd, ScenarioRunnerReportsStepFailures)
{
    const auto ok = run_scenario(*world, ScenarioScript::parse("register sc-a\n"
                                                               "register sc-b\n"
                                                               "login dave sc-a\n"
                                                               "collusion dave sc-a sc-b\n"
                                                               "deregister sc-a\n"
                                                               "login dave sc-a expect=fail\n"
                                                               "login dave sc-b\n"
                                                               "rotate-check\n"));
    EXPECT_EQ(ok.steps.size(), 8u);
    ASSERT_TRUE(ok.report);
    EXPECT_GE(ok.report->reps, 2u);

    try {
        run_scenario(*world, ScenarioScript::parse("register sc-c\nlogin dave sc-c expect=Throttled\n"));
        FAIL() << "unexpected success accepted";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::StepFailure);
        EXPECT_TRUE(contains(e.what(), "step 2")) << e.what();
    }
    refresh_fixture_rps();
}
