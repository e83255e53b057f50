// expresso: run the registry, IdP and RPs on loopback, drive scenarios, benchmarks and attacks.
//
// Exit codes: 0 success, 1 a property or step failed, 2 usage or configuration error.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "expresso/harness/attacks.hpp"
#include "expresso/harness/bench.hpp"
#include "expresso/harness/scenario.hpp"
#include "expresso/util/file.hpp"

using namespace expresso;
using namespace expresso::harness;

namespace {

struct Common {
    std::size_t contributors = 2;
    std::size_t users = 5;
    std::string data_dir;
};

DeploymentConfig deployment_config(const Common& c)
{
    DeploymentConfig dc;
    dc.contributors.clear();
    for (std::size_t i = 0; i < c.contributors; ++i) dc.contributors.push_back("contributor-" + std::to_string(i + 1));
    dc.users = sample_users(c.users);
    dc.data_dir = c.data_dir;
    return dc;
}

// Blocks until SIGINT or SIGTERM.
void wait_for_signal()
{
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    int sig = 0;
    sigwait(&set, &sig);
}

void block_signals()
{
    // Before any thread starts, so every server thread inherits the mask and sigwait sees them.
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);
}

Json read_json(const std::string& path)
{
    const Bytes raw = read_file(path);
    try {
        return Json::parse(raw.begin(), raw.end());
    } catch (const Json::exception& e) {
        throw Error(Errc::InvalidArgument, path + " is not JSON: " + e.what());
    }
}

int cmd_up(const Common& c, std::size_t rps, bool once)
{
    if (!once) block_signals();
    Deployment d(deployment_config(c));
    std::cout << "registry  " << d.registry_url() << "\n"
              << "idp       " << d.idp_url() << "\n";
    for (std::size_t i = 0; i < rps; ++i) {
        const auto idx = d.add_rp("rp-" + std::to_string(i + 1));
        std::cout << "rp-" << i + 1 << "      " << d.rp_server(idx).base_url() << "  (artifact version "
                  << d.rp(idx).artifact_version() << ")\n";
    }
    for (const auto& u : d.config().users) std::cout << "user      " << u.username << " / " << u.password << "\n";
    std::cout.flush();
    if (!once) wait_for_signal();
    return 0;
}

int cmd_scenario(const Common& c, const std::string& file, ReportFormat fmt)
{
    const Bytes raw = read_file(file);
    // Validation happens here, before anything listens or connects.
    const auto script = ScenarioScript::parse(std::string(raw.begin(), raw.end()));
    Deployment d(deployment_config(c));
    const auto result = run_scenario(d, script);
    for (const auto& s : result.steps) {
        std::cout << "[" << s.index << "] " << s.text << "  ok  " << static_cast<long>(s.ms) << " ms";
        if (!s.detail.empty()) std::cout << "  " << s.detail;
        std::cout << "\n";
    }
    if (result.report) std::cout << emit_report(*result.report, fmt);
    if (!d.rp_address_leaks().empty()) {
        std::cerr << "IdP request log names an RP address\n";
        return 1;
    }
    return 0;
}

int cmd_bench(const Common& c, std::size_t reps, ReportFormat fmt)
{
    Deployment d(deployment_config(c));
    std::cout << emit_report(run_bench(d, reps), fmt);
    return 0;
}

int cmd_attack(const Common& c, const std::string& kind, std::size_t trials)
{
    Deployment d(deployment_config(c));
    TrialReport r;
    if (kind == "integrity") {
        r = integrity_attack(d, trials);
    } else if (kind == "collusion") {
        r = collusion_check(d, trials, 3);
    } else {
        r = revocation_attack(d, trials);
    }
    std::cout << r.summary() << "\n";
    for (const auto& f : r.failures) std::cout << "  " << f << "\n";
    return r.ok() ? 0 : 1;
}

int cmd_serve(const std::string& role, const std::string& config_path, const std::string& host, int port,
              const std::string& registry_url)
{
    block_signals();
    if (role == "registry") {
        auto cfg = registry::RegistryConfig::load(config_path);
        registry::Registry reg(cfg);
        if (reg.pending_count() == 0) reg.replenish(1);
        reg.start_replenisher();
        registry::RegistryServer server(reg);
        server.start(host, port);
        std::cout << "registry listening on " << server.base_url() << std::endl;
        wait_for_signal();
        return 0;
    }
    if (role == "idp") {
        if (registry_url.empty()) throw Error(Errc::InvalidArgument, "serve idp needs --registry");
        auto cfg = idp::IdpConfig::load(config_path);
        idp::IdentityProvider provider(cfg, [registry_url](const std::string& id) {
            return registry::RegistryClient(registry_url).request_artifacts(id);
        });
        idp::IdpServer server(provider);
        server.start(host, port);
        std::cout << "idp " << cfg.idp_id << " listening on " << server.base_url() << std::endl;
        wait_for_signal();
        return 0;
    }
    const Json j = read_json(config_path);
    rp::RpConfig cfg;
    cfg.name = j.value("name", cfg.name);
    cfg.idp_url = j.at("idp_url");
    cfg.idp_id = j.value("idp_id", std::string("idp-1"));
    cfg.registry_url = j.at("registry_url");
    cfg.source_ip = j.value("source_ip", std::string());
    cfg.cache_dir = j.value("cache_dir", std::string());
    cfg.clock_skew_s = j.value("clock_skew_s", cfg.clock_skew_s);
    if (j.contains("redirect_handle")) cfg.redirect_handle = j.at("redirect_handle");
    rp::RelyingParty party(cfg);
    if (!party.restore()) party.register_with_idp();
    party.generate_proof();
    rp::RpServer server(party, j.value("refresh_interval_ms", 5000));
    server.start(host, port);
    std::cout << "rp " << cfg.name << " listening on " << server.base_url() << " (artifact version "
              << party.artifact_version() << ", redirect handle " << party.config().redirect_handle << ")" << std::endl;
    wait_for_signal();
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Privacy-preserving SSO desk deployment"};
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--contributors", common.contributors, "Ceremony contributors per allocation")
            ->check(CLI::Range(1, 16));
        sub->add_option("--users", common.users, "Sample user accounts")->check(CLI::Range(1, 100000));
        sub->add_option("--data-dir", common.data_dir, "Registry persistence directory");
    };
    const std::map<std::string, ReportFormat> formats{{"text", ReportFormat::Text}, {"json", ReportFormat::Json}};

    auto* up = app.add_subcommand("up", "Start registry, IdP and RPs in this process");
    std::size_t up_rps = 2;
    bool up_once = false;
    up->add_option("--rps", up_rps, "Relying parties to register")->check(CLI::Range(0, 200));
    up->add_flag("--once", up_once, "Exit after everything is registered");
    add_common(up);

    auto* scen = app.add_subcommand("scenario", "Run a scenario file");
    std::string scen_file;
    ReportFormat scen_fmt = ReportFormat::Text;
    scen->add_option("file", scen_file)->required()->check(CLI::ExistingFile);
    scen->add_option("--format", scen_fmt)->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    add_common(scen);

    auto* bench = app.add_subcommand("bench", "Measure proving, verification and login latency");
    std::size_t reps = 50;
    ReportFormat bench_fmt = ReportFormat::Text;
    bench->add_option("--reps", reps)->check(CLI::Range(1, 100000));
    bench->add_option("--format", bench_fmt)->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    add_common(bench);

    auto* attack = app.add_subcommand("attack", "Run an adversarial property check");
    std::string kind;
    std::size_t trials = 0;
    attack->add_option("kind", kind)->required()->check(CLI::IsMember({"integrity", "collusion", "revocation"}));
    attack->add_option("--trials", trials, "Trials (users for collusion); default 20, 100 for collusion");
    add_common(attack);

    auto* serve = app.add_subcommand("serve", "Run one service as its own process");
    std::string role, config_path, host = "127.0.0.1", registry_url;
    int port = 0;
    serve->add_option("role", role)->required()->check(CLI::IsMember({"registry", "idp", "rp"}));
    serve->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
    serve->add_option("--host", host);
    serve->add_option("--port", port)->check(CLI::Range(0, 65535));
    serve->add_option("--registry", registry_url, "Registry base URL (idp role)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*up) return cmd_up(common, up_rps, up_once);
        if (*scen) return cmd_scenario(common, scen_file, scen_fmt);
        if (*bench) return cmd_bench(common, reps, bench_fmt);
        if (*attack) {
            if (trials == 0) trials = kind == "collusion" ? 100 : 20;
            return cmd_attack(common, kind, trials);
        }
        return cmd_serve(role, config_path, host, port, registry_url);
    } catch (const Error& e) {
        std::cerr << "expresso: " << e.what() << "\n";
        const bool usage = e.code() == Errc::ScenarioInvalid || e.code() == Errc::InvalidArgument;
        return usage ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "expresso: " << e.what() << "\n";
        return 1;
    }
}
