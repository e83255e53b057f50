#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "expresso/ceremony/artifacts.hpp"
#include "expresso/circuit/program.hpp"

namespace expresso::registry {

using ceremony::ZkArtifacts;

/// Published digest of one artifact allocation.
struct DigestRecord {
    std::string idp_id;
    std::uint64_t version = 0;
    Digest artifact_digest{};
    std::int64_t published_at = 0;  // unix milliseconds

    friend bool operator==(const DigestRecord&, const DigestRecord&) = default;
};

struct RegistryConfig {
    std::filesystem::path data_dir;  // empty: memory only
    std::vector<std::string> idps;   // enrolled identity providers
    std::vector<std::string> contributors{"oidf-coordinator", "oidf-auditor"};
    std::string beacon_source = "oidf desk beacon";
    std::size_t low_watermark = 2;
    std::size_t replenish_batch = 2;
    bool auto_replenish = false;

    /// JSON file with the same field names; unknown fields are rejected.
    static RegistryConfig load(const std::filesystem::path& path);
};

/// Artifact pool, allocation log and boilerplate publication.
class Registry {
public:
    /// Without `phase1`, parameters are loaded from data_dir/phase1.bin or generated (and
    /// saved) for the program's domain.
    explicit Registry(RegistryConfig config, std::shared_ptr<const ceremony::Phase1Parameters> phase1 = nullptr,
                      circuit::BoilerplateProgram program = circuit::BoilerplateProgram::membership());
    ~Registry();
    Registry(const Registry&) = delete;
    Registry& operator=(const Registry&) = delete;

    void enroll(const std::string& idp_id);
    bool is_enrolled(const std::string& idp_id) const;

    /// Pops one pooled artifact, stamps the next version for `idp_id` and publishes its digest,
    /// all under one lock. Errors: UnknownIdP, PoolExhausted.
    ZkArtifacts request_artifacts(const std::string& idp_id);
    /// Errors: UnknownIdP, NoAllocation.
    DigestRecord get_latest_digest(const std::string& idp_id) const;
    std::vector<DigestRecord> digest_history(const std::string& idp_id) const;

    const circuit::BoilerplateProgram& get_boilerplate() const { return program_; }
    const circuit::ConstraintSystem& constraint_system() const { return *cs_; }
    const ceremony::Phase1Parameters& phase1() const { return *phase1_; }
    const Bytes& phase1_bytes() const { return phase1_bytes_; }

    /// Runs `count` independent ceremonies and queues their artifacts.
    void replenish(std::size_t count);
    std::size_t pending_count() const;
    std::size_t ceremonies_run() const { return ceremonies_run_; }
    /// Digests currently queued, oldest first.
    std::vector<Digest> pending_digests() const;

    /// Delivered artifact container by published digest (latest version per IdP only).
    std::optional<Bytes> artifact_blob(const Digest& digest) const;
    /// Ceremony transcript by its final digest.
    std::optional<Bytes> transcript_blob(const Digest& transcript_digest) const;
    /// Number of stored artifact containers (pending plus delivered).
    std::size_t stored_artifact_count() const;

    void start_replenisher();
    void stop_replenisher();

private:
    struct Snapshot {
        std::set<std::string> idps;
        std::map<std::string, std::vector<DigestRecord>> history;
    };
    struct PendingEntry {
        Digest digest;
        Digest transcript;
    };
    class Store;

    std::shared_ptr<const Snapshot> snapshot() const;
    void publish(std::shared_ptr<const Snapshot> s);
    void append_log(const std::string& line);
    void replay();
    void replenisher_loop();

    RegistryConfig config_;
    circuit::BoilerplateProgram program_;
    std::shared_ptr<const circuit::ConstraintSystem> cs_;
    std::shared_ptr<const ceremony::Phase1Parameters> phase1_;
    Bytes phase1_bytes_;
    std::unique_ptr<Store> store_;

    mutable std::mutex mu_;  // allocation, pool and log writes
    std::deque<PendingEntry> pending_;
    std::shared_ptr<const Snapshot> snapshot_;
    std::atomic<std::size_t> ceremonies_run_{0};
    std::atomic<std::uint64_t> beacon_counter_{0};

    std::mutex worker_mu_;
    std::condition_variable worker_cv_;
    bool stop_worker_ = false;
    std::thread worker_;
};

}  // namespace expresso::registry
