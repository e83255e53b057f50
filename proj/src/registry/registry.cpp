#include "expresso/registry/registry.hpp"

#include <chrono>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "expresso/util/crypto.hpp"
#include "expresso/util/file.hpp"
#include "expresso/zk/groth16.hpp"

namespace expresso::registry {

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

std::int64_t now_ms()
{
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

Digest digest_from_hex(const std::string& hex)
{
    const Bytes b = from_hex(hex);
    if (b.size() != 32) throw Error(Errc::MalformedEncoding, "bad digest in registry log");
    Digest d{};
    std::copy(b.begin(), b.end(), d.begin());
    return d;
}

}  // namespace

RegistryConfig RegistryConfig::load(const fs::path& path)
{
    const Bytes raw = read_file(path);
    const Json j = Json::parse(raw.begin(), raw.end());
    static const std::set<std::string> known{"data_dir",    "idps",          "contributors",  "beacon_source",
                                             "low_watermark", "replenish_batch", "auto_replenish"};
    for (const auto& [k, v] : j.items()) {
        if (!known.count(k)) throw Error(Errc::InvalidArgument, "unknown registry config field: " + k);
    }
    RegistryConfig c;
    if (j.contains("data_dir")) c.data_dir = j["data_dir"].get<std::string>();
    if (j.contains("idps")) c.idps = j["idps"].get<std::vector<std::string>>();
    if (j.contains("contributors")) c.contributors = j["contributors"].get<std::vector<std::string>>();
    c.beacon_source = j.value("beacon_source", c.beacon_source);
    c.low_watermark = j.value("low_watermark", c.low_watermark);
    c.replenish_batch = j.value("replenish_batch", c.replenish_batch);
    c.auto_replenish = j.value("auto_replenish", c.auto_replenish);
    return c;
}

/// Blob store keyed by (kind, hex digest): a directory tree, or a map when there is no data dir.
class Registry::Store {
public:
    explicit Store(fs::path root) : root_(std::move(root)) {}

    void put(const std::string& kind, const std::string& key, ByteView bytes)
    {
        if (root_.empty()) {
            mem_[kind][key] = Bytes(bytes.begin(), bytes.end());
        } else {
            write_file_atomic(root_ / kind / key, bytes);
        }
    }
    std::optional<Bytes> get(const std::string& kind, const std::string& key) const
    {
        if (root_.empty()) {
            auto k = mem_.find(kind);
            if (k == mem_.end()) return std::nullopt;
            auto it = k->second.find(key);
            if (it == k->second.end()) return std::nullopt;
            return it->second;
        }
        const fs::path p = root_ / kind / key;
        if (!fs::exists(p)) return std::nullopt;
        return read_file(p);
    }
    void remove(const std::string& kind, const std::string& key)
    {
        if (root_.empty()) {
            mem_[kind].erase(key);
        } else {
            std::error_code ec;
            fs::remove(root_ / kind / key, ec);
        }
    }
    std::vector<std::string> keys(const std::string& kind) const
    {
        std::vector<std::string> out;
        if (root_.empty()) {
            auto k = mem_.find(kind);
            if (k != mem_.end())
                for (const auto& [key, v] : k->second) out.push_back(key);
        } else if (fs::exists(root_ / kind)) {
            for (const auto& e : fs::directory_iterator(root_ / kind)) {
                const auto name = e.path().filename().string();
                if (name.size() == 64) out.push_back(name);
            }
        }
        return out;
    }

private:
    fs::path root_;
    std::map<std::string, std::map<std::string, Bytes>> mem_;
};

Registry::Registry(RegistryConfig config, std::shared_ptr<const ceremony::Phase1Parameters> phase1,
                   circuit::BoilerplateProgram program)
    : config_(std::move(config)), program_(std::move(program))
{
    cs_ = std::make_shared<const circuit::ConstraintSystem>(circuit::compile(program_));
    store_ = std::make_unique<Store>(config_.data_dir);
    if (!config_.data_dir.empty()) fs::create_directories(config_.data_dir);

    if (!phase1) {
        const fs::path p = config_.data_dir.empty() ? fs::path() : config_.data_dir / "phase1.bin";
        if (!p.empty() && fs::exists(p)) {
            phase1 = std::make_shared<const ceremony::Phase1Parameters>(
                ceremony::Phase1Parameters::deserialize(read_file(p)));
        } else {
            const auto n = static_cast<std::uint32_t>(zk::qap_domain_size(*cs_));
            phase1 = std::make_shared<const ceremony::Phase1Parameters>(ceremony::phase1_generate(n, random_bytes(32)));
            if (!p.empty()) write_file_atomic(p, phase1->serialize());
        }
    }
    phase1_ = std::move(phase1);
    phase1_bytes_ = phase1_->serialize();

    auto snap = std::make_shared<Snapshot>();
    snapshot_ = snap;
    replay();
    for (const auto& id : config_.idps) enroll(id);

    if (config_.auto_replenish) start_replenisher();
}

Registry::~Registry() { stop_replenisher(); }

std::shared_ptr<const Registry::Snapshot> Registry::snapshot() const { return std::atomic_load(&snapshot_); }
void Registry::publish(std::shared_ptr<const Snapshot> s) { std::atomic_store(&snapshot_, std::move(s)); }

void Registry::append_log(const std::string& line)
{
    if (config_.data_dir.empty()) return;
    std::ofstream out(config_.data_dir / "registry.log", std::ios::app);
    out << line << '\n';
    out.flush();
    if (!out) throw Error(Errc::InvalidArgument, "cannot append to the registry log");
}

void Registry::replay()
{
    if (config_.data_dir.empty()) return;
    const fs::path log = config_.data_dir / "registry.log";
    auto snap = std::make_shared<Snapshot>();
    std::deque<PendingEntry> pending;
    if (fs::exists(log)) {
        std::ifstream in(log);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            Json j;
            try {
                j = Json::parse(line);
            } catch (const Json::exception&) {
                break;  // torn final line from a crash
            }
            const std::string op = j.at("op");
            if (op == "enroll") {
                snap->idps.insert(j.at("idp").get<std::string>());
            } else if (op == "enqueue") {
                pending.push_back({digest_from_hex(j.at("digest")), digest_from_hex(j.at("transcript"))});
            } else if (op == "allocate") {
                const Digest from = digest_from_hex(j.at("pending"));
                std::erase_if(pending, [&](const PendingEntry& e) { return e.digest == from; });
                snap->history[j.at("idp")].push_back(DigestRecord{j.at("idp"), j.at("version").get<std::uint64_t>(),
                                                                  digest_from_hex(j.at("digest")),
                                                                  j.at("published_at").get<std::int64_t>()});
            }
        }
    }
    // drop entries whose blobs did not survive, and blobs the log never recorded
    std::erase_if(pending, [&](const PendingEntry& e) { return !store_->get("pending", to_hex(e.digest)); });
    std::set<std::string> live;
    for (const auto& e : pending) live.insert(to_hex(e.digest));
    for (const auto& k : store_->keys("pending"))
        if (!live.count(k)) store_->remove("pending", k);
    std::set<std::string> latest;
    for (const auto& [id, h] : snap->history)
        if (!h.empty()) latest.insert(to_hex(h.back().artifact_digest));
    for (const auto& k : store_->keys("delivered"))
        if (!latest.count(k)) store_->remove("delivered", k);

    std::lock_guard lock(mu_);
    pending_ = std::move(pending);
    publish(snap);
}

void Registry::enroll(const std::string& idp_id)
{
    if (idp_id.empty()) throw Error(Errc::InvalidArgument, "IdP id must not be empty");
    std::lock_guard lock(mu_);
    auto s = std::make_shared<Snapshot>(*snapshot());
    if (!s->idps.insert(idp_id).second) return;
    append_log(Json{{"op", "enroll"}, {"idp", idp_id}}.dump());
    publish(s);
}

bool Registry::is_enrolled(const std::string& idp_id) const { return snapshot()->idps.count(idp_id) != 0; }

ZkArtifacts Registry::request_artifacts(const std::string& idp_id)
{
    ZkArtifacts stamped;
    bool low = false;
    {
        std::lock_guard lock(mu_);
        auto cur = snapshot();
        if (!cur->idps.count(idp_id)) throw Error(Errc::UnknownIdP, "IdP '" + idp_id + "' is not enrolled");
        if (pending_.empty()) {
            worker_cv_.notify_all();
            throw Error(Errc::PoolExhausted, "no pooled artifacts; retry after replenishment");
        }
        const PendingEntry entry = pending_.front();
        const std::string pending_key = to_hex(entry.digest);
        const auto bytes = store_->get("pending", pending_key);
        if (!bytes) throw Error(Errc::PoolExhausted, "pooled artifact missing from the store");

        auto s = std::make_shared<Snapshot>(*cur);
        auto& hist = s->history[idp_id];
        const std::uint64_t version = hist.empty() ? 1 : hist.back().version + 1;
        stamped = ZkArtifacts::deserialize(*bytes).with_version(version);
        const DigestRecord rec{idp_id, version, stamped.artifact_digest, now_ms()};

        store_->put("delivered", to_hex(rec.artifact_digest), stamped.serialize());
        append_log(Json{{"op", "allocate"},
                        {"idp", idp_id},
                        {"version", version},
                        {"digest", to_hex(rec.artifact_digest)},
                        {"pending", pending_key},
                        {"published_at", rec.published_at}}
                       .dump());
        // the pooled copy is consumed and the superseded delivery is no longer served
        pending_.pop_front();
        store_->remove("pending", pending_key);
        if (!hist.empty()) store_->remove("delivered", to_hex(hist.back().artifact_digest));
        hist.push_back(rec);
        publish(s);
        low = pending_.size() < config_.low_watermark;
    }
    if (low) worker_cv_.notify_all();
    return stamped;
}

DigestRecord Registry::get_latest_digest(const std::string& idp_id) const
{
    const auto s = snapshot();
    if (!s->idps.count(idp_id)) throw Error(Errc::UnknownIdP, "IdP '" + idp_id + "' is not enrolled");
    auto it = s->history.find(idp_id);
    if (it == s->history.end() || it->second.empty()) {
        throw Error(Errc::NoAllocation, "IdP '" + idp_id + "' has no artifacts yet");
    }
    return it->second.back();
}

std::vector<DigestRecord> Registry::digest_history(const std::string& idp_id) const
{
    const auto s = snapshot();
    if (!s->idps.count(idp_id)) throw Error(Errc::UnknownIdP, "IdP '" + idp_id + "' is not enrolled");
    auto it = s->history.find(idp_id);
    return it == s->history.end() ? std::vector<DigestRecord>{} : it->second;
}

void Registry::replenish(std::size_t count)
{
    if (count == 0) throw Error(Errc::InvalidArgument, "replenish count must be at least 1");
    for (std::size_t i = 0; i < count; ++i) {
        auto state = ceremony::CeremonyState::begin(phase1_, *cs_);
        for (const auto& who : config_.contributors) {
            state = ceremony::contribute(state, who, random_bytes(32)).first;
        }
        const std::string beacon = config_.beacon_source + "|" + std::to_string(now_ms()) + "|" +
                                   std::to_string(beacon_counter_.fetch_add(1));
        auto fin = ceremony::finalize(state, as_bytes(beacon), config_.beacon_source, *cs_, 0);
        ++ceremonies_run_;

        std::lock_guard lock(mu_);
        const std::string key = to_hex(fin.artifacts.artifact_digest);
        const std::string tkey = to_hex(fin.transcript.final_digest);
        store_->put("transcripts", tkey, fin.transcript.serialize());
        if (!config_.data_dir.empty()) {
            write_file_atomic(config_.data_dir / "transcripts" / (tkey + ".manifest.txt"),
                              as_bytes(fin.transcript.manifest()));
        }
        store_->put("pending", key, fin.artifacts.serialize());
        append_log(Json{{"op", "enqueue"}, {"digest", key}, {"transcript", tkey}}.dump());
        pending_.push_back({fin.artifacts.artifact_digest, fin.transcript.final_digest});
    }
}

std::size_t Registry::pending_count() const
{
    std::lock_guard lock(mu_);
    return pending_.size();
}

std::vector<Digest> Registry::pending_digests() const
{
    std::lock_guard lock(mu_);
    std::vector<Digest> out;
    for (const auto& e : pending_) out.push_back(e.digest);
    return out;
}

std::optional<Bytes> Registry::artifact_blob(const Digest& digest) const
{
    std::lock_guard lock(mu_);
    return store_->get("delivered", to_hex(digest));
}

std::optional<Bytes> Registry::transcript_blob(const Digest& transcript_digest) const
{
    std::lock_guard lock(mu_);
    return store_->get("transcripts", to_hex(transcript_digest));
}

std::size_t Registry::stored_artifact_count() const
{
    std::lock_guard lock(mu_);
    return store_->keys("pending").size() + store_->keys("delivered").size();
}

void Registry::start_replenisher()
{
    std::lock_guard lock(worker_mu_);
    if (worker_.joinable()) return;
    stop_worker_ = false;
    worker_ = std::thread([this] { replenisher_loop(); });
}

void Registry::stop_replenisher()
{
    {
        std::lock_guard lock(worker_mu_);
        stop_worker_ = true;
    }
    worker_cv_.notify_all();
    if (worker_.joinable()) worker_.join();
}

void Registry::replenisher_loop()
{
    for (;;) {
        {
            std::unique_lock lock(worker_mu_);
            // timed wait: allocation notifies without holding worker_mu_
            worker_cv_.wait_for(lock, std::chrono::milliseconds(200),
                                [this] { return stop_worker_ || pending_count() < config_.low_watermark; });
            if (stop_worker_) return;
            if (pending_count() >= config_.low_watermark) continue;
        }
        try {
            replenish(std::max<std::size_t>(1, config_.replenish_batch));
        } catch (const std::exception& e) {
            std::cerr << "registry: replenish failed: " << e.what() << "\n";
            std::this_thread::sleep_for(std::chrono::seconds(1));
        }
    }
}

}  // namespace expresso::registry
