#include "drst/registry.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "drst/sha256.hpp"

namespace drst {

namespace fs = std::filesystem;
using nlohmann::json;

const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::mlp: return "mlp";
        case ModelKind::lstm: return "lstm";
        case ModelKind::dirrec: return "dirrec";
    }
    return "?";
}

ModelKind model_kind_from_name(const std::string& s) {
    if (s == "mlp") return ModelKind::mlp;
    if (s == "lstm") return ModelKind::lstm;
    if (s == "dirrec") return ModelKind::dirrec;
    fail(Errc::parse_error, "unknown model kind '" + s + "'");
}

std::string ArtifactManifest::to_json() const {
    json doc;
    doc["version"] = version;
    doc["kind"] = model_kind_name(kind);
    doc["created_at"] = created_at;
    doc["config_digest"] = config_digest;
    doc["schema_hash"] = schema_hash;
    doc["metrics"]["final_loss"] = final_loss;
    doc["metrics"]["validation_r2"] = validation_r2;
    if (parent_version) doc["parent_version"] = *parent_version;
    doc["payload_digest"] = payload_digest;
    return doc.dump(2);
}

ArtifactManifest ArtifactManifest::from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(Errc::storage_failure, std::string("manifest: ") + e.what());
    }
    ArtifactManifest m;
    m.version = doc.at("version").get<std::uint64_t>();
    m.kind = model_kind_from_name(doc.at("kind").get<std::string>());
    m.created_at = doc.value("created_at", "");
    m.config_digest = doc.value("config_digest", "");
    m.schema_hash = doc.value("schema_hash", "");
    if (doc.contains("metrics")) {
        m.final_loss = doc["metrics"].value("final_loss", 0.0);
        m.validation_r2 = doc["metrics"].value("validation_r2", 0.0);
    }
    if (doc.contains("parent_version"))
        m.parent_version = doc["parent_version"].get<std::uint64_t>();
    m.payload_digest = doc.value("payload_digest", "");
    return m;
}

namespace {

std::string now_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file_atomic(const fs::path& target, const std::string& data,
                       const Registry::FaultHook& hook, const std::string& temp_step,
                       const std::string& rename_step) {
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(Errc::storage_failure, "cannot write " + tmp.string());
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        out.flush();
        if (!out) fail(Errc::storage_failure, "short write to " + tmp.string());
    }
    if (hook) hook(temp_step);
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) fail(Errc::storage_failure, "rename failed: " + ec.message());
    if (hook) hook(rename_step);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::storage_failure, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

Registry::Registry(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) fail(Errc::storage_failure, "cannot create registry root: " + ec.message());
}

fs::path Registry::version_dir(std::uint64_t v) const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%06llu", static_cast<unsigned long long>(v));
    return root_ / buf;
}

std::vector<std::uint64_t> Registry::committed_versions() const {
    std::vector<std::uint64_t> out;
    for (const auto& entry : fs::directory_iterator(root_)) {
        if (!entry.is_directory()) continue;
        const std::string name = entry.path().filename().string();
        if (name.empty() || name.find_first_not_of("0123456789") != std::string::npos) continue;
        if (!fs::exists(entry.path() / "manifest.json")) continue;  // uncommitted
        out.push_back(std::strtoull(name.c_str(), nullptr, 10));
    }
    std::sort(out.begin(), out.end());
    return out;
}

// versions are assigned from every directory ever created, committed or not,
// so an interrupted publish can never cause number reuse
std::uint64_t Registry::publish(const std::string& payload, const PublishMeta& meta,
                                const FaultHook& hook) {
    std::uint64_t max_seen = 0;
    for (const auto& entry : fs::directory_iterator(root_)) {
        if (!entry.is_directory()) continue;
        const std::string name = entry.path().filename().string();
        if (name.empty() || name.find_first_not_of("0123456789") != std::string::npos) continue;
        max_seen = std::max<std::uint64_t>(max_seen, std::strtoull(name.c_str(), nullptr, 10));
    }
    const std::uint64_t version = max_seen + 1;
    const fs::path dir = version_dir(version);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(Errc::storage_failure, "cannot create version dir: " + ec.message());

    write_file_atomic(dir / "payload", payload, hook, "payload_temp", "payload_renamed");

    ArtifactManifest manifest;
    manifest.version = version;
    manifest.kind = meta.kind;
    manifest.created_at = now_iso8601();
    manifest.config_digest = meta.config_digest;
    manifest.schema_hash = meta.schema_hash;
    manifest.final_loss = meta.final_loss;
    manifest.validation_r2 = meta.validation_r2;
    manifest.parent_version = meta.parent_version;
    manifest.payload_digest = sha256_hex(payload);

    // the manifest rename is the commit point
    write_file_atomic(dir / "manifest.json", manifest.to_json(), hook, "manifest_temp",
                      "manifest_renamed");

    fs::remove(root_ / "ACTIVE", ec);  // publish supersedes any rollback alias
    if (hook) hook("alias_cleared");
    return version;
}

Registry::Loaded Registry::load(std::uint64_t version) const {
    const fs::path dir = version_dir(version);
    if (!fs::exists(dir / "manifest.json"))
        fail(Errc::unknown_version, "version " + std::to_string(version) + " not committed");
    Loaded out;
    out.manifest = ArtifactManifest::from_json(read_file(dir / "manifest.json"));
    out.payload = read_file(dir / "payload");
    if (sha256_hex(out.payload) != out.manifest.payload_digest)
        fail(Errc::storage_failure, "payload digest mismatch for version " + std::to_string(version));
    return out;
}

std::optional<std::uint64_t> Registry::active_alias() const {
    const fs::path alias = root_ / "ACTIVE";
    if (!fs::exists(alias)) return std::nullopt;
    const std::string text = read_file(alias);
    return std::strtoull(text.c_str(), nullptr, 10);
}

Registry::Loaded Registry::latest(ModelKind kind) const {
    if (const auto alias = active_alias()) {
        Loaded pinned = load(*alias);
        if (pinned.manifest.kind == kind) return pinned;
    }
    const auto versions = committed_versions();
    for (auto it = versions.rbegin(); it != versions.rend(); ++it) {
        Loaded candidate = load(*it);
        if (candidate.manifest.kind == kind) return candidate;
    }
    fail(Errc::empty_registry, std::string("no committed ") + model_kind_name(kind) + " artifact");
}

std::uint64_t Registry::rollback(std::uint64_t version) {
    if (!fs::exists(version_dir(version) / "manifest.json"))
        fail(Errc::unknown_version, "version " + std::to_string(version) + " not committed");
    write_file_atomic(root_ / "ACTIVE", std::to_string(version), {}, "", "");
    return version;
}

std::vector<ArtifactManifest> Registry::list() const {
    std::vector<ArtifactManifest> out;
    for (const auto v : committed_versions())
        out.push_back(ArtifactManifest::from_json(read_file(version_dir(v) / "manifest.json")));
    return out;
}

}  // namespace drst
