#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "drst/error.hpp"

namespace drst {

enum class ModelKind { mlp, lstm, dirrec };

const char* model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& s);

struct ArtifactManifest {
    std::uint64_t version = 0;
    ModelKind kind = ModelKind::mlp;
    std::string created_at;  // ISO-8601 UTC
    std::string config_digest;
    std::string schema_hash;
    double final_loss = 0.0;
    double validation_r2 = 0.0;
    std::optional<std::uint64_t> parent_version;
    std::string payload_digest;

    std::string to_json() const;
    static ArtifactManifest from_json(const std::string& text);
};

struct PublishMeta {
    ModelKind kind = ModelKind::mlp;
    std::string config_digest;
    std::string schema_hash;
    double final_loss = 0.0;
    double validation_r2 = 0.0;
    std::optional<std::uint64_t> parent_version;
};

// File-backed versioned store. Layout under the root:
//   000001/payload        model bytes
//   000001/manifest.json  committed marker + metadata (written last)
//   ACTIVE                optional rollback alias holding a version number
// Every file lands via write-to-temp + atomic rename, and a version directory
// only counts once its manifest exists, so readers never observe a partial
// publish. Single writer, many readers.
class Registry {
public:
    explicit Registry(std::filesystem::path root);

    // test hook: invoked after each named write boundary so crash points can
    // be injected ("payload_temp", "payload_renamed", "manifest_temp",
    // "manifest_renamed", "alias_cleared")
    using FaultHook = std::function<void(const std::string& step)>;

    std::uint64_t publish(const std::string& payload, const PublishMeta& meta,
                          const FaultHook& hook = {});

    struct Loaded {
        ArtifactManifest manifest;
        std::string payload;
    };

    // highest committed version of the kind, or the ACTIVE alias when set
    Loaded latest(ModelKind kind) const;
    Loaded load(std::uint64_t version) const;

    // marks an existing version active; the next publish clears the alias
    std::uint64_t rollback(std::uint64_t version);

    std::vector<ArtifactManifest> list() const;
    std::optional<std::uint64_t> active_alias() const;

    const std::filesystem::path& root() const { return root_; }

private:
    std::filesystem::path root_;

    std::filesystem::path version_dir(std::uint64_t v) const;
    std::vector<std::uint64_t> committed_versions() const;
};

}  // namespace drst
