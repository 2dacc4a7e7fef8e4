#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "legalir/instance.hpp"

namespace legalir {

struct MixtureSource {
    std::string tag;
    std::filesystem::path path;
};

struct SourceCount {
    std::string tag;
    std::string path;
    std::size_t input_count = 0;
    std::size_t kept_count = 0;
};

struct MixtureManifest {
    std::vector<SourceCount> sources;
    std::size_t dedup_removed = 0;
    std::size_t total = 0;
    std::uint64_t seed = 0;
    std::string created_at;  // UTC, ISO 8601
    std::string prng = "mt19937_64/fisher-yates";

    std::string to_json() const;
};

struct Mixture {
    std::vector<TrainingInstance> instances;
    MixtureManifest manifest;
};

/// (normalized query text, positive doc_id)
std::string dedup_key(const TrainingInstance& instance);

/// Concatenates sources in order, drops exact duplicates (first occurrence
/// wins, retagged with its source), then shuffles with the seeded PRNG.
Mixture mix_instances(std::vector<std::pair<std::string, std::vector<TrainingInstance>>> sources, std::uint64_t seed);

/// Reads each `tag:path` source and mixes them.
Mixture build_mixture(std::span<const MixtureSource> sources, std::uint64_t seed);

/// Parses "tag:path".
MixtureSource parse_mixture_source(const std::string& spec);

}  // namespace legalir
