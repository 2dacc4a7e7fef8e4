#include "legalir/mixture.hpp"

#include <chrono>
#include <ctime>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

#include "legalir/error.hpp"
#include "legalir/rng.hpp"

namespace legalir {

namespace {

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::string MixtureManifest::to_json() const {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& s : sources)
        list.push_back({{"tag", s.tag}, {"path", s.path}, {"input_count", s.input_count}, {"kept_count", s.kept_count}});
    const nlohmann::json j{{"sources", std::move(list)}, {"dedup_removed", dedup_removed}, {"total", total},
                           {"seed", seed},           {"prng", prng},                   {"created_at", created_at}};
    return j.dump(2);
}

std::string dedup_key(const TrainingInstance& instance) {
    std::string key = normalize_query_text(instance.query_text);
    key.push_back('\x1f');
    key += instance.positive.doc_id;
    return key;
}

Mixture mix_instances(std::vector<std::pair<std::string, std::vector<TrainingInstance>>> sources, std::uint64_t seed) {
    if (sources.empty()) throw UsageError("a mixture needs at least one source");

    Mixture mixture;
    std::unordered_set<std::string> seen;
    for (auto& [tag, instances] : sources) {
        const Source source = parse_source(tag);
        SourceCount count{tag, "", instances.size(), 0};
        for (auto& instance : instances) {
            if (!seen.insert(dedup_key(instance)).second) {
                ++mixture.manifest.dedup_removed;
                continue;
            }
            instance.source = source;
            mixture.instances.push_back(std::move(instance));
            ++count.kept_count;
        }
        mixture.manifest.sources.push_back(std::move(count));
    }

    Rng rng(seed);
    rng.shuffle(std::span<TrainingInstance>(mixture.instances));
    mixture.manifest.total = mixture.instances.size();
    mixture.manifest.seed = seed;
    mixture.manifest.created_at = utc_timestamp();
    return mixture;
}

Mixture build_mixture(std::span<const MixtureSource> sources, std::uint64_t seed) {
    if (sources.empty()) throw UsageError("a mixture needs at least one source");
    std::vector<std::pair<std::string, std::vector<TrainingInstance>>> loaded;
    for (const auto& source : sources) {
        parse_source(source.tag);
        try {
            loaded.emplace_back(source.tag, read_instances(source.path));
        } catch (const Error& e) {
            throw Error(fmt::format("source '{}': {}", source.tag, e.what()));
        }
    }
    auto mixture = mix_instances(std::move(loaded), seed);
    for (std::size_t i = 0; i < sources.size(); ++i) mixture.manifest.sources[i].path = sources[i].path.string();
    return mixture;
}

MixtureSource parse_mixture_source(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == spec.size())
        throw UsageError(fmt::format("bad source '{}' (expected tag:path)", spec));
    return {spec.substr(0, colon), spec.substr(colon + 1)};
}

}  // namespace legalir
