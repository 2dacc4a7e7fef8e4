#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "legalir/corpus.hpp"
#include "legalir/instance.hpp"

namespace legalir {

struct PriorityWeights {
    double rank = 0.4;
    double margin = 0.4;
    double pool = 0.2;
    int top_rank = 100;  // recoverability bound R
    int pool_cap = 20;   // pool-size normalizer P

    /// Parses "0.4,0.4,0.2" into the three weights.
    static PriorityWeights parse_weights(const std::string& text);
    void validate() const;
};

struct RecoverabilityResult {
    bool keep = false;
    std::optional<int> positive_rank;
    std::string reason;  // set when dropped
};

/// Keeps the instance iff its positive sits at rank <= top_rank in `ranking`.
/// On keep, the observed rank and first-stage score are attached to the
/// instance's positive. `ranking` is null when the query is absent.
RecoverabilityResult recoverability_filter(TrainingInstance& instance, const Ranking* ranking, int top_rank);

/// w_rank / rank + w_margin * (s(m) + 1) / 2 + w_pool * min(|neg| / P, 1),
/// with s(m) = m / (1 + |m|) and m = positive score - best negative score.
/// An empty pool has margin term 1. Requires positive rank and score.
double priority_score(const TrainingInstance& instance, const PriorityWeights& weights);

struct SelectionManifest {
    std::size_t input_count = 0;
    std::size_t recoverability_dropped = 0;
    std::size_t requested = 0;
    std::size_t selected = 0;
    std::size_t not_selected = 0;
    PriorityWeights weights;
    std::vector<std::string> warnings;
};

struct Selection {
    std::vector<TrainingInstance> selected;
    SelectionManifest manifest;
};

/// Sorts by (priority desc, query_id asc, positive doc_id asc) and keeps
/// the first `n`.
Selection select_top(std::vector<TrainingInstance> instances, std::size_t n, const PriorityWeights& weights);

/// Recoverability filter followed by selection; the manifest counts both.
Selection filter_and_select(std::vector<TrainingInstance> instances, const RankedRun& run, std::size_t n,
                            const PriorityWeights& weights);

std::string manifest_to_json(const SelectionManifest& manifest);

}  // namespace legalir
