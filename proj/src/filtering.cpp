#include "legalir/filtering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <json.hpp>

#include "legalir/error.hpp"

namespace legalir {

PriorityWeights PriorityWeights::parse_weights(const std::string& text) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        try {
            std::size_t used = 0;
            const auto item = text.substr(start, end - start);
            values.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(fmt::format("bad weights '{}' (expected w_rank,w_margin,w_pool)", text));
        }
        start = end + 1;
    }
    if (values.size() != 3) throw UsageError(fmt::format("expected three weights, got '{}'", text));
    PriorityWeights weights;
    weights.rank = values[0];
    weights.margin = values[1];
    weights.pool = values[2];
    weights.validate();
    return weights;
}

void PriorityWeights::validate() const {
    if (rank < 0 || margin < 0 || pool < 0) throw UsageError("priority weights must be non-negative");
    if (std::abs(rank + margin + pool - 1.0) > 1e-9)
        throw UsageError(fmt::format("priority weights must sum to 1, got {}", rank + margin + pool));
    if (top_rank < 1) throw UsageError("top rank R must be >= 1");
    if (pool_cap < 1) throw UsageError("pool cap P must be >= 1");
}

RecoverabilityResult recoverability_filter(TrainingInstance& instance, const Ranking* ranking, int top_rank) {
    RecoverabilityResult result;
    if (ranking == nullptr) {
        result.reason = "query missing from run";
        return result;
    }
    for (std::size_t i = 0; i < ranking->size(); ++i) {
        if ((*ranking)[i].doc_id != instance.positive.doc_id) continue;
        const int rank = static_cast<int>(i) + 1;
        result.positive_rank = rank;
        if (rank <= top_rank) {
            result.keep = true;
            instance.positive.rank = rank;
            instance.positive.score = (*ranking)[i].score;
        } else {
            result.reason = "positive below rank bound";
        }
        return result;
    }
    result.reason = "positive not retrieved";
    return result;
}

double priority_score(const TrainingInstance& instance, const PriorityWeights& weights) {
    if (!instance.positive.rank || *instance.positive.rank < 1)
        throw Error(fmt::format("instance for query '{}' has no positive rank", instance.query_id));
    if (!instance.positive.score)
        throw Error(fmt::format("instance for query '{}' has no positive score", instance.query_id));

    const double rank_term = 1.0 / static_cast<double>(*instance.positive.rank);
    double margin_term = 1.0;
    if (!instance.negatives.empty()) {
        double best = instance.negatives.front().score;
        for (const auto& n : instance.negatives) best = std::max(best, n.score);
        const double margin = *instance.positive.score - best;
        margin_term = (margin / (1.0 + std::abs(margin)) + 1.0) / 2.0;
    }
    const double pool_term =
        std::min(static_cast<double>(instance.negatives.size()) / static_cast<double>(weights.pool_cap), 1.0);
    return weights.rank * rank_term + weights.margin * margin_term + weights.pool * pool_term;
}

Selection select_top(std::vector<TrainingInstance> instances, std::size_t n, const PriorityWeights& weights) {
    weights.validate();
    if (n < 1) throw UsageError("selection size must be >= 1");

    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(instances.size());
    for (std::size_t i = 0; i < instances.size(); ++i) order.emplace_back(priority_score(instances[i], weights), i);
    std::stable_sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        const auto& x = instances[a.second];
        const auto& y = instances[b.second];
        if (x.query_id != y.query_id) return x.query_id < y.query_id;
        return x.positive.doc_id < y.positive.doc_id;
    });

    Selection selection;
    selection.manifest.input_count = instances.size();
    selection.manifest.requested = n;
    selection.manifest.weights = weights;
    if (n > instances.size())
        selection.manifest.warnings.push_back(
            fmt::format("requested {} instances but only {} are available; keeping all", n, instances.size()));
    const auto keep = std::min(n, instances.size());
    selection.selected.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) selection.selected.push_back(std::move(instances[order[i].second]));
    selection.manifest.selected = keep;
    selection.manifest.not_selected = instances.size() - keep;
    return selection;
}

Selection filter_and_select(std::vector<TrainingInstance> instances, const RankedRun& run, std::size_t n,
                            const PriorityWeights& weights) {
    weights.validate();
    std::vector<TrainingInstance> recovered;
    std::size_t dropped = 0;
    for (auto& instance : instances) {
        if (recoverability_filter(instance, run.find(instance.query_id), weights.top_rank).keep)
            recovered.push_back(std::move(instance));
        else
            ++dropped;
    }
    auto selection = select_top(std::move(recovered), n, weights);
    selection.manifest.input_count = instances.size();
    selection.manifest.recoverability_dropped = dropped;
    return selection;
}

std::string manifest_to_json(const SelectionManifest& manifest) {
    const nlohmann::json j{
        {"input_count", manifest.input_count},
        {"recoverability_dropped", manifest.recoverability_dropped},
        {"requested", manifest.requested},
        {"selected", manifest.selected},
        {"not_selected", manifest.not_selected},
        {"weights",
         {{"rank", manifest.weights.rank}, {"margin", manifest.weights.margin}, {"pool", manifest.weights.pool}}},
        {"top_rank", manifest.weights.top_rank},
        {"pool_cap", manifest.weights.pool_cap},
        {"warnings", manifest.warnings},
    };
    return j.dump(2);
}

}  // namespace legalir
