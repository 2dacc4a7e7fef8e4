#include "legalir/mining.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "legalir/error.hpp"
#include "legalir/parallel.hpp"
#include "legalir/tokenize.hpp"

namespace legalir {

CutoffStrategy CutoffStrategy::parse(const std::string& text) {
    auto number_after = [&](std::size_t prefix) {
        try {
            std::size_t used = 0;
            const double v = std::stod(text.substr(prefix), &used);
            if (used != text.size() - prefix) throw std::invalid_argument(text);
            return v;
        } catch (const std::exception&) {
            throw UsageError(fmt::format("bad cutoff strategy '{}'", text));
        }
    };
    CutoffStrategy strategy;
    if (text == "mean") {
        strategy = mean();
    } else if (text.rfind("mean+std:", 0) == 0) {
        strategy = mean_plus_std(number_after(9));
    } else if (text.rfind("top:", 0) == 0) {
        strategy = top_fraction(number_after(4));
    } else {
        throw UsageError(fmt::format("unknown cutoff strategy '{}' (mean, mean+std:<alpha>, top:<tau>)", text));
    }
    strategy.validate();
    return strategy;
}

std::string CutoffStrategy::to_string() const {
    switch (kind) {
        case Kind::mean: return "mean";
        case Kind::mean_plus_std: return fmt::format("mean+std:{}", param);
        case Kind::top_fraction: return fmt::format("top:{}", param);
    }
    return "mean";
}

void CutoffStrategy::validate() const {
    if (kind == Kind::mean_plus_std && !(param >= 0.0))
        throw UsageError(fmt::format("mean+std alpha must be >= 0, got {}", param));
    if (kind == Kind::top_fraction && !(param > 0.0 && param <= 1.0))
        throw UsageError(fmt::format("top fraction tau must be in (0, 1], got {}", param));
}

void MiningConfig::validate() const {
    cutoff.validate();
    if (max_negatives < 1) throw UsageError("max_negatives must be >= 1");
    if (min_negatives > max_negatives) throw UsageError("min_negatives must not exceed max_negatives");
    if (candidate_depth < 1) throw UsageError("candidate_depth must be >= 1");
}

std::vector<ScoredDoc> apply_cutoff(std::span<const ScoredDoc> candidates, const CutoffStrategy& strategy) {
    if (candidates.empty()) return {};
    // Equal scores have zero spread; the rounded mean could otherwise land
    // above the common value.
    const bool all_equal = std::all_of(candidates.begin(), candidates.end(),
                                       [&](const ScoredDoc& c) { return c.score == candidates.front().score; });
    if (all_equal && strategy.kind != CutoffStrategy::Kind::top_fraction)
        return {candidates.begin(), candidates.end()};

    double threshold = 0.0;
    if (strategy.kind == CutoffStrategy::Kind::top_fraction) {
        double best = candidates.front().score;
        for (const auto& c : candidates) best = std::max(best, c.score);
        threshold = strategy.param * best;
    } else {
        double sum = 0.0;
        for (const auto& c : candidates) sum += c.score;
        const double mean = sum / static_cast<double>(candidates.size());
        threshold = mean;
        if (strategy.kind == CutoffStrategy::Kind::mean_plus_std) {
            double squares = 0.0;
            for (const auto& c : candidates) squares += (c.score - mean) * (c.score - mean);
            threshold += strategy.param * std::sqrt(squares / static_cast<double>(candidates.size()));
        }
    }
    std::vector<ScoredDoc> kept;
    for (const auto& c : candidates)
        if (c.score >= threshold) kept.push_back(c);
    return kept;
}

MiningOutcome mine_negatives(const Query& query, const Ranking* ranking, const Judgments& judged,
                             const DocumentLookup& corpus, const MiningConfig& config, Source source) {
    MiningOutcome outcome;
    std::vector<std::string> positives;
    for (const auto& [doc, grade] : judged)
        if (grade >= 1) positives.push_back(doc);
    if (positives.empty()) {
        outcome.skip_reason = "no positives";
        return outcome;
    }
    for (const auto& doc : positives)
        if (corpus.find(doc) == nullptr)
            throw Error(fmt::format("positive '{}' of query '{}' is not in the corpus", doc, query.query_id));
    if (ranking == nullptr) {
        outcome.skip_reason = "query missing from run";
        return outcome;
    }

    const std::unordered_set<std::string_view> positive_set(positives.begin(), positives.end());
    std::vector<ScoredDoc> candidates;
    const auto depth = std::min(config.candidate_depth, ranking->size());
    for (std::size_t i = 0; i < depth; ++i)
        if (!positive_set.contains((*ranking)[i].doc_id)) candidates.push_back((*ranking)[i]);

    auto retained = apply_cutoff(candidates, config.cutoff);
    if (retained.size() > config.max_negatives) retained.resize(config.max_negatives);
    if (retained.empty() || retained.size() < config.min_negatives) {
        outcome.skip_reason = retained.empty() ? "no negatives" : "too few negatives";
        return outcome;
    }

    std::vector<Negative> negatives;
    negatives.reserve(retained.size());
    for (const auto& c : retained) {
        const auto* doc = corpus.find(c.doc_id);
        if (doc == nullptr) throw Error(fmt::format("run document '{}' is not in the corpus", c.doc_id));
        negatives.push_back({c.doc_id, doc->indexing_text(), c.score});
    }

    for (const auto& doc_id : positives) {
        TrainingInstance instance;
        instance.query_id = query.query_id;
        instance.query_text = query.text;
        instance.positive.doc_id = doc_id;
        instance.positive.text = corpus.find(doc_id)->indexing_text();
        for (const auto& entry : *ranking)
            if (entry.doc_id == doc_id) {
                instance.positive.score = entry.score;
                break;
            }
        instance.negatives = negatives;
        instance.source = source;
        outcome.instances.push_back(std::move(instance));
    }
    return outcome;
}

std::vector<TrainingInstance> mine_all(std::span<const Query> queries, const RankedRun& run, const QrelsSet& qrels,
                                       const DocumentLookup& corpus, const MiningConfig& config, Source source,
                                       MiningReport* report, unsigned threads) {
    config.validate();
    std::vector<const Query*> judged_queries;
    for (const auto& q : queries)
        if (qrels.find(q.query_id) != nullptr) judged_queries.push_back(&q);

    std::vector<MiningOutcome> outcomes(judged_queries.size());
    parallel_for(judged_queries.size(), threads, [&](std::size_t i) {
        const auto& q = *judged_queries[i];
        outcomes[i] = mine_negatives(q, run.find(q.query_id), *qrels.find(q.query_id), corpus, config, source);
    });

    std::vector<TrainingInstance> instances;
    MiningReport local;
    local.queries = judged_queries.size();
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        auto& outcome = outcomes[i];
        if (outcome.instances.empty()) {
            ++local.skipped[outcome.skip_reason];
            local.skip_log.emplace_back(judged_queries[i]->query_id, outcome.skip_reason);
            continue;
        }
        for (auto& instance : outcome.instances) instances.push_back(std::move(instance));
    }
    local.emitted = instances.size();
    if (report) *report = std::move(local);
    return instances;
}

HygieneResult filter_short_queries(std::vector<TrainingInstance> instances, const MiningConfig& config) {
    std::unordered_map<std::string, std::set<std::string>> positives_by_text;
    for (const auto& instance : instances)
        positives_by_text[normalize_query_text(instance.query_text)].insert(instance.positive.doc_id);

    HygieneResult result;
    result.counts["short"] = 0;
    result.counts["ambiguous"] = 0;
    for (auto& instance : instances) {
        std::string reason;
        if (tokenize(instance.query_text).size() < config.min_query_tokens) reason = "short";
        else if (positives_by_text[normalize_query_text(instance.query_text)].size() >= 2) reason = "ambiguous";

        if (reason.empty()) {
            result.kept.push_back(std::move(instance));
        } else {
            ++result.counts[reason];
            result.dropped.push_back({std::move(instance), reason});
        }
    }
    return result;
}

}  // namespace legalir
