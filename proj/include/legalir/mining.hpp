#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "legalir/corpus.hpp"
#include "legalir/instance.hpp"

namespace legalir {

/// Score threshold rule for hard-negative candidates.
struct CutoffStrategy {
    enum class Kind { mean, mean_plus_std, top_fraction };

    Kind kind = Kind::mean;
    double param = 0.0;  // alpha for mean_plus_std, tau for top_fraction

    static CutoffStrategy mean() { return {Kind::mean, 0.0}; }
    static CutoffStrategy mean_plus_std(double alpha) { return {Kind::mean_plus_std, alpha}; }
    static CutoffStrategy top_fraction(double tau) { return {Kind::top_fraction, tau}; }

    /// "mean", "mean+std:<alpha>" or "top:<tau>".
    static CutoffStrategy parse(const std::string& text);
    std::string to_string() const;
    void validate() const;
};

struct MiningConfig {
    CutoffStrategy cutoff;
    std::size_t max_negatives = 20;
    std::size_t min_negatives = 1;
    std::size_t candidate_depth = 100;
    std::size_t min_query_tokens = 4;

    void validate() const;
};

/// Keeps candidates scoring at or above the strategy's threshold, in input
/// order. Candidates must already exclude positives.
std::vector<ScoredDoc> apply_cutoff(std::span<const ScoredDoc> candidates, const CutoffStrategy& strategy);

struct MiningOutcome {
    std::vector<TrainingInstance> instances;  // one per positive
    std::string skip_reason;                  // set when nothing was emitted
};

/// Builds one instance per positive (grade >= 1) of the query. `ranking`
/// may be null when the query is missing from the run.
MiningOutcome mine_negatives(const Query& query, const Ranking* ranking, const Judgments& judged,
                             const DocumentLookup& corpus, const MiningConfig& config, Source source);

struct MiningReport {
    std::size_t queries = 0;
    std::size_t emitted = 0;
    std::map<std::string, std::size_t> skipped;  // reason -> count
    std::vector<std::pair<std::string, std::string>> skip_log;  // (query_id, reason)
};

/// Mines every query that has judgments, in query-file order.
std::vector<TrainingInstance> mine_all(std::span<const Query> queries, const RankedRun& run, const QrelsSet& qrels,
                                       const DocumentLookup& corpus, const MiningConfig& config, Source source,
                                       MiningReport* report = nullptr, unsigned threads = 1);

struct DroppedInstance {
    TrainingInstance instance;
    std::string reason;  // "short" or "ambiguous"
};

struct HygieneResult {
    std::vector<TrainingInstance> kept;
    std::vector<DroppedInstance> dropped;
    std::map<std::string, std::size_t> counts;  // reason -> count
};

/// Drops queries shorter than `min_query_tokens` tokens ("short") and query
/// texts paired with two or more distinct positives ("ambiguous").
HygieneResult filter_short_queries(std::vector<TrainingInstance> instances, const MiningConfig& config);

}  // namespace legalir
