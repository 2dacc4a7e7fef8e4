#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "legalir/corpus.hpp"

namespace legalir {

enum class Gain { linear, exponential };

/// Denominator of truncated average precision.
enum class MapDenominator {
    all_relevant,    // R, the trec_eval cut convention
    min_relevant_k,  // min(R, k)
};

struct MetricSpec {
    int k = 10;
    Gain gain = Gain::linear;
    int rel_threshold = 1;  // grade >= threshold is relevant for MRR and MAP
    MapDenominator map_denominator = MapDenominator::all_relevant;

    void validate() const;
};

struct QueryMetrics {
    double ndcg = 0.0;
    double mrr = 0.0;
    double map = 0.0;

    bool operator==(const QueryMetrics&) const = default;
};

// Rankings are doc ids in rank order, without duplicates.
double ndcg_at_k(std::span<const std::string> ranking, const Judgments& judged, const MetricSpec& spec);
double mrr_at_k(std::span<const std::string> ranking, const Judgments& judged, const MetricSpec& spec);
double map_at_k(std::span<const std::string> ranking, const Judgments& judged, const MetricSpec& spec);

std::vector<std::string> doc_ids(const Ranking& ranking);

struct DatasetReport {
    std::map<std::string, QueryMetrics> per_query;
    QueryMetrics mean;
    std::vector<std::string> missing_queries;  // judged but absent from the run
};

/// Evaluates every judged query; queries absent from the run score 0.
DatasetReport evaluate_run(const RankedRun& run, const QrelsSet& qrels, const MetricSpec& spec);

struct MetricReport {
    std::map<std::string, DatasetReport> per_dataset;
    QueryMetrics aggregate;  // unweighted mean over datasets
};

MetricReport aggregate_report(std::map<std::string, DatasetReport> per_dataset);

/// Unweighted mean over the selected datasets (all of them when no subset
/// is given). Throws on an unknown name or an empty selection.
double aggregate_datasets(const std::map<std::string, double>& per_dataset,
                          const std::optional<std::vector<std::string>>& subset = std::nullopt);

/// Display rounding, three decimals.
std::string format_metric(double value);

enum class MetricKind { ndcg, mrr, map };

struct MetricRequest {
    MetricKind kind;
    int k;
};

/// Parses "ndcg@10,mrr@10,map@10".
std::vector<MetricRequest> parse_metric_list(const std::string& list);
std::string metric_label(const MetricRequest& request);

}  // namespace legalir
