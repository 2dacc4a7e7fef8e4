#include "legalir/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <unordered_set>

#include <fmt/format.h>

#include "legalir/error.hpp"

namespace legalir {

void MetricSpec::validate() const {
    if (k < 1) throw UsageError(fmt::format("metric cutoff k must be >= 1, got {}", k));
    if (rel_threshold < 1) throw UsageError(fmt::format("relevance threshold must be >= 1, got {}", rel_threshold));
}

namespace {

double gain(int grade, Gain kind) {
    if (grade <= 0) return 0.0;
    return kind == Gain::linear ? static_cast<double>(grade) : std::exp2(static_cast<double>(grade)) - 1.0;
}

int grade_of(const Judgments& judged, const std::string& doc_id) {
    const auto it = judged.find(doc_id);
    return it == judged.end() ? 0 : it->second;
}

std::size_t cutoff(std::span<const std::string> ranking, const MetricSpec& spec) {
    return std::min(ranking.size(), static_cast<std::size_t>(spec.k));
}

}  // namespace

double ndcg_at_k(std::span<const std::string> ranking, const Judgments& judged, const MetricSpec& spec) {
    double dcg = 0.0;
    for (std::size_t i = 0; i < cutoff(ranking, spec); ++i)
        dcg += gain(grade_of(judged, ranking[i]), spec.gain) / std::log2(static_cast<double>(i) + 2.0);

    std::vector<int> ideal;
    for (const auto& [doc, grade] : judged)
        if (grade > 0) ideal.push_back(grade);
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    double idcg = 0.0;
    for (std::size_t i = 0; i < ideal.size() && i < static_cast<std::size_t>(spec.k); ++i)
        idcg += gain(ideal[i], spec.gain) / std::log2(static_cast<double>(i) + 2.0);
    return idcg > 0.0 ? dcg / idcg : 0.0;
}

double mrr_at_k(std::span<const std::string> ranking, const Judgments& judged, const MetricSpec& spec) {
    for (std::size_t i = 0; i < cutoff(ranking, spec); ++i)
        if (grade_of(judged, ranking[i]) >= spec.rel_threshold) return 1.0 / static_cast<double>(i + 1);
    return 0.0;
}

double map_at_k(std::span<const std::string> ranking, const Judgments& judged, const MetricSpec& spec) {
    std::size_t relevant_total = 0;
    for (const auto& [doc, grade] : judged)
        if (grade >= spec.rel_threshold) ++relevant_total;
    if (relevant_total == 0) return 0.0;

    double precision_sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < cutoff(ranking, spec); ++i) {
        if (grade_of(judged, ranking[i]) < spec.rel_threshold) continue;
        ++hits;
        precision_sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
    auto denominator = static_cast<double>(relevant_total);
    if (spec.map_denominator == MapDenominator::min_relevant_k)
        denominator = std::min(denominator, static_cast<double>(spec.k));
    return precision_sum / denominator;
}

std::vector<std::string> doc_ids(const Ranking& ranking) {
    std::vector<std::string> ids;
    ids.reserve(ranking.size());
    for (const auto& entry : ranking) ids.push_back(entry.doc_id);
    return ids;
}

DatasetReport evaluate_run(const RankedRun& run, const QrelsSet& qrels, const MetricSpec& spec) {
    spec.validate();
    if (qrels.empty()) throw Error("cannot evaluate against empty qrels");

    DatasetReport report;
    double ndcg = 0.0, mrr = 0.0, map = 0.0;
    for (const auto& [qid, judged] : qrels.judgments()) {
        QueryMetrics metrics;
        if (const auto* ranking = run.find(qid)) {
            const auto ids = doc_ids(*ranking);
            std::unordered_set<std::string_view> unique(ids.begin(), ids.end());
            if (unique.size() != ids.size()) throw Error(fmt::format("run has duplicate documents for query '{}'", qid));
            metrics = {ndcg_at_k(ids, judged, spec), mrr_at_k(ids, judged, spec), map_at_k(ids, judged, spec)};
        } else {
            report.missing_queries.push_back(qid);
        }
        ndcg += metrics.ndcg;
        mrr += metrics.mrr;
        map += metrics.map;
        report.per_query.emplace(qid, metrics);
    }
    const auto n = static_cast<double>(qrels.query_count());
    report.mean = {ndcg / n, mrr / n, map / n};
    return report;
}

MetricReport aggregate_report(std::map<std::string, DatasetReport> per_dataset) {
    MetricReport report;
    std::map<std::string, double> ndcg, mrr, map;
    for (const auto& [name, dataset] : per_dataset) {
        ndcg[name] = dataset.mean.ndcg;
        mrr[name] = dataset.mean.mrr;
        map[name] = dataset.mean.map;
    }
    if (!per_dataset.empty()) report.aggregate = {aggregate_datasets(ndcg), aggregate_datasets(mrr), aggregate_datasets(map)};
    report.per_dataset = std::move(per_dataset);
    return report;
}

double aggregate_datasets(const std::map<std::string, double>& per_dataset,
                          const std::optional<std::vector<std::string>>& subset) {
    std::set<std::string_view> selected;
    if (subset) {
        for (const auto& name : *subset) {
            if (!per_dataset.contains(name)) throw Error(fmt::format("unknown dataset '{}' in subset", name));
            if (!selected.insert(name).second) throw Error(fmt::format("dataset '{}' listed twice in subset", name));
        }
    }
    // Summed in name order, so any listing of the same selection gives the
    // same bits.
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& [name, value] : per_dataset) {
        if (subset && !selected.contains(name)) continue;
        sum += value;
        ++count;
    }
    if (count == 0) throw Error("cannot aggregate an empty dataset selection");
    return sum / static_cast<double>(count);
}

std::string format_metric(double value) { return fmt::format("{:.3f}", value); }

std::vector<MetricRequest> parse_metric_list(const std::string& list) {
    std::vector<MetricRequest> out;
    std::size_t start = 0;
    while (start <= list.size()) {
        auto end = list.find(',', start);
        if (end == std::string::npos) end = list.size();
        auto item = list.substr(start, end - start);
        start = end + 1;
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (item.empty()) continue;
        const auto at = item.find('@');
        const auto name = item.substr(0, at);
        int k = 10;
        if (at != std::string::npos) {
            try {
                std::size_t used = 0;
                k = std::stoi(item.substr(at + 1), &used);
                if (used != item.size() - at - 1) throw std::invalid_argument(item);
            } catch (const std::exception&) {
                throw UsageError(fmt::format("bad metric cutoff in '{}'", item));
            }
        }
        if (k < 1) throw UsageError(fmt::format("metric cutoff must be >= 1 in '{}'", item));
        if (name == "ndcg") out.push_back({MetricKind::ndcg, k});
        else if (name == "mrr") out.push_back({MetricKind::mrr, k});
        else if (name == "map") out.push_back({MetricKind::map, k});
        else throw UsageError(fmt::format("unknown metric '{}'", name));
    }
    if (out.empty()) throw UsageError("no metrics requested");
    return out;
}

std::string metric_label(const MetricRequest& request) {
    const char* name = request.kind == MetricKind::ndcg ? "ndcg" : request.kind == MetricKind::mrr ? "mrr" : "map";
    return fmt::format("{}@{}", name, request.k);
}

}  // namespace legalir
