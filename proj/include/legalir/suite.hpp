#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "legalir/metrics.hpp"

namespace legalir {

struct SuiteDataset {
    std::string name;
    std::filesystem::path qrels;
    std::map<std::string, std::filesystem::path> runs;  // model -> run file
};

/// One JSON document describing a cross-dataset comparison:
///
///   {"models": ["base", ...],
///    "datasets": [{"name": "...", "qrels": "q.txt", "runs": {"base": "r.trec", ...}}, ...],
///    "subsets": {"legal4": ["...", ...], ...}}
///
/// Relative paths resolve against the manifest's directory. Subsets are
/// kept in manifest order.
struct SuiteManifest {
    std::vector<std::string> models;
    std::vector<SuiteDataset> datasets;
    std::vector<std::pair<std::string, std::vector<std::string>>> subsets;

    static SuiteManifest load(const std::filesystem::path& path);
    void validate() const;
};

/// Per-(model, dataset) metric means; nullopt marks a missing run.
struct LeaderboardData {
    std::vector<std::string> models;
    std::vector<std::string> datasets;
    std::vector<std::pair<std::string, std::vector<std::string>>> subsets;
    std::map<std::string, std::map<std::string, std::optional<QueryMetrics>>> cells;
    int k = 10;

    /// Cells document: same layout as the manifest, with
    /// `"cells": {"model": {"ndcg": x, "mrr": y, "map": z} | null}` per dataset.
    static LeaderboardData load_cells(const std::filesystem::path& path);
    std::string to_cells_json() const;

    std::size_t missing_count() const;
    void validate() const;
};

/// Evaluates every run of the manifest (datasets fan out over `threads`).
LeaderboardData evaluate_suite(const SuiteManifest& manifest, const MetricSpec& spec, unsigned threads = 1);

struct LeaderboardTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;       // display strings
    std::vector<std::vector<bool>> bold;               // best per column, ties included
    std::vector<std::vector<std::optional<double>>> values;  // unrounded, nullopt when missing

    std::string to_tsv() const;
    std::string to_markdown() const;
};

/// One row per model. Columns per metric: each dataset, then each subset
/// average. Missing cells print "missing", count as 0 in averages (marked
/// with "*") and are never bolded. Values are rounded once, at print time.
LeaderboardTable emit_leaderboard(const LeaderboardData& data);

}  // namespace legalir
