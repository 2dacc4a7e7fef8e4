#include "legalir/suite.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "legalir/error.hpp"
#include "legalir/parallel.hpp"
#include "text_io.hpp"

namespace legalir {

using nlohmann::json;

namespace {

json read_json(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(fmt::format("'{}': invalid JSON: {}", path.string(), e.what()));
    }
}

std::vector<std::pair<std::string, std::vector<std::string>>> read_subsets(const json& doc) {
    std::vector<std::pair<std::string, std::vector<std::string>>> subsets;
    if (!doc.contains("subsets")) return subsets;
    // nlohmann::json objects iterate in key order; an array of
    // {"name":..., "datasets":[...]} keeps an explicit order instead.
    if (doc["subsets"].is_array()) {
        for (const auto& s : doc["subsets"])
            subsets.emplace_back(s.at("name").get<std::string>(), s.at("datasets").get<std::vector<std::string>>());
    } else {
        for (const auto& [name, list] : doc["subsets"].items()) subsets.emplace_back(name, list.get<std::vector<std::string>>());
    }
    return subsets;
}

json subsets_json(const std::vector<std::pair<std::string, std::vector<std::string>>>& subsets) {
    json out = json::array();
    for (const auto& [name, list] : subsets) out.push_back({{"name", name}, {"datasets", list}});
    return out;
}

void check_subsets(const std::vector<std::pair<std::string, std::vector<std::string>>>& subsets,
                   const std::set<std::string>& names) {
    for (const auto& [subset, list] : subsets) {
        if (list.empty()) throw Error(fmt::format("subset '{}' is empty", subset));
        for (const auto& d : list)
            if (!names.contains(d)) throw Error(fmt::format("subset '{}' names unknown dataset '{}'", subset, d));
    }
}

}  // namespace

SuiteManifest SuiteManifest::load(const std::filesystem::path& path) {
    const auto doc = read_json(path);
    const auto base = path.parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path q(p);
        return q.is_absolute() ? q : base / q;
    };
    SuiteManifest manifest;
    try {
        manifest.models = doc.at("models").get<std::vector<std::string>>();
        for (const auto& d : doc.at("datasets")) {
            SuiteDataset dataset;
            dataset.name = d.at("name").get<std::string>();
            dataset.qrels = resolve(d.at("qrels").get<std::string>());
            if (d.contains("runs"))
                for (const auto& [model, run] : d["runs"].items()) dataset.runs[model] = resolve(run.get<std::string>());
            manifest.datasets.push_back(std::move(dataset));
        }
        manifest.subsets = read_subsets(doc);
    } catch (const json::exception& e) {
        throw Error(fmt::format("'{}': bad suite manifest: {}", path.string(), e.what()));
    }
    manifest.validate();
    return manifest;
}

void SuiteManifest::validate() const {
    if (models.empty()) throw Error("suite manifest lists no models");
    if (datasets.empty()) throw Error("suite manifest lists no datasets");
    std::set<std::string> names;
    for (const auto& d : datasets)
        if (!names.insert(d.name).second) throw Error(fmt::format("duplicate dataset '{}'", d.name));
    std::set<std::string> model_set(models.begin(), models.end());
    if (model_set.size() != models.size()) throw Error("duplicate model names in manifest");
    for (const auto& d : datasets)
        for (const auto& [model, path] : d.runs)
            if (!model_set.contains(model))
                throw Error(fmt::format("dataset '{}' has a run for unlisted model '{}'", d.name, model));
    check_subsets(subsets, names);
}

std::size_t LeaderboardData::missing_count() const {
    std::size_t n = 0;
    for (const auto& model : models)
        for (const auto& dataset : datasets) {
            const auto m = cells.find(model);
            if (m == cells.end() || !m->second.contains(dataset) || !m->second.at(dataset)) ++n;
        }
    return n;
}

void LeaderboardData::validate() const {
    if (models.empty() || datasets.empty()) throw Error("leaderboard needs at least one model and one dataset");
    check_subsets(subsets, std::set<std::string>(datasets.begin(), datasets.end()));
}

LeaderboardData LeaderboardData::load_cells(const std::filesystem::path& path) {
    const auto doc = read_json(path);
    LeaderboardData data;
    try {
        data.models = doc.at("models").get<std::vector<std::string>>();
        data.k = doc.value("k", 10);
        for (const auto& d : doc.at("datasets")) {
            const auto name = d.at("name").get<std::string>();
            data.datasets.push_back(name);
            for (const auto& model : data.models) {
                std::optional<QueryMetrics> cell;
                if (d.contains("cells") && d["cells"].contains(model) && !d["cells"][model].is_null()) {
                    const auto& c = d["cells"][model];
                    cell = QueryMetrics{c.at("ndcg").get<double>(), c.at("mrr").get<double>(), c.at("map").get<double>()};
                }
                data.cells[model][name] = cell;
            }
        }
        data.subsets = read_subsets(doc);
    } catch (const json::exception& e) {
        throw Error(fmt::format("'{}': bad cells document: {}", path.string(), e.what()));
    }
    data.validate();
    return data;
}

std::string LeaderboardData::to_cells_json() const {
    json list = json::array();
    for (const auto& name : datasets) {
        json cells_json = json::object();
        for (const auto& model : models) {
            const auto& cell = cells.at(model).at(name);
            cells_json[model] = cell ? json{{"ndcg", cell->ndcg}, {"mrr", cell->mrr}, {"map", cell->map}} : json(nullptr);
        }
        list.push_back({{"name", name}, {"cells", std::move(cells_json)}});
    }
    const json doc{{"models", models}, {"k", k}, {"datasets", std::move(list)}, {"subsets", subsets_json(subsets)}};
    return doc.dump(2);
}

LeaderboardData evaluate_suite(const SuiteManifest& manifest, const MetricSpec& spec, unsigned threads) {
    manifest.validate();
    spec.validate();
    LeaderboardData data;
    data.models = manifest.models;
    data.subsets = manifest.subsets;
    data.k = spec.k;
    for (const auto& d : manifest.datasets) data.datasets.push_back(d.name);

    std::vector<std::map<std::string, std::optional<QueryMetrics>>> per_dataset(manifest.datasets.size());
    parallel_for(manifest.datasets.size(), threads, [&](std::size_t i) {
        const auto& dataset = manifest.datasets[i];
        const auto qrels = load_qrels(dataset.qrels);
        for (const auto& model : manifest.models) {
            std::optional<QueryMetrics> cell;
            const auto it = dataset.runs.find(model);
            if (it != dataset.runs.end() && std::filesystem::exists(it->second))
                cell = evaluate_run(read_run(it->second), qrels, spec).mean;
            per_dataset[i][model] = cell;
        }
    });
    for (std::size_t i = 0; i < manifest.datasets.size(); ++i)
        for (auto& [model, cell] : per_dataset[i]) data.cells[model][manifest.datasets[i].name] = cell;
    return data;
}

LeaderboardTable emit_leaderboard(const LeaderboardData& data) {
    data.validate();
    LeaderboardTable table;
    table.header.push_back("model");

    struct Column {
        int metric;  // 0 ndcg, 1 mrr, 2 map
        std::vector<std::string> datasets;
        bool average;
    };
    static constexpr const char* kMetricNames[] = {"NDCG", "MRR", "MAP"};
    std::vector<Column> columns;
    for (int metric = 0; metric < 3; ++metric) {
        for (const auto& d : data.datasets) {
            columns.push_back({metric, {d}, false});
            table.header.push_back(fmt::format("{}@{} {}", kMetricNames[metric], data.k, d));
        }
        for (const auto& [name, list] : data.subsets) {
            columns.push_back({metric, list, true});
            table.header.push_back(fmt::format("{}@{} avg:{}", kMetricNames[metric], data.k, name));
        }
    }

    auto pick = [](const QueryMetrics& m, int metric) { return metric == 0 ? m.ndcg : metric == 1 ? m.mrr : m.map; };
    for (const auto& model : data.models) {
        std::vector<std::string> row{model};
        std::vector<std::optional<double>> values{std::nullopt};
        const auto model_cells = data.cells.find(model);
        for (const auto& column : columns) {
            std::map<std::string, double> present;
            bool missing = false;
            for (const auto& d : column.datasets) {
                std::optional<QueryMetrics> cell;
                if (model_cells != data.cells.end())
                    if (const auto it = model_cells->second.find(d); it != model_cells->second.end()) cell = it->second;
                if (cell) {
                    present[d] = pick(*cell, column.metric);
                } else {
                    present[d] = 0.0;
                    missing = true;
                }
            }
            if (!column.average) {
                values.push_back(missing ? std::nullopt : std::optional<double>(present.begin()->second));
                row.push_back(missing ? "missing" : format_metric(present.begin()->second));
            } else {
                const double mean = aggregate_datasets(present, column.datasets);
                values.push_back(missing ? std::nullopt : std::optional<double>(mean));
                row.push_back(format_metric(mean) + (missing ? "*" : ""));
            }
        }
        table.rows.push_back(std::move(row));
        table.values.push_back(std::move(values));
    }

    table.bold.assign(table.rows.size(), std::vector<bool>(table.header.size(), false));
    for (std::size_t c = 1; c < table.header.size(); ++c) {
        std::optional<std::string> best;
        for (std::size_t r = 0; r < table.rows.size(); ++r)
            if (table.values[r][c]) {
                const auto shown = format_metric(*table.values[r][c]);
                if (!best || shown > *best) best = shown;
            }
        for (std::size_t r = 0; r < table.rows.size(); ++r)
            table.bold[r][c] = best && table.values[r][c] && format_metric(*table.values[r][c]) == *best;
    }
    return table;
}

std::string LeaderboardTable::to_tsv() const {
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "\t" : "") << cells[i];
        out << '\n';
    };
    line(header);
    for (const auto& row : rows) line(row);
    return out.str();
}

std::string LeaderboardTable::to_markdown() const {
    std::vector<std::vector<std::string>> shown;
    shown.push_back(header);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        auto row = rows[r];
        for (std::size_t c = 0; c < row.size(); ++c)
            if (bold[r][c]) row[c] = "**" + row[c] + "**";
        shown.push_back(std::move(row));
    }
    std::vector<std::size_t> width(header.size(), 3);
    for (const auto& row : shown)
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());

    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& cells) {
        out << '|';
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto pad = width[c] - cells[c].size();
            if (c == 0) out << ' ' << cells[c] << std::string(pad, ' ') << " |";
            else out << ' ' << std::string(pad, ' ') << cells[c] << " |";
        }
        out << '\n';
    };
    line(shown[0]);
    out << '|';
    for (std::size_t c = 0; c < header.size(); ++c)
        out << (c == 0 ? " :" + std::string(width[c] - 1, '-') + " |" : " " + std::string(width[c] - 1, '-') + ": |");
    out << '\n';
    for (std::size_t r = 1; r < shown.size(); ++r) line(shown[r]);
    return out.str();
}

}  // namespace legalir
