#include "legalir/dense.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

#include "legalir/error.hpp"
#include "legalir/parallel.hpp"
#include "text_io.hpp"

namespace legalir {

using nlohmann::json;

Similarity parse_similarity(const std::string& name) {
    if (name == "dot") return Similarity::dot;
    if (name == "cosine") return Similarity::cosine;
    throw UsageError(fmt::format("unknown similarity '{}' (expected dot or cosine)", name));
}

void VectorStore::normalize() {
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
        const double norm = vectors.row(i).cast<double>().norm();
        if (norm > 0.0) vectors.row(i) = (vectors.row(i).cast<double>() / norm).cast<float>();
    }
    normalized = true;
}

namespace {

void check_finite_row(const VectorStore& store, Eigen::Index row) {
    if (!store.vectors.row(row).allFinite())
        throw Error(fmt::format("vector '{}' has a non-finite component", store.ids[static_cast<std::size_t>(row)]));
}

float read_le_float(const unsigned char* bytes) {
    std::uint32_t bits = 0;
    for (int b = 3; b >= 0; --b) bits = (bits << 8) | bytes[b];
    return std::bit_cast<float>(bits);
}

void write_le_float(float value, unsigned char* bytes) {
    auto bits = std::bit_cast<std::uint32_t>(value);
    for (int b = 0; b < 4; ++b) {
        bytes[b] = static_cast<unsigned char>(bits & 0xFF);
        bits >>= 8;
    }
}

VectorStore load_jsonl(const std::filesystem::path& path, std::optional<Eigen::Index> expect_dim) {
    auto in = detail::open_input(path);
    const auto source = path.string();
    std::vector<std::string> ids;
    std::vector<std::vector<double>> rows;
    std::unordered_set<std::string> seen;
    std::optional<std::size_t> dim = expect_dim ? std::optional<std::size_t>(static_cast<std::size_t>(*expect_dim))
                                                : std::nullopt;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (detail::is_blank(line)) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(source, line_no, e.what());
        }
        if (!record.is_object() || !record.contains("id") || !record["id"].is_string() || !record.contains("vector") ||
            !record["vector"].is_array())
            throw ParseError(source, line_no, "expected {\"id\": string, \"vector\": [numbers]}");
        auto id = record["id"].get<std::string>();
        std::vector<double> values;
        values.reserve(record["vector"].size());
        for (const auto& x : record["vector"]) {
            if (!x.is_number()) throw ParseError(source, line_no, fmt::format("vector '{}' has a non-finite component", id));
            values.push_back(x.get<double>());
        }
        if (!dim) dim = values.size();
        if (values.size() != *dim)
            throw ParseError(source, line_no,
                             fmt::format("dimension mismatch for '{}': expected {}, got {}", id, *dim, values.size()));
        if (!seen.insert(id).second) throw ParseError(source, line_no, fmt::format("duplicate id '{}'", id));
        ids.push_back(std::move(id));
        rows.push_back(std::move(values));
    }

    VectorStore store;
    store.vectors.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim.value_or(0)));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            store.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = static_cast<float>(rows[i][j]);
    store.ids = std::move(ids);
    return store;
}

VectorStore load_binary(const std::filesystem::path& path, const std::filesystem::path& ids_path,
                        std::optional<Eigen::Index> expect_dim) {
    VectorStore store;
    {
        auto in = detail::open_input(ids_path);
        std::unordered_set<std::string> seen;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            detail::strip_cr(line);
            if (line.empty()) continue;
            if (!seen.insert(line).second)
                throw ParseError(ids_path.string(), line_no, fmt::format("duplicate id '{}'", line));
            store.ids.push_back(line);
        }
    }
    const auto bytes = std::filesystem::file_size(path);
    const auto n = store.ids.size();
    if (n == 0) {
        if (bytes != 0) throw Error(fmt::format("'{}' has data but '{}' lists no ids", path.string(), ids_path.string()));
        store.vectors.resize(0, expect_dim.value_or(0));
        return store;
    }
    if (bytes % (4 * n) != 0)
        throw Error(fmt::format("'{}': {} bytes is not a whole number of float32 rows for {} ids", path.string(), bytes, n));
    const auto dim = static_cast<Eigen::Index>(bytes / (4 * n));
    if (expect_dim && *expect_dim != dim)
        throw Error(fmt::format("dimension mismatch: expected {}, file '{}' has {}", *expect_dim, path.string(), dim));

    std::vector<unsigned char> raw(bytes);
    auto in = detail::open_input(path);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(bytes));
    if (!in) throw Error(fmt::format("failed reading '{}'", path.string()));
    store.vectors.resize(static_cast<Eigen::Index>(n), dim);
    for (Eigen::Index i = 0; i < store.vectors.rows(); ++i)
        for (Eigen::Index j = 0; j < dim; ++j)
            store.vectors(i, j) = read_le_float(raw.data() + 4 * (i * dim + j));
    return store;
}

}  // namespace

VectorStore load_vectors(const std::filesystem::path& path, std::optional<Eigen::Index> expect_dim, bool normalize) {
    auto ids_path = path;
    ids_path += ".ids";
    VectorStore store =
        std::filesystem::exists(ids_path) ? load_binary(path, ids_path, expect_dim) : load_jsonl(path, expect_dim);
    for (Eigen::Index i = 0; i < store.vectors.rows(); ++i) check_finite_row(store, i);
    if (normalize) store.normalize();
    return store;
}

void save_vectors_jsonl(const VectorStore& store, const std::filesystem::path& path) {
    auto out = detail::open_output(path);
    for (std::size_t i = 0; i < store.size(); ++i) {
        const auto row = store.vectors.row(static_cast<Eigen::Index>(i));
        json values = json::array();
        for (Eigen::Index j = 0; j < row.size(); ++j) values.push_back(row(j));
        out << json{{"id", store.ids[i]}, {"vector", std::move(values)}}.dump() << '\n';
    }
    if (!out) throw Error(fmt::format("failed writing '{}'", path.string()));
}

void save_vectors_binary(const VectorStore& store, const std::filesystem::path& path) {
    auto out = detail::open_output(path);
    std::vector<unsigned char> raw(4 * static_cast<std::size_t>(store.vectors.size()));
    for (Eigen::Index i = 0; i < store.vectors.rows(); ++i)
        for (Eigen::Index j = 0; j < store.dim(); ++j)
            write_le_float(store.vectors(i, j), raw.data() + 4 * (i * store.dim() + j));
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    auto ids_path = path;
    ids_path += ".ids";
    auto ids = detail::open_output(ids_path);
    for (const auto& id : store.ids) ids << id << '\n';
    if (!out || !ids) throw Error(fmt::format("failed writing '{}'", path.string()));
}

Ranking dense_search(const VectorStore& store, const Eigen::Ref<const Vector<double>>& query, std::size_t k,
                     Similarity similarity) {
    if (k == 0) throw UsageError("k must be >= 1");
    if (query.size() != store.dim())
        throw Error(fmt::format("query dimension {} does not match store dimension {}", query.size(), store.dim()));

    const double query_norm = query.norm();
    Ranking ranking(store.size());
    for (std::size_t i = 0; i < store.size(); ++i) {
        const Vector<double> row = store.vectors.row(static_cast<Eigen::Index>(i)).transpose().cast<double>();
        double score = row.dot(query);
        if (similarity == Similarity::cosine) {
            const double denom = query_norm * row.norm();
            score = denom > 0.0 ? score / denom : 0.0;
        }
        ranking[i] = {store.ids[i], score};
    }
    const auto keep = std::min(k, ranking.size());
    std::partial_sort(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(keep), ranking.end(), ranks_before);
    ranking.resize(keep);
    return ranking;
}

RankedRun dense_run(const VectorStore& docs, const VectorStore& queries, std::size_t k, Similarity similarity,
                    std::string tag, unsigned threads) {
    if (queries.dim() != docs.dim() && queries.size() > 0)
        throw Error(fmt::format("query vectors have dimension {}, documents {}", queries.dim(), docs.dim()));
    std::vector<Ranking> results(queries.size());
    parallel_for(queries.size(), threads, [&](std::size_t i) {
        const Vector<double> q = queries.vectors.row(static_cast<Eigen::Index>(i)).transpose().cast<double>();
        results[i] = dense_search(docs, q, k, similarity);
    });
    RankedRun run;
    run.tag = std::move(tag);
    for (std::size_t i = 0; i < queries.size(); ++i) run.rankings[queries.ids[i]] = std::move(results[i]);
    return run;
}

}  // namespace legalir
