#include "legalir/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

#include "legalir/error.hpp"
#include "legalir/parallel.hpp"
#include "text_io.hpp"

namespace legalir {

using nlohmann::json;

namespace {

constexpr const char* kIndexFormat = "legalir.bm25";
constexpr int kIndexVersion = 1;

}  // namespace

void BM25Params::validate() const {
    if (!(k1 >= 0.0) || !std::isfinite(k1)) throw UsageError(fmt::format("BM25 k1 must be >= 0, got {}", k1));
    if (!(b >= 0.0 && b <= 1.0)) throw UsageError(fmt::format("BM25 b must be in [0, 1], got {}", b));
}

InvertedIndex InvertedIndex::build(std::span<const Document> corpus, const TokenizerOptions& options) {
    if (corpus.empty()) throw Error("cannot build an index over an empty corpus");
    if (corpus.size() > UINT32_MAX) throw Error("corpus too large for 32-bit document ids");

    InvertedIndex index;
    index.tokenizer_ = options;
    index.doc_ids_.reserve(corpus.size());
    index.doc_lengths_.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto doc = static_cast<std::uint32_t>(i);
        const auto tokens = tokenize(corpus[i].indexing_text(), options);
        std::map<std::string_view, std::uint32_t> counts;
        for (const auto& token : tokens) ++counts[token];
        for (const auto& [term, tf] : counts) index.postings_[std::string(term)].push_back({doc, tf});
        index.doc_ids_.push_back(corpus[i].doc_id);
        index.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
    }
    index.finalize();
    if (index.doc_lookup_.size() != index.doc_ids_.size()) throw Error("corpus contains duplicate doc_ids");
    return index;
}

void InvertedIndex::finalize() {
    doc_lookup_.clear();
    doc_lookup_.reserve(doc_ids_.size());
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) doc_lookup_.emplace(doc_ids_[i], static_cast<std::uint32_t>(i));
    const double total = std::accumulate(doc_lengths_.begin(), doc_lengths_.end(), 0.0);
    avgdl_ = doc_ids_.empty() ? 0.0 : total / static_cast<double>(doc_ids_.size());
}

std::optional<std::uint32_t> InvertedIndex::find_doc(std::string_view doc_id) const {
    const auto it = doc_lookup_.find(std::string(doc_id));
    if (it == doc_lookup_.end()) return std::nullopt;
    return it->second;
}

std::span<const Posting> InvertedIndex::postings(std::string_view term) const {
    const auto it = postings_.find(std::string(term));
    if (it == postings_.end()) return {};
    return it->second;
}

std::uint32_t InvertedIndex::tf(std::string_view term, std::uint32_t doc) const {
    const auto list = postings(term);
    const auto it =
        std::lower_bound(list.begin(), list.end(), doc, [](const Posting& p, std::uint32_t d) { return p.doc < d; });
    return (it != list.end() && it->doc == doc) ? it->tf : 0;
}

std::vector<std::string_view> InvertedIndex::terms() const {
    std::vector<std::string_view> out;
    out.reserve(postings_.size());
    for (const auto& [term, list] : postings_) out.emplace_back(term);
    std::sort(out.begin(), out.end());
    return out;
}

void InvertedIndex::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    auto out = detail::open_output(dir / "index.jsonl");
    out << json{{"format", kIndexFormat},
                {"version", kIndexVersion},
                {"docs", doc_ids_.size()},
                {"terms", postings_.size()},
                {"portuguese_stopwords", tokenizer_.portuguese_stopwords}}
               .dump()
        << '\n';
    for (std::size_t i = 0; i < doc_ids_.size(); ++i)
        out << json{{"doc_id", doc_ids_[i]}, {"length", doc_lengths_[i]}}.dump() << '\n';
    for (const auto term : terms()) {
        json list = json::array();
        for (const auto& p : postings(term)) list.push_back(json::array({p.doc, p.tf}));
        out << json{{"term", term}, {"postings", std::move(list)}}.dump() << '\n';
    }
    if (!out) throw Error(fmt::format("failed writing index to '{}'", dir.string()));
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& dir) {
    const auto path = dir / "index.jsonl";
    const auto source = path.string();
    auto in = detail::open_input(path);
    std::string line;
    std::size_t line_no = 0;
    auto next_record = [&]() -> json {
        if (!std::getline(in, line)) throw ParseError(source, line_no + 1, "unexpected end of index");
        ++line_no;
        try {
            return json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(source, line_no, e.what());
        }
    };

    InvertedIndex index;
    try {
        const auto header = next_record();
        if (header.value("format", "") != kIndexFormat) throw ParseError(source, 1, "not a legalir BM25 index");
        if (header.value("version", 0) != kIndexVersion)
            throw ParseError(source, 1, fmt::format("unsupported index version {}", header.value("version", 0)));
        const auto docs = header.at("docs").get<std::size_t>();
        const auto terms = header.at("terms").get<std::size_t>();
        index.tokenizer_.portuguese_stopwords = header.value("portuguese_stopwords", false);

        for (std::size_t i = 0; i < docs; ++i) {
            const auto rec = next_record();
            index.doc_ids_.push_back(rec.at("doc_id").get<std::string>());
            index.doc_lengths_.push_back(rec.at("length").get<std::uint32_t>());
        }
        for (std::size_t t = 0; t < terms; ++t) {
            const auto rec = next_record();
            auto& list = index.postings_[rec.at("term").get<std::string>()];
            for (const auto& p : rec.at("postings")) {
                const Posting posting{p.at(0).get<std::uint32_t>(), p.at(1).get<std::uint32_t>()};
                if (posting.doc >= docs) throw ParseError(source, line_no, "posting refers to unknown document");
                list.push_back(posting);
            }
        }
    } catch (const json::exception& e) {
        throw ParseError(source, line_no, e.what());
    }
    index.finalize();
    return index;
}

InvertedIndex build_index(std::span<const Document> corpus, const BM25Params& params, const TokenizerOptions& options) {
    params.validate();
    return InvertedIndex::build(corpus, options);
}

double bm25_idf(std::size_t doc_count, std::size_t df) {
    const auto n = static_cast<double>(doc_count);
    const auto d = static_cast<double>(df);
    return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

std::vector<std::string> unique_terms(std::span<const std::string> tokens) {
    std::vector<std::string> out;
    std::unordered_set<std::string_view> seen;
    for (const auto& t : tokens)
        if (seen.insert(t).second) out.push_back(t);
    return out;
}

namespace {

double term_weight(const BM25Params& params, double idf, std::uint32_t tf, std::uint32_t doc_length, double avgdl) {
    const double f = tf;
    const double norm = 1.0 - params.b + params.b * (static_cast<double>(doc_length) / avgdl);
    return idf * f * (params.k1 + 1.0) / (f + params.k1 * norm);
}

}  // namespace

double bm25_score(const InvertedIndex& index, const BM25Params& params, std::span<const std::string> query_tokens,
                  std::string_view doc_id) {
    const auto doc = index.find_doc(doc_id);
    if (!doc) throw Error(fmt::format("unknown doc_id '{}'", doc_id));
    double score = 0.0;
    for (const auto& term : unique_terms(query_tokens)) {
        const auto tf = index.tf(term, *doc);
        if (tf == 0) continue;
        score += term_weight(params, bm25_idf(index.doc_count(), index.df(term)), tf, index.doc_length(*doc),
                             index.avgdl());
    }
    return score;
}

Ranking bm25_search(const InvertedIndex& index, const BM25Params& params, std::string_view query, std::size_t k) {
    if (k == 0) throw UsageError("k must be >= 1");
    const auto tokens = tokenize(query, index.tokenizer());

    // Term-at-a-time accumulation, same term order as bm25_score.
    std::unordered_map<std::uint32_t, double> accumulators;
    for (const auto& term : unique_terms(tokens)) {
        const auto list = index.postings(term);
        if (list.empty()) continue;
        const double idf = bm25_idf(index.doc_count(), list.size());
        for (const auto& p : list) accumulators[p.doc] += term_weight(params, idf, p.tf, index.doc_length(p.doc), index.avgdl());
    }

    Ranking ranking;
    ranking.reserve(accumulators.size());
    for (const auto& [doc, score] : accumulators) ranking.push_back({index.doc_id(doc), score});
    const auto keep = std::min(k, ranking.size());
    std::partial_sort(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(keep), ranking.end(), ranks_before);
    ranking.resize(keep);
    return ranking;
}

RankedRun bm25_run(const InvertedIndex& index, const BM25Params& params, std::span<const Query> queries,
                   std::size_t k, std::string tag, unsigned threads) {
    params.validate();
    std::vector<Ranking> results(queries.size());
    parallel_for(queries.size(), threads,
                 [&](std::size_t i) { results[i] = bm25_search(index, params, queries[i].text, k); });
    RankedRun run;
    run.tag = std::move(tag);
    for (std::size_t i = 0; i < queries.size(); ++i) run.rankings[queries[i].query_id] = std::move(results[i]);
    return run;
}

}  // namespace legalir
