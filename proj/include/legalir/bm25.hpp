#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "legalir/corpus.hpp"
#include "legalir/tokenize.hpp"

namespace legalir {

struct BM25Params {
    double k1 = 0.9;
    double b = 0.4;

    void validate() const;
};

struct Posting {
    std::uint32_t doc = 0;  // internal id, position in the indexed corpus
    std::uint32_t tf = 0;

    bool operator==(const Posting&) const = default;
};

/// Immutable lexical index. Postings of each term are sorted by internal
/// doc id; the persisted layout is documented in save().
class InvertedIndex {
public:
    static InvertedIndex build(std::span<const Document> corpus, const TokenizerOptions& options = {});

    std::size_t doc_count() const { return doc_ids_.size(); }
    std::size_t term_count() const { return postings_.size(); }
    double avgdl() const { return avgdl_; }

    const std::string& doc_id(std::uint32_t doc) const { return doc_ids_[doc]; }
    std::uint32_t doc_length(std::uint32_t doc) const { return doc_lengths_[doc]; }
    std::optional<std::uint32_t> find_doc(std::string_view doc_id) const;

    std::size_t df(std::string_view term) const { return postings(term).size(); }
    std::span<const Posting> postings(std::string_view term) const;
    std::uint32_t tf(std::string_view term, std::uint32_t doc) const;

    /// Terms in ascending byte order.
    std::vector<std::string_view> terms() const;

    const TokenizerOptions& tokenizer() const { return tokenizer_; }

    /// Writes `<dir>/index.jsonl`:
    ///   line 1: {"format":"legalir.bm25","version":1,"docs":N,"terms":T,"portuguese_stopwords":bool}
    ///   next N: {"doc_id":...,"length":...}            (internal id = line order)
    ///   next T: {"term":...,"postings":[[doc,tf],...]}  (terms ascending)
    void save(const std::filesystem::path& dir) const;
    static InvertedIndex load(const std::filesystem::path& dir);

private:
    void finalize();

    std::vector<std::string> doc_ids_;
    std::vector<std::uint32_t> doc_lengths_;
    std::unordered_map<std::string, std::uint32_t> doc_lookup_;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    double avgdl_ = 0.0;
    TokenizerOptions tokenizer_;
};

/// Builds the index; `params` are validated but only used at query time.
InvertedIndex build_index(std::span<const Document> corpus, const BM25Params& params,
                          const TokenizerOptions& options = {});

/// ln(1 + (N - df + 0.5) / (df + 0.5)); strictly positive.
double bm25_idf(std::size_t doc_count, std::size_t df);

/// Unique tokens in first-occurrence order.
std::vector<std::string> unique_terms(std::span<const std::string> tokens);

double bm25_score(const InvertedIndex& index, const BM25Params& params, std::span<const std::string> query_tokens,
                  std::string_view doc_id);

/// Top-k over the union of the query terms' postings, canonical order.
Ranking bm25_search(const InvertedIndex& index, const BM25Params& params, std::string_view query, std::size_t k);

/// Runs bm25_search for every query, fanning out over `threads` workers.
RankedRun bm25_run(const InvertedIndex& index, const BM25Params& params, std::span<const Query> queries,
                   std::size_t k, std::string tag, unsigned threads = 1);

}  // namespace legalir
