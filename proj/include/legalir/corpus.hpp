#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace legalir {

struct Document {
    std::string doc_id;
    std::string text;
    std::optional<std::string> title;

    /// Text fed to the lexical index: title + " " + text when a title exists.
    std::string indexing_text() const;
};

struct Query {
    std::string query_id;
    std::string text;
};

/// Relevance grades for one query, keyed by doc_id.
using Judgments = std::map<std::string, int>;

/// Graded relevance judgments. Unjudged pairs have grade 0.
class QrelsSet {
public:
    void set(const std::string& query_id, const std::string& doc_id, int grade);

    int grade(std::string_view query_id, std::string_view doc_id) const;

    /// Judgments of one query, or nullptr when the query has none.
    const Judgments* find(std::string_view query_id) const;

    const std::map<std::string, Judgments, std::less<>>& judgments() const { return judgments_; }
    bool empty() const { return judgments_.empty(); }
    std::size_t query_count() const { return judgments_.size(); }

private:
    std::map<std::string, Judgments, std::less<>> judgments_;
};

struct ScoredDoc {
    std::string doc_id;
    double score = 0.0;

    bool operator==(const ScoredDoc&) const = default;
};

/// One query's ranked list; position i holds rank i + 1.
using Ranking = std::vector<ScoredDoc>;

/// Orders by score descending, then doc_id ascending.
bool ranks_before(const ScoredDoc& a, const ScoredDoc& b);
void canonical_sort(Ranking& ranking);

struct RankedRun {
    std::string tag;
    std::map<std::string, Ranking, std::less<>> rankings;

    const Ranking* find(std::string_view query_id) const;
};

enum class TextFormat { jsonl, tsv };

/// Picks tsv for *.tsv / *.txt paths, jsonl otherwise.
TextFormat guess_format(const std::filesystem::path& path);

std::vector<Document> load_corpus(const std::filesystem::path& path, TextFormat format);
std::vector<Query> load_queries(const std::filesystem::path& path, TextFormat format);

/// Parses `qid 0 docid grade` lines. Warnings (e.g. repeated pairs) are
/// appended to `warnings` when given.
QrelsSet load_qrels(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

/// Parses `qid Q0 docid rank score tag`; rankings are re-sorted canonically.
RankedRun read_run(const std::filesystem::path& path);
void write_run(const RankedRun& run, const std::filesystem::path& path);
void write_run(const RankedRun& run, std::ostream& out);

/// doc_id -> document lookup over a loaded corpus. Borrows the corpus.
class DocumentLookup {
public:
    explicit DocumentLookup(const std::vector<Document>& corpus);

    const Document* find(std::string_view doc_id) const;
    std::size_t size() const { return by_id_.size(); }

private:
    std::unordered_map<std::string_view, const Document*> by_id_;
};

}  // namespace legalir
