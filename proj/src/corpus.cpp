#include "legalir/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

#include "text_io.hpp"

namespace legalir {

using nlohmann::json;

std::string Document::indexing_text() const {
    if (title && !title->empty()) return text.empty() ? *title : *title + " " + text;
    return text;
}

void QrelsSet::set(const std::string& query_id, const std::string& doc_id, int grade) {
    if (grade < 0) throw Error(fmt::format("negative grade {} for ({}, {})", grade, query_id, doc_id));
    judgments_[query_id][doc_id] = grade;
}

int QrelsSet::grade(std::string_view query_id, std::string_view doc_id) const {
    const auto* judged = find(query_id);
    if (judged == nullptr) return 0;
    const auto it = judged->find(std::string(doc_id));
    return it == judged->end() ? 0 : it->second;
}

const Judgments* QrelsSet::find(std::string_view query_id) const {
    const auto it = judgments_.find(query_id);
    return it == judgments_.end() ? nullptr : &it->second;
}

bool ranks_before(const ScoredDoc& a, const ScoredDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
}

void canonical_sort(Ranking& ranking) { std::sort(ranking.begin(), ranking.end(), ranks_before); }

const Ranking* RankedRun::find(std::string_view query_id) const {
    const auto it = rankings.find(query_id);
    return it == rankings.end() ? nullptr : &it->second;
}

TextFormat guess_format(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    return (ext == ".tsv" || ext == ".txt") ? TextFormat::tsv : TextFormat::jsonl;
}

namespace {

std::string source_name(const std::filesystem::path& path) { return path.string(); }

json parse_json_line(const std::string& line, const std::string& source, std::size_t line_no) {
    try {
        json record = json::parse(line);
        if (!record.is_object()) throw ParseError(source, line_no, "expected a JSON object");
        return record;
    } catch (const json::exception& e) {
        throw ParseError(source, line_no, std::string("invalid JSON: ") + e.what());
    }
}

std::optional<std::string> string_field(const json& record, const char* key, const std::string& source,
                                        std::size_t line_no) {
    const auto it = record.find(key);
    if (it == record.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw ParseError(source, line_no, fmt::format("field '{}' must be a string", key));
    return it->get<std::string>();
}

// Splits `id<TAB>text`; the text may itself contain tabs.
std::pair<std::string, std::string> split_tsv(const std::string& line, const std::string& source,
                                              std::size_t line_no) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) throw ParseError(source, line_no, "expected 'id<TAB>text'");
    return {line.substr(0, tab), line.substr(tab + 1)};
}

}  // namespace

std::vector<Document> load_corpus(const std::filesystem::path& path, TextFormat format) {
    auto in = detail::open_input(path);
    const auto source = source_name(path);
    std::vector<Document> corpus;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (detail::is_blank(line)) continue;

        Document doc;
        if (format == TextFormat::tsv) {
            std::tie(doc.doc_id, doc.text) = split_tsv(line, source, line_no);
        } else {
            const auto record = parse_json_line(line, source, line_no);
            auto id = string_field(record, "doc_id", source, line_no);
            if (!id) throw ParseError(source, line_no, "missing 'doc_id'");
            doc.doc_id = std::move(*id);
            auto text = string_field(record, "text", source, line_no);
            doc.title = string_field(record, "title", source, line_no);
            if (!text && !doc.title) throw ParseError(source, line_no, "record has neither 'text' nor 'title'");
            doc.text = text.value_or("");
        }
        if (doc.doc_id.empty()) throw ParseError(source, line_no, "empty doc_id");
        if (doc.text.empty() && (!doc.title || doc.title->empty()))
            throw ParseError(source, line_no, fmt::format("document '{}' has no text", doc.doc_id));
        if (!seen.insert(doc.doc_id).second)
            throw ParseError(source, line_no, fmt::format("duplicate doc_id '{}'", doc.doc_id));
        corpus.push_back(std::move(doc));
    }
    return corpus;
}

std::vector<Query> load_queries(const std::filesystem::path& path, TextFormat format) {
    auto in = detail::open_input(path);
    const auto source = source_name(path);
    std::vector<Query> queries;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (detail::is_blank(line)) continue;

        Query query;
        if (format == TextFormat::tsv) {
            std::tie(query.query_id, query.text) = split_tsv(line, source, line_no);
        } else {
            const auto record = parse_json_line(line, source, line_no);
            auto id = string_field(record, "query_id", source, line_no);
            if (!id) id = string_field(record, "id", source, line_no);
            if (!id) throw ParseError(source, line_no, "missing 'query_id'");
            query.query_id = std::move(*id);
            query.text = string_field(record, "text", source, line_no).value_or("");
        }
        if (query.query_id.empty()) throw ParseError(source, line_no, "empty query_id");
        if (query.text.empty())
            throw ParseError(source, line_no, fmt::format("query '{}' has empty text", query.query_id));
        if (!seen.insert(query.query_id).second)
            throw ParseError(source, line_no, fmt::format("duplicate query_id '{}'", query.query_id));
        queries.push_back(std::move(query));
    }
    return queries;
}

QrelsSet load_qrels(const std::filesystem::path& path, std::vector<std::string>* warnings) {
    auto in = detail::open_input(path);
    const auto source = source_name(path);
    QrelsSet qrels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (detail::is_blank(line)) continue;
        const auto fields = detail::split_ws(line);
        if (fields.size() != 4) throw ParseError(source, line_no, "expected 'qid 0 docid grade'");
        const auto grade = detail::parse_int(fields[3]);
        if (!grade) throw ParseError(source, line_no, fmt::format("non-integer grade '{}'", fields[3]));
        if (*grade < 0 || *grade > INT32_MAX)
            throw ParseError(source, line_no, fmt::format("grade out of range: {}", *grade));

        const std::string qid(fields[0]);
        const std::string docid(fields[2]);
        if (const auto* judged = qrels.find(qid); judged != nullptr && judged->contains(docid) && warnings)
            warnings->push_back(fmt::format("{}:{}: repeated judgment for ({}, {}); keeping the last grade",
                                            source, line_no, qid, docid));
        qrels.set(qid, docid, static_cast<int>(*grade));
    }
    return qrels;
}

RankedRun read_run(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    const auto source = source_name(path);
    RankedRun run;
    std::map<std::string, std::unordered_set<std::string>, std::less<>> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (detail::is_blank(line)) continue;
        const auto fields = detail::split_ws(line);
        if (fields.size() != 6) throw ParseError(source, line_no, "expected 'qid Q0 docid rank score tag'");
        const auto score = detail::parse_double(fields[4]);
        if (!score || !std::isfinite(*score))
            throw ParseError(source, line_no, fmt::format("non-numeric score '{}'", fields[4]));

        std::string qid(fields[0]);
        std::string docid(fields[2]);
        if (!seen[qid].insert(docid).second)
            throw ParseError(source, line_no, fmt::format("duplicate entry ({}, {})", qid, docid));
        if (run.tag.empty()) run.tag = std::string(fields[5]);
        run.rankings[qid].push_back({std::move(docid), *score});
    }
    for (auto& [qid, ranking] : run.rankings) canonical_sort(ranking);
    return run;
}

void write_run(const RankedRun& run, std::ostream& out) {
    const std::string tag = run.tag.empty() ? std::string("run") : run.tag;
    for (const auto& [qid, ranking] : run.rankings) {
        std::size_t rank = 0;
        for (const auto& entry : ranking)
            out << fmt::format("{} Q0 {} {} {:.6f} {}\n", qid, entry.doc_id, ++rank, entry.score, tag);
    }
}

void write_run(const RankedRun& run, const std::filesystem::path& path) {
    auto out = detail::open_output(path);
    write_run(run, out);
    if (!out) throw Error(fmt::format("failed writing '{}'", path.string()));
}

DocumentLookup::DocumentLookup(const std::vector<Document>& corpus) {
    by_id_.reserve(corpus.size());
    for (const auto& doc : corpus) by_id_.emplace(doc.doc_id, &doc);
}

const Document* DocumentLookup::find(std::string_view doc_id) const {
    const auto it = by_id_.find(doc_id);
    return it == by_id_.end() ? nullptr : it->second;
}

}  // namespace legalir
