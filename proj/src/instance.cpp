#include "legalir/instance.hpp"

#include <ostream>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

#include "legalir/error.hpp"
#include "text_io.hpp"

namespace legalir {

using nlohmann::json;

std::string_view to_string(Source source) {
    switch (source) {
        case Source::jua_juris: return "jua-juris";
        case Source::ulysses: return "ulysses";
        case Source::ulysses_synth: return "ulysses-synth";
        case Source::squad_pt: return "squad-pt";
        case Source::other: return "other";
    }
    return "other";
}

Source parse_source(std::string_view tag) {
    if (tag == "jua-juris") return Source::jua_juris;
    if (tag == "ulysses") return Source::ulysses;
    if (tag == "ulysses-synth") return Source::ulysses_synth;
    if (tag == "squad-pt") return Source::squad_pt;
    if (tag == "other") return Source::other;
    throw UsageError(fmt::format("unknown source tag '{}' (expected jua-juris, ulysses, ulysses-synth, squad-pt, other)", tag));
}

std::string normalize_query_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        auto c = static_cast<unsigned char>(text[i]);
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        if (c >= 'A' && c <= 'Z') {
            out.push_back(static_cast<char>(c + 32));
        } else if (c == 0xC3 && i + 1 < text.size()) {
            // U+00C0..U+00DE (except U+00D7) are encoded C3 80..C3 9E.
            auto next = static_cast<unsigned char>(text[i + 1]);
            if (next >= 0x80 && next <= 0x9E && next != 0x97) next += 0x20;
            out.push_back(static_cast<char>(c));
            out.push_back(static_cast<char>(next));
            ++i;
        } else {
            out.push_back(static_cast<char>(c));
        }
    }
    return out;
}

std::string to_json_line(const TrainingInstance& instance) {
    json positive{{"doc_id", instance.positive.doc_id}, {"text", instance.positive.text}};
    if (instance.positive.score) positive["score"] = *instance.positive.score;
    if (instance.positive.rank) positive["rank"] = *instance.positive.rank;
    json negatives = json::array();
    for (const auto& n : instance.negatives)
        negatives.push_back(json{{"doc_id", n.doc_id}, {"text", n.text}, {"score", n.score}});
    json record{{"query_id", instance.query_id},
                {"query", instance.query_text},
                {"positive", std::move(positive)},
                {"negatives", std::move(negatives)},
                {"source", to_string(instance.source)}};
    return record.dump();
}

TrainingInstance instance_from_json_line(std::string_view line, const std::string& source_name, std::size_t line_no) {
    try {
        const auto record = json::parse(line);
        TrainingInstance instance;
        instance.query_id = record.value("query_id", "");
        instance.query_text = record.at("query").get<std::string>();
        const auto& pos = record.at("positive");
        instance.positive.doc_id = pos.at("doc_id").get<std::string>();
        instance.positive.text = pos.value("text", "");
        if (pos.contains("score") && !pos["score"].is_null()) instance.positive.score = pos["score"].get<double>();
        if (pos.contains("rank") && !pos["rank"].is_null()) instance.positive.rank = pos["rank"].get<int>();
        if (record.contains("negatives"))
            for (const auto& n : record["negatives"])
                instance.negatives.push_back(
                    {n.at("doc_id").get<std::string>(), n.value("text", ""), n.value("score", 0.0)});
        instance.source = parse_source(record.value("source", "other"));
        if (instance.positive.doc_id.empty()) throw ParseError(source_name, line_no, "empty positive doc_id");
        std::unordered_set<std::string_view> seen{instance.positive.doc_id};
        for (const auto& n : instance.negatives)
            if (!seen.insert(n.doc_id).second)
                throw ParseError(source_name, line_no,
                                 fmt::format("negative '{}' repeats the positive or another negative", n.doc_id));
        return instance;
    } catch (const json::exception& e) {
        throw ParseError(source_name, line_no, e.what());
    } catch (const UsageError& e) {
        throw ParseError(source_name, line_no, e.what());
    }
}

std::vector<TrainingInstance> read_instances(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    std::vector<TrainingInstance> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (detail::is_blank(line)) continue;
        out.push_back(instance_from_json_line(line, path.string(), line_no));
    }
    return out;
}

void write_instances(std::span<const TrainingInstance> instances, std::ostream& out) {
    for (const auto& instance : instances) out << to_json_line(instance) << '\n';
}

void write_instances(std::span<const TrainingInstance> instances, const std::filesystem::path& path) {
    auto out = detail::open_output(path);
    write_instances(instances, out);
    if (!out) throw Error(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace legalir
