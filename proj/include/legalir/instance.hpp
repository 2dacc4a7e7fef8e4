#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace legalir {

enum class Source { jua_juris, ulysses, ulysses_synth, squad_pt, other };

std::string_view to_string(Source source);
Source parse_source(std::string_view tag);

struct Positive {
    std::string doc_id;
    std::string text;
    std::optional<double> score;  // first-stage score, when the run retrieved it
    std::optional<int> rank;      // attached by the recoverability filter
};

struct Negative {
    std::string doc_id;
    std::string text;
    double score = 0.0;  // first-stage score
};

/// One unit of contrastive supervision.
struct TrainingInstance {
    std::string query_id;
    std::string query_text;
    Positive positive;
    std::vector<Negative> negatives;
    Source source = Source::other;
};

/// Case-folded (ASCII and Latin-1), whitespace-collapsed text.
std::string normalize_query_text(std::string_view text);

/// JSON-lines record:
///   {"query_id":..., "query":..., "positive":{"doc_id":...,"text":...[,"score":x][,"rank":n]},
///    "negatives":[{"doc_id":...,"text":...,"score":x},...], "source":"jua-juris"}
std::string to_json_line(const TrainingInstance& instance);
TrainingInstance instance_from_json_line(std::string_view line, const std::string& source_name, std::size_t line_no);

std::vector<TrainingInstance> read_instances(const std::filesystem::path& path);
void write_instances(std::span<const TrainingInstance> instances, const std::filesystem::path& path);
void write_instances(std::span<const TrainingInstance> instances, std::ostream& out);

}  // namespace legalir
