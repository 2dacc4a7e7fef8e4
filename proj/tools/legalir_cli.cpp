// legalir: command-line driver for the retrieval, mining, training and
// evaluation pipeline. Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "legalir/bm25.hpp"
#include "legalir/corpus.hpp"
#include "legalir/dense.hpp"
#include "legalir/error.hpp"
#include "legalir/filtering.hpp"
#include "legalir/metrics.hpp"
#include "legalir/mining.hpp"
#include "legalir/mixture.hpp"
#include "legalir/suite.hpp"
#include "legalir/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace legalir;

namespace {

struct Globals {
    std::uint64_t seed = 42;
    unsigned threads = 1;
    bool quiet = false;
};

Globals globals;

void info(const std::string& message) {
    if (!globals.quiet) std::cerr << message << '\n';
}

void warn(const std::string& message) { std::cerr << "warning: " << message << '\n'; }

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot open '{}' for writing", path.string()));
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
    if (!out) throw Error(fmt::format("failed writing '{}'", path.string()));
}

fs::path sidecar(const fs::path& path, const std::string& suffix) {
    auto p = path;
    p += suffix;
    return p;
}

TextFormat format_flag(const std::string& flag, const fs::path& path) {
    if (flag == "auto") return guess_format(path);
    if (flag == "jsonl") return TextFormat::jsonl;
    if (flag == "tsv") return TextFormat::tsv;
    throw UsageError(fmt::format("unknown format '{}' (auto, jsonl, tsv)", flag));
}

Gain gain_flag(const std::string& flag) {
    if (flag == "linear") return Gain::linear;
    if (flag == "exp" || flag == "exponential") return Gain::exponential;
    throw UsageError(fmt::format("unknown gain '{}' (linear, exp)", flag));
}

MapDenominator map_denominator_flag(const std::string& flag) {
    if (flag == "r") return MapDenominator::all_relevant;
    if (flag == "min-r-k") return MapDenominator::min_relevant_k;
    throw UsageError(fmt::format("unknown MAP denominator '{}' (r, min-r-k)", flag));
}

// ---------------------------------------------------------------- index

struct IndexArgs {
    fs::path corpus, out;
    std::string format = "auto";
    bool stopwords = false;
};

int run_index(const IndexArgs& a) {
    const auto corpus = load_corpus(a.corpus, format_flag(a.format, a.corpus));
    TokenizerOptions options;
    options.portuguese_stopwords = a.stopwords;
    const auto index = build_index(corpus, BM25Params{}, options);
    index.save(a.out);
    write_text(a.out / "build_report.json",
               json{{"corpus", a.corpus.string()},
                    {"docs", index.doc_count()},
                    {"terms", index.term_count()},
                    {"avgdl", index.avgdl()},
                    {"portuguese_stopwords", a.stopwords}}
                   .dump(2));
    info(fmt::format("indexed {} documents, {} terms -> {}", index.doc_count(), index.term_count(), a.out.string()));
    return 0;
}

// ---------------------------------------------------------------- search

struct Bm25Args {
    fs::path index, queries, run;
    std::size_t k = 1000;
    std::string tag = "bm25";
    std::string format = "auto";
    BM25Params params;
};

int run_search_bm25(const Bm25Args& a) {
    a.params.validate();
    if (a.k < 1) throw UsageError("--k must be >= 1");
    const auto index = InvertedIndex::load(a.index);
    const auto queries = load_queries(a.queries, format_flag(a.format, a.queries));
    const auto run = bm25_run(index, a.params, queries, a.k, a.tag, globals.threads);
    write_run(run, a.run);
    write_text(sidecar(a.run, ".json"), json{{"retriever", "bm25"},
                                             {"index", a.index.string()},
                                             {"queries", queries.size()},
                                             {"k", a.k},
                                             {"k1", a.params.k1},
                                             {"b", a.params.b},
                                             {"tag", a.tag}}
                                            .dump(2));
    info(fmt::format("searched {} queries -> {}", queries.size(), a.run.string()));
    return 0;
}

struct DenseArgs {
    fs::path vectors, query_vectors, run;
    std::size_t k = 1000;
    std::string sim = "cosine";
    std::string tag = "dense";
    bool normalize = false;
};

int run_search_dense(const DenseArgs& a) {
    if (a.k < 1) throw UsageError("--k must be >= 1");
    const auto similarity = parse_similarity(a.sim);
    const auto docs = load_vectors(a.vectors, std::nullopt, a.normalize);
    const auto queries = load_vectors(a.query_vectors, docs.dim(), a.normalize);
    const auto run = dense_run(docs, queries, a.k, similarity, a.tag, globals.threads);
    write_run(run, a.run);
    write_text(sidecar(a.run, ".json"), json{{"retriever", "dense"},
                                             {"vectors", a.vectors.string()},
                                             {"documents", docs.size()},
                                             {"queries", queries.size()},
                                             {"dim", docs.dim()},
                                             {"similarity", a.sim},
                                             {"k", a.k},
                                             {"tag", a.tag}}
                                            .dump(2));
    info(fmt::format("searched {} query vectors -> {}", queries.size(), a.run.string()));
    return 0;
}

// ---------------------------------------------------------------- mine

struct MineArgs {
    fs::path run, qrels, corpus, queries, out, report;
    std::string cutoff = "mean";
    std::string source = "other";
    std::string format = "auto";
    MiningConfig config;
    bool hygiene = false;
};

int run_mine(MineArgs a) {
    a.config.cutoff = CutoffStrategy::parse(a.cutoff);
    a.config.validate();
    const auto source = parse_source(a.source);
    const auto run = read_run(a.run);
    std::vector<std::string> warnings;
    const auto qrels = load_qrels(a.qrels, &warnings);
    for (const auto& w : warnings) warn(w);
    const auto corpus = load_corpus(a.corpus, guess_format(a.corpus));
    const auto queries = load_queries(a.queries, format_flag(a.format, a.queries));
    const DocumentLookup lookup(corpus);

    MiningReport report;
    auto instances = mine_all(queries, run, qrels, lookup, a.config, source, &report, globals.threads);
    json hygiene = nullptr;
    if (a.hygiene) {
        auto result = filter_short_queries(std::move(instances), a.config);
        instances = std::move(result.kept);
        hygiene = {{"min_query_tokens", a.config.min_query_tokens}, {"dropped", result.counts}};
    }
    write_instances(instances, a.out);

    json skipped = json::array();
    for (const auto& [qid, reason] : report.skip_log) skipped.push_back({{"query_id", qid}, {"reason", reason}});
    const json doc{{"cutoff", a.config.cutoff.to_string()},
                   {"max_negatives", a.config.max_negatives},
                   {"min_negatives", a.config.min_negatives},
                   {"candidate_depth", a.config.candidate_depth},
                   {"source", a.source},
                   {"queries", report.queries},
                   {"emitted", report.emitted},
                   {"written", instances.size()},
                   {"skipped_by_reason", report.skipped},
                   {"skipped", std::move(skipped)},
                   {"hygiene", std::move(hygiene)}};
    write_text(a.report.empty() ? sidecar(a.out, ".report.json") : a.report, doc.dump(2));
    info(fmt::format("mined {} instances from {} queries -> {}", instances.size(), report.queries, a.out.string()));
    return 0;
}

// ---------------------------------------------------------------- filter

struct FilterArgs {
    fs::path instances, run, out, manifest;
    std::size_t select = 0;
    std::string weights = "0.4,0.4,0.2";
    int top_rank = 100;
    int pool_cap = 20;
};

int run_filter(const FilterArgs& a) {
    auto weights = PriorityWeights::parse_weights(a.weights);
    weights.top_rank = a.top_rank;
    weights.pool_cap = a.pool_cap;
    weights.validate();
    auto instances = read_instances(a.instances);
    const auto run = read_run(a.run);
    const auto n = a.select == 0 ? std::max<std::size_t>(instances.size(), 1) : a.select;
    auto selection = filter_and_select(std::move(instances), run, n, weights);
    for (const auto& w : selection.manifest.warnings) warn(w);
    write_instances(selection.selected, a.out);
    write_text(a.manifest.empty() ? sidecar(a.out, ".manifest.json") : a.manifest, manifest_to_json(selection.manifest));
    info(fmt::format("kept {} of {} instances -> {}", selection.manifest.selected, selection.manifest.input_count,
                     a.out.string()));
    return 0;
}

// ---------------------------------------------------------------- mix

struct MixArgs {
    std::vector<std::string> sources;
    fs::path out, manifest;
};

int run_mix(const MixArgs& a) {
    std::vector<MixtureSource> sources;
    for (const auto& s : a.sources) sources.push_back(parse_mixture_source(s));
    const auto mixture = build_mixture(sources, globals.seed);
    write_instances(mixture.instances, a.out);
    write_text(a.manifest.empty() ? sidecar(a.out, ".manifest.json") : a.manifest, mixture.manifest.to_json());
    info(fmt::format("mixed {} instances ({} duplicates removed) -> {}", mixture.manifest.total,
                     mixture.manifest.dedup_removed, a.out.string()));
    return 0;
}

// ---------------------------------------------------------------- toy-train

struct TrainArgs {
    fs::path data, eval_qrels, eval_corpus, eval_queries, out, history;
    TrainConfig config;
    std::string optimizer = "adam";
};

int run_toy_train(TrainArgs a) {
    a.config.seed = globals.seed;
    if (a.optimizer == "adam") a.config.optimizer = Optimizer::adam;
    else if (a.optimizer == "sgd") a.config.optimizer = Optimizer::sgd;
    else throw UsageError(fmt::format("unknown optimizer '{}' (adam, sgd)", a.optimizer));
    a.config.validate();

    const bool any_eval = !a.eval_qrels.empty() || !a.eval_corpus.empty() || !a.eval_queries.empty();
    if (any_eval && (a.eval_qrels.empty() || a.eval_corpus.empty() || a.eval_queries.empty()))
        throw UsageError("--eval-qrels, --eval-corpus and --eval-queries must be given together");

    const auto instances = read_instances(a.data);
    std::optional<EvalSet> eval;
    if (any_eval) {
        eval = EvalSet{load_queries(a.eval_queries, guess_format(a.eval_queries)), load_qrels(a.eval_qrels),
                       load_corpus(a.eval_corpus, guess_format(a.eval_corpus))};
    }
    const auto result = train(instances, a.config, eval ? &*eval : nullptr);
    for (const auto& w : result.warnings) warn(w);
    save_encoder(result.encoder, a.out);
    if (!a.history.empty()) write_history(result.history, a.history);

    json history = json::array();
    for (const auto& r : result.history)
        history.push_back({{"epoch", r.epoch},
                           {"mean_loss", r.mean_loss ? json(*r.mean_loss) : json(nullptr)},
                           {"mrr@10", r.mrr ? json(*r.mrr) : json(nullptr)}});
    write_text(sidecar(a.out, ".json"), json{{"instances", instances.size()},
                                             {"vocabulary", result.encoder.vocab_size()},
                                             {"dim", a.config.dim},
                                             {"temperature", a.config.temperature},
                                             {"batch_size", a.config.batch_size},
                                             {"learning_rate", a.config.learning_rate},
                                             {"epochs", a.config.epochs},
                                             {"optimizer", a.optimizer},
                                             {"hard_negatives", a.config.hard_negatives},
                                             {"seed", a.config.seed},
                                             {"history", std::move(history)}}
                                            .dump(2));
    const auto& last = result.history.back();
    info(fmt::format("trained {} epochs; final loss {}, MRR@10 {}", a.config.epochs,
                     last.mean_loss ? fmt::format("{:.4f}", *last.mean_loss) : "-",
                     last.mrr ? format_metric(*last.mrr) : "-"));
    return 0;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
    fs::path run, qrels, report;
    std::string metrics = "ndcg@10,mrr@10,map@10";
    std::string gain = "linear";
    std::string map_denominator = "r";
    int rel_threshold = 1;
    bool per_query = false;
};

int run_eval(const EvalArgs& a) {
    const auto requests = parse_metric_list(a.metrics);
    MetricSpec base;
    base.gain = gain_flag(a.gain);
    base.map_denominator = map_denominator_flag(a.map_denominator);
    base.rel_threshold = a.rel_threshold;
    base.validate();

    std::vector<std::string> warnings;
    const auto qrels = load_qrels(a.qrels, &warnings);
    for (const auto& w : warnings) warn(w);
    const auto run = read_run(a.run);

    std::map<int, DatasetReport> by_k;
    for (const auto& r : requests) {
        if (by_k.contains(r.k)) continue;
        auto spec = base;
        spec.k = r.k;
        by_k.emplace(r.k, evaluate_run(run, qrels, spec));
    }
    auto value = [](const QueryMetrics& m, MetricKind kind) {
        return kind == MetricKind::ndcg ? m.ndcg : kind == MetricKind::mrr ? m.mrr : m.map;
    };

    json report{{"run", a.run.string()}, {"qrels", a.qrels.string()}, {"gain", a.gain}, {"queries", qrels.query_count()}};
    json means = json::object();
    for (const auto& r : requests) {
        const double v = value(by_k.at(r.k).mean, r.kind);
        means[metric_label(r)] = v;
        std::cout << metric_label(r) << "\tall\t" << format_metric(v) << '\n';
    }
    report["mean"] = std::move(means);
    const auto& missing = by_k.begin()->second.missing_queries;
    report["missing_queries"] = missing;
    if (!missing.empty()) warn(fmt::format("{} judged queries are absent from the run and score 0", missing.size()));

    if (a.per_query) {
        json per_query = json::object();
        for (const auto& [qid, unused] : qrels.judgments()) {
            json row = json::object();
            for (const auto& r : requests) {
                const double v = value(by_k.at(r.k).per_query.at(qid), r.kind);
                row[metric_label(r)] = v;
                std::cout << metric_label(r) << '\t' << qid << '\t' << format_metric(v) << '\n';
            }
            per_query[qid] = std::move(row);
        }
        report["per_query"] = std::move(per_query);
    }
    if (!a.report.empty()) write_text(a.report, report.dump(2));
    return 0;
}

// ---------------------------------------------------------------- suite / leaderboard

int emit_table(const LeaderboardData& data, const fs::path& out, bool allow_missing) {
    const auto table = emit_leaderboard(data);
    const auto markdown = table.to_markdown();
    std::cout << markdown;
    if (!out.empty()) {
        write_text(sidecar(out, ".tsv"), table.to_tsv());
        write_text(sidecar(out, ".md"), markdown);
        write_text(sidecar(out, ".json"), data.to_cells_json());
    }
    if (const auto missing = data.missing_count(); missing > 0) {
        warn(fmt::format("{} (model, dataset) cells have no run", missing));
        if (!allow_missing) return 2;
    }
    return 0;
}

struct SuiteArgs {
    fs::path manifest, out;
    int k = 10;
    std::string gain = "linear";
    std::string map_denominator = "r";
    bool allow_missing = false;
};

int run_eval_suite(const SuiteArgs& a) {
    MetricSpec spec;
    spec.k = a.k;
    spec.gain = gain_flag(a.gain);
    spec.map_denominator = map_denominator_flag(a.map_denominator);
    const auto manifest = SuiteManifest::load(a.manifest);
    return emit_table(evaluate_suite(manifest, spec, globals.threads), a.out, a.allow_missing);
}

struct LeaderboardArgs {
    fs::path cells, out;
    bool allow_missing = false;
};

int run_leaderboard(const LeaderboardArgs& a) {
    return emit_table(LeaderboardData::load_cells(a.cells), a.out, a.allow_missing);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"legalir: lexical/dense retrieval, hard-negative mining, training-mixture construction and "
                 "truncated-metric evaluation"};
    app.require_subcommand(1);
    app.add_option("--seed", globals.seed, "Seed for shuffles and initialization")->capture_default_str();
    app.add_option("--threads", globals.threads, "Worker threads for per-query work")->check(CLI::PositiveNumber);
    app.add_flag("--quiet", globals.quiet, "Suppress progress messages");

    std::function<int()> action;

    auto* index = app.add_subcommand("index", "Inverted index management");
    index->require_subcommand(1);
    IndexArgs index_args;
    auto* build = index->add_subcommand("build", "Build a BM25 index from a corpus");
    build->add_option("--corpus", index_args.corpus, "Corpus (JSON-lines or TSV)")->required();
    build->add_option("--out", index_args.out, "Output index directory")->required();
    build->add_option("--format", index_args.format, "auto, jsonl or tsv")->capture_default_str();
    build->add_flag("--pt-stopwords", index_args.stopwords, "Drop Portuguese stopwords");
    build->callback([&] { action = [&] { return run_index(index_args); }; });

    auto* search = app.add_subcommand("search", "Produce a TREC run");
    search->require_subcommand(1);
    Bm25Args bm25_args;
    auto* bm25 = search->add_subcommand("bm25", "BM25 search over a built index");
    bm25->add_option("--index", bm25_args.index, "Index directory")->required();
    bm25->add_option("--queries", bm25_args.queries, "Queries (TSV id<TAB>text or JSON-lines)")->required();
    bm25->add_option("--run", bm25_args.run, "Output run file")->required();
    bm25->add_option("--k", bm25_args.k, "Depth per query")->capture_default_str();
    bm25->add_option("--tag", bm25_args.tag, "Run tag")->capture_default_str();
    bm25->add_option("--k1", bm25_args.params.k1, "BM25 k1")->capture_default_str();
    bm25->add_option("--b", bm25_args.params.b, "BM25 b")->capture_default_str();
    bm25->add_option("--format", bm25_args.format, "Query file format: auto, jsonl or tsv")->capture_default_str();
    bm25->callback([&] { action = [&] { return run_search_bm25(bm25_args); }; });

    DenseArgs dense_args;
    auto* dense = search->add_subcommand("dense", "Exact dense search over embedding files");
    dense->add_option("--vectors", dense_args.vectors, "Document vectors")->required();
    dense->add_option("--query-vectors", dense_args.query_vectors, "Query vectors")->required();
    dense->add_option("--run", dense_args.run, "Output run file")->required();
    dense->add_option("--k", dense_args.k, "Depth per query")->capture_default_str();
    dense->add_option("--sim", dense_args.sim, "dot or cosine")->capture_default_str();
    dense->add_option("--tag", dense_args.tag, "Run tag")->capture_default_str();
    dense->add_flag("--normalize", dense_args.normalize, "L2-normalize vectors on load");
    dense->callback([&] { action = [&] { return run_search_dense(dense_args); }; });

    MineArgs mine_args;
    auto* mine = app.add_subcommand("mine", "Mine hard negatives from a first-stage run");
    mine->add_option("--run", mine_args.run, "First-stage run")->required();
    mine->add_option("--qrels", mine_args.qrels, "Qrels with positives")->required();
    mine->add_option("--corpus", mine_args.corpus, "Corpus")->required();
    mine->add_option("--queries", mine_args.queries, "Query texts")->required();
    mine->add_option("--out", mine_args.out, "Output instances (JSON-lines)")->required();
    mine->add_option("--report", mine_args.report, "Mining report (JSON)");
    mine->add_option("--cutoff", mine_args.cutoff, "mean, mean+std:<alpha> or top:<tau>")->capture_default_str();
    mine->add_option("--max-neg", mine_args.config.max_negatives, "Max negatives per instance")->capture_default_str();
    mine->add_option("--min-neg", mine_args.config.min_negatives, "Skip instances with fewer negatives")->capture_default_str();
    mine->add_option("--depth", mine_args.config.candidate_depth, "Run depth consumed")->capture_default_str();
    mine->add_option("--source", mine_args.source, "Source tag")->capture_default_str();
    mine->add_option("--format", mine_args.format, "Query file format: auto, jsonl or tsv")->capture_default_str();
    mine->add_flag("--query-hygiene", mine_args.hygiene, "Drop short and ambiguous queries");
    mine->add_option("--min-query-tokens", mine_args.config.min_query_tokens, "Hygiene length threshold")
        ->capture_default_str();
    mine->callback([&] { action = [&] { return run_mine(mine_args); }; });

    FilterArgs filter_args;
    auto* filter = app.add_subcommand("filter", "Recoverability filter and priority selection");
    filter->add_option("--instances", filter_args.instances, "Input instances")->required();
    filter->add_option("--run", filter_args.run, "First-stage run for the instances' queries")->required();
    filter->add_option("--out", filter_args.out, "Selected instances")->required();
    filter->add_option("--manifest", filter_args.manifest, "Selection manifest (JSON)");
    filter->add_option("--top-rank", filter_args.top_rank, "Recoverability rank bound")->capture_default_str();
    filter->add_option("--select", filter_args.select, "Number of instances to keep (0 = all)")->capture_default_str();
    filter->add_option("--weights", filter_args.weights, "w_rank,w_margin,w_pool")->capture_default_str();
    filter->add_option("--pool-cap", filter_args.pool_cap, "Pool-size normalizer")->capture_default_str();
    filter->callback([&] { action = [&] { return run_filter(filter_args); }; });

    MixArgs mix_args;
    auto* mix = app.add_subcommand("mix", "Build a shuffled, deduplicated training mixture");
    mix->add_option("--source", mix_args.sources, "tag:path (repeatable, order matters)")->required();
    mix->add_option("--seed", globals.seed, "Shuffle seed");
    mix->add_option("--out", mix_args.out, "Mixture (JSON-lines)")->required();
    mix->add_option("--manifest", mix_args.manifest, "Mixture manifest (JSON)");
    mix->callback([&] { action = [&] { return run_mix(mix_args); }; });

    TrainArgs train_args;
    auto* toy = app.add_subcommand("toy-train", "Train the mean-pooling encoder with InfoNCE");
    toy->add_option("--data", train_args.data, "Training instances")->required();
    toy->add_option("--out", train_args.out, "Encoder output file")->required();
    toy->add_option("--history", train_args.history, "Per-epoch history (TSV)");
    toy->add_option("--dim", train_args.config.dim, "Embedding dimension")->capture_default_str();
    toy->add_option("--temp", train_args.config.temperature, "InfoNCE temperature")->capture_default_str();
    toy->add_option("--batch", train_args.config.batch_size, "Batch size")->capture_default_str();
    toy->add_option("--epochs", train_args.config.epochs, "Epochs")->capture_default_str();
    toy->add_option("--lr", train_args.config.learning_rate, "Learning rate")->capture_default_str();
    toy->add_option("--optimizer", train_args.optimizer, "adam or sgd")->capture_default_str();
    toy->add_option("--hard-negatives", train_args.config.hard_negatives, "Explicit negatives per instance")
        ->capture_default_str();
    toy->add_option("--seed", globals.seed, "Initialization and shuffle seed");
    toy->add_option("--eval-qrels", train_args.eval_qrels, "Evaluation qrels");
    toy->add_option("--eval-corpus", train_args.eval_corpus, "Evaluation corpus");
    toy->add_option("--eval-queries", train_args.eval_queries, "Evaluation queries");
    toy->callback([&] { action = [&] { return run_toy_train(train_args); }; });

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "Evaluate one run against qrels");
    eval->add_option("--run", eval_args.run, "Run file")->required();
    eval->add_option("--qrels", eval_args.qrels, "Qrels file")->required();
    eval->add_option("--metrics", eval_args.metrics, "Comma-separated metric@k list")->capture_default_str();
    eval->add_option("--gain", eval_args.gain, "NDCG gain: linear or exp")->capture_default_str();
    eval->add_option("--map-denominator", eval_args.map_denominator, "r or min-r-k")->capture_default_str();
    eval->add_option("--rel-threshold", eval_args.rel_threshold, "Minimum relevant grade")->capture_default_str();
    eval->add_flag("--per-query", eval_args.per_query, "Print per-query values");
    eval->add_option("--report", eval_args.report, "Machine-readable report (JSON)");
    eval->callback([&] { action = [&] { return run_eval(eval_args); }; });

    SuiteArgs suite_args;
    auto* suite = app.add_subcommand("eval-suite", "Evaluate a multi-dataset manifest and emit the leaderboard");
    suite->add_option("--manifest", suite_args.manifest, "Suite manifest (JSON)")->required();
    suite->add_option("--out", suite_args.out, "Output prefix for .tsv/.md/.json");
    suite->add_option("--k", suite_args.k, "Metric cutoff")->capture_default_str();
    suite->add_option("--gain", suite_args.gain, "NDCG gain: linear or exp")->capture_default_str();
    suite->add_option("--map-denominator", suite_args.map_denominator, "r or min-r-k")->capture_default_str();
    suite->add_flag("--allow-missing", suite_args.allow_missing, "Exit 0 even when runs are missing");
    suite->callback([&] { action = [&] { return run_eval_suite(suite_args); }; });

    LeaderboardArgs board_args;
    auto* board = app.add_subcommand("leaderboard", "Render a leaderboard from per-dataset metric cells");
    board->add_option("--cells", board_args.cells, "Cells document (JSON)")->required();
    board->add_option("--out", board_args.out, "Output prefix for .tsv/.md/.json");
    board->add_flag("--allow-missing", board_args.allow_missing, "Exit 0 even when cells are missing");
    board->callback([&] { action = [&] { return run_leaderboard(board_args); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        return action ? action() : 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
