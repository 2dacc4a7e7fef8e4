#include "legalir/trainer.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <unordered_set>

#include <fmt/format.h>

#include "legalir/error.hpp"
#include "legalir/metrics.hpp"
#include "legalir/rng.hpp"
#include "text_io.hpp"

namespace legalir {

using Index = Eigen::Index;

void TrainConfig::validate() const {
    if (!(temperature > 0.0)) throw UsageError(fmt::format("temperature must be > 0, got {}", temperature));
    if (batch_size < 1) throw UsageError("batch size must be >= 1");
    if (!(learning_rate >= 0.0)) throw UsageError("learning rate must be >= 0");
    if (dim < 1) throw UsageError("embedding dimension must be >= 1");
    if (optimizer == Optimizer::adam && !(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && epsilon > 0.0))
        throw UsageError("invalid Adam hyperparameters");
}

RowMatrix<double> BatchGradient::mean_grad() const {
    if (used == 0) return RowMatrix<double>::Zero(grad_sum.rows(), grad_sum.cols());
    return grad_sum / static_cast<double>(used);
}

namespace {

struct Prepared {
    std::string query_id;
    std::vector<Index> query;
    std::string positive_id;
    std::vector<Index> positive;
    std::vector<std::pair<std::string, std::vector<Index>>> negatives;
};

Prepared prepare(const TrainingInstance& instance, const ToyEncoder& encoder, std::size_t hard_negatives) {
    Prepared p;
    p.query_id = instance.query_id;
    p.query = encoder.token_ids(instance.query_text);
    p.positive_id = instance.positive.doc_id;
    p.positive = encoder.token_ids(instance.positive.text);
    const auto n = std::min(hard_negatives, instance.negatives.size());
    for (std::size_t i = 0; i < n; ++i)
        p.negatives.emplace_back(instance.negatives[i].doc_id, encoder.token_ids(instance.negatives[i].text));
    return p;
}

// One encoded text in the batch: u = mean of rows, v = u / |u|.
struct Slot {
    const std::vector<Index>* ids = nullptr;
    double norm = 0.0;
    Vector<double> v;
    Vector<double> grad;  // dL/dv
};

Slot make_slot(const std::vector<Index>& ids, const ToyEncoder& encoder) {
    Slot s;
    s.ids = &ids;
    const Vector<double> u = encoder.mean_embedding(ids);
    s.norm = u.norm();
    s.v = s.norm > 0.0 ? Vector<double>(u / s.norm) : Vector<double>::Zero(encoder.dim());
    s.grad = Vector<double>::Zero(encoder.dim());
    return s;
}

// dL/du = (I - v v^T) g / |u|, spread evenly over the token occurrences.
void backprop_slot(const Slot& s, RowMatrix<double>& grad) {
    if (s.norm <= 0.0 || s.ids->empty()) return;
    const Vector<double> du = (s.grad - s.v * s.v.dot(s.grad)) / s.norm;
    const Vector<double> per_token = du / static_cast<double>(s.ids->size());
    for (const auto id : *s.ids) grad.row(id) += per_token.transpose();
}

BatchGradient batch_gradient(std::span<const Prepared* const> items, const ToyEncoder& encoder, const TrainConfig& config) {
    BatchGradient out;
    out.grad_sum = RowMatrix<double>::Zero(encoder.table().rows(), encoder.dim());
    const double tau = config.temperature;
    auto batch = [&](std::size_t i) -> const Prepared& { return *items[i]; };
    const std::size_t n = items.size();

    std::vector<Slot> queries, positives;
    std::vector<std::vector<Slot>> negatives(n);
    queries.reserve(n);
    positives.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        queries.push_back(make_slot(batch(i).query, encoder));
        positives.push_back(make_slot(batch(i).positive, encoder));
        for (const auto& [doc_id, ids] : batch(i).negatives) negatives[i].push_back(make_slot(ids, encoder));
    }

    std::vector<Slot*> candidates;
    std::vector<double> logits;
    for (std::size_t i = 0; i < n; ++i) {
        if (queries[i].norm <= 0.0) {
            ++out.skipped;
            out.warnings.push_back(fmt::format("query '{}' has no in-vocabulary token; instance skipped", batch(i).query_id));
            continue;
        }
        candidates.clear();
        std::unordered_set<std::string_view> in_set{batch(i).positive_id};
        candidates.push_back(&positives[i]);
        for (std::size_t h = 0; h < negatives[i].size(); ++h)
            if (in_set.insert(batch(i).negatives[h].first).second) candidates.push_back(&negatives[i][h]);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i && in_set.insert(batch(j).positive_id).second) candidates.push_back(&positives[j]);

        const auto& q = queries[i].v;
        logits.resize(candidates.size());
        const double positive_logit = q.dot(candidates[0]->v) / tau;
        double max_logit = -INFINITY;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            logits[c] = q.dot(candidates[c]->v) / tau;
            max_logit = std::max(max_logit, logits[c]);
        }
        double sum = 0.0;
        for (auto& l : logits) {
            l = std::exp(l - max_logit);
            sum += l;
        }
        // logits now hold unnormalized probabilities
        out.loss_sum += std::max(0.0, std::log(sum) + max_logit - positive_logit);

        for (std::size_t c = 0; c < candidates.size(); ++c) {
            const double coeff = (logits[c] / sum - (c == 0 ? 1.0 : 0.0)) / tau;
            queries[i].grad += coeff * candidates[c]->v;
            candidates[c]->grad += coeff * q;
        }
        ++out.used;
    }

    for (std::size_t i = 0; i < n; ++i) {
        backprop_slot(queries[i], out.grad_sum);
        backprop_slot(positives[i], out.grad_sum);
        for (const auto& s : negatives[i]) backprop_slot(s, out.grad_sum);
    }
    return out;
}

std::vector<Prepared> prepare_all(std::span<const TrainingInstance> instances, const ToyEncoder& encoder,
                                  std::size_t hard_negatives) {
    std::vector<Prepared> prepared;
    prepared.reserve(instances.size());
    for (const auto& instance : instances) prepared.push_back(prepare(instance, encoder, hard_negatives));
    return prepared;
}

}  // namespace

BatchGradient infonce_grad(std::span<const TrainingInstance> batch, const ToyEncoder& encoder, const TrainConfig& config) {
    config.validate();
    const auto prepared = prepare_all(batch, encoder, config.hard_negatives);
    std::vector<const Prepared*> items;
    for (const auto& p : prepared) items.push_back(&p);
    return batch_gradient(items, encoder, config);
}

VectorStore encode_corpus(const ToyEncoder& encoder, std::span<const Document> corpus) {
    VectorStore store;
    store.vectors.resize(static_cast<Index>(corpus.size()), encoder.dim());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        store.ids.push_back(corpus[i].doc_id);
        store.vectors.row(static_cast<Index>(i)) = encoder.encode(corpus[i].indexing_text()).transpose().cast<float>();
    }
    store.normalized = true;
    return store;
}

double encoder_mrr(const ToyEncoder& encoder, const EvalSet& eval, int k) {
    const auto store = encode_corpus(encoder, eval.corpus);
    RankedRun run;
    run.tag = "toy";
    for (const auto& query : eval.queries) {
        if (eval.qrels.find(query.query_id) == nullptr) continue;
        run.rankings[query.query_id] =
            dense_search(store, encoder.encode(query.text), static_cast<std::size_t>(k), Similarity::cosine);
    }
    MetricSpec spec;
    spec.k = k;
    return evaluate_run(run, eval.qrels, spec).mean.mrr;
}

ToyEncoder initial_encoder(std::span<const TrainingInstance> instances, const TrainConfig& config) {
    Rng rng(config.seed);
    return ToyEncoder::random(build_vocabulary(instances), config.dim, rng);
}

TrainResult train(std::span<const TrainingInstance> instances, const TrainConfig& config, const EvalSet* eval) {
    config.validate();
    if (instances.empty()) throw Error("cannot train on an empty instance list");

    // The same stream seeds the table and then the epoch shuffles.
    Rng rng(config.seed);
    TrainResult result;
    result.encoder = ToyEncoder::random(build_vocabulary(instances), config.dim, rng);
    result.initial = result.encoder;
    auto& table = result.encoder.table();

    const auto prepared = prepare_all(instances, result.encoder, config.hard_negatives);
    RowMatrix<double> m = RowMatrix<double>::Zero(table.rows(), table.cols());
    RowMatrix<double> v = RowMatrix<double>::Zero(table.rows(), table.cols());
    std::size_t step = 0;

    EpochRecord initial;
    if (eval) initial.mrr = encoder_mrr(result.encoder, *eval);
    result.history.push_back(initial);

    std::vector<std::size_t> order(prepared.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<const Prepared*> batch;
    std::unordered_set<std::string> warned;
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        rng.shuffle(std::span<std::size_t>(order));
        double loss_total = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            batch.clear();
            for (std::size_t i = start; i < std::min(start + config.batch_size, order.size()); ++i)
                batch.push_back(&prepared[order[i]]);
            auto grad = batch_gradient(batch, result.encoder, config);
            for (auto& w : grad.warnings)
                if (warned.insert(w).second) result.warnings.push_back(std::move(w));
            if (grad.used == 0) continue;
            const RowMatrix<double> g = grad.mean_grad();
            loss_total += grad.mean_loss();
            ++batches;

            if (config.optimizer == Optimizer::sgd) {
                table -= config.learning_rate * g;
            } else {
                ++step;
                m = config.beta1 * m + (1.0 - config.beta1) * g;
                v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseProduct(g);
                const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
                const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
                table.array() -= config.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + config.epsilon);
            }
        }
        EpochRecord record;
        record.epoch = epoch;
        if (batches > 0) record.mean_loss = loss_total / static_cast<double>(batches);
        if (eval) record.mrr = encoder_mrr(result.encoder, *eval);
        result.history.push_back(record);
    }
    return result;
}

void write_history(std::span<const EpochRecord> history, const std::filesystem::path& path) {
    auto out = detail::open_output(path);
    out << "epoch\tmean_loss\tmrr@10\n";
    auto cell = [](const std::optional<double>& x) { return x ? fmt::format("{:.6f}", *x) : std::string("-"); };
    for (const auto& r : history) out << r.epoch << '\t' << cell(r.mean_loss) << '\t' << cell(r.mrr) << '\n';
    if (!out) throw Error(fmt::format("failed writing '{}'", path.string()));
}

namespace {

constexpr char kEncoderMagic[8] = {'L', 'G', 'I', 'R', 'E', 'N', 'C', '1'};

template <typename T>
void put_le(std::ostream& out, T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    auto bits = std::bit_cast<U>(value);
    char bytes[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        bytes[i] = static_cast<char>(bits & 0xFF);
        bits >>= 8;
    }
    out.write(bytes, sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const std::string& source) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    unsigned char bytes[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw Error(fmt::format("'{}' is truncated", source));
    U bits = 0;
    for (int i = static_cast<int>(sizeof(T)) - 1; i >= 0; --i) bits = (bits << 8) | bytes[i];
    return std::bit_cast<T>(bits);
}

}  // namespace

void save_encoder(const ToyEncoder& encoder, const std::filesystem::path& path) {
    auto out = detail::open_output(path);
    out.write(kEncoderMagic, sizeof kEncoderMagic);
    put_le<std::uint64_t>(out, encoder.vocab_size());
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(encoder.dim()));
    for (const auto& token : encoder.vocabulary()) {
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(token.size()));
        out.write(token.data(), static_cast<std::streamsize>(token.size()));
    }
    const auto& table = encoder.table();
    for (Index i = 0; i < table.rows(); ++i)
        for (Index j = 0; j < table.cols(); ++j) put_le<double>(out, table(i, j));
    if (!out) throw Error(fmt::format("failed writing '{}'", path.string()));
}

ToyEncoder load_encoder(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    const auto source = path.string();
    char magic[8];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kEncoderMagic, sizeof magic) != 0)
        throw Error(fmt::format("'{}' is not a legalir encoder file", source));
    const auto vocab = get_le<std::uint64_t>(in, source);
    const auto dim = get_le<std::uint64_t>(in, source);
    std::vector<std::string> tokens;
    tokens.reserve(vocab);
    for (std::uint64_t i = 0; i < vocab; ++i) {
        const auto len = get_le<std::uint32_t>(in, source);
        std::string token(len, '\0');
        if (!in.read(token.data(), len)) throw Error(fmt::format("'{}' is truncated", source));
        tokens.push_back(std::move(token));
    }
    RowMatrix<double> table(static_cast<Index>(vocab), static_cast<Index>(dim));
    for (Index i = 0; i < table.rows(); ++i)
        for (Index j = 0; j < table.cols(); ++j) table(i, j) = get_le<double>(in, source);
    return ToyEncoder(std::move(tokens), std::move(table));
}

}  // namespace legalir
