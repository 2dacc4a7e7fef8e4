#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "legalir/corpus.hpp"
#include "legalir/dense.hpp"
#include "legalir/encoder.hpp"
#include "legalir/instance.hpp"

namespace legalir {

enum class Optimizer { sgd, adam };

struct TrainConfig {
    double temperature = 0.05;
    std::size_t batch_size = 16;
    double learning_rate = 1e-3;
    std::size_t epochs = 20;
    std::uint64_t seed = 7;
    Optimizer optimizer = Optimizer::adam;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t hard_negatives = 4;  // explicit negatives used per instance
    Eigen::Index dim = 64;

    void validate() const;
};

/// Sum-reduced InfoNCE loss and gradient over one batch.
///
/// Candidates for instance i: its own positive, its first `hard_negatives`
/// explicit negatives, and the positives of the other batch members. The
/// set is deduplicated by doc_id and never contains the anchor's own
/// positive doc_id twice. Instances whose query encodes to zero are skipped.
struct BatchGradient {
    double loss_sum = 0.0;
    std::size_t used = 0;
    std::size_t skipped = 0;
    RowMatrix<double> grad_sum;  // d(sum of losses)/d(embedding table)
    std::vector<std::string> warnings;

    double mean_loss() const { return used == 0 ? 0.0 : loss_sum / static_cast<double>(used); }
    RowMatrix<double> mean_grad() const;
};

BatchGradient infonce_grad(std::span<const TrainingInstance> batch, const ToyEncoder& encoder, const TrainConfig& config);

/// Held-out retrieval set for the per-epoch MRR@10 hook.
struct EvalSet {
    std::vector<Query> queries;
    QrelsSet qrels;
    std::vector<Document> corpus;
};

/// Encodes the corpus and queries, runs exact cosine search and returns
/// the mean MRR@k over the judged queries.
double encoder_mrr(const ToyEncoder& encoder, const EvalSet& eval, int k = 10);

/// Encodes every document (indexing text) into a unit-norm store.
VectorStore encode_corpus(const ToyEncoder& encoder, std::span<const Document> corpus);

struct EpochRecord {
    std::size_t epoch = 0;  // 0 is the initialization, before any update
    std::optional<double> mean_loss;
    std::optional<double> mrr;
};

struct TrainResult {
    ToyEncoder encoder;
    ToyEncoder initial;
    std::vector<EpochRecord> history;
    std::vector<std::string> warnings;
};

/// Vocabulary from the instance texts, table drawn from `config.seed`.
ToyEncoder initial_encoder(std::span<const TrainingInstance> instances, const TrainConfig& config);

/// Mini-batch training with a per-epoch seeded shuffle. Single-threaded,
/// fixed reduction order: identical inputs give bit-identical parameters.
TrainResult train(std::span<const TrainingInstance> instances, const TrainConfig& config,
                  const EvalSet* eval = nullptr);

/// epoch<TAB>mean_loss<TAB>mrr@10, "-" for absent values.
void write_history(std::span<const EpochRecord> history, const std::filesystem::path& path);

}  // namespace legalir
