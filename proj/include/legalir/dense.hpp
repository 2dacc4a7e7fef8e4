#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "legalir/corpus.hpp"

namespace legalir {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class Similarity { dot, cosine };

Similarity parse_similarity(const std::string& name);

/// Embeddings, one row per id. Stored as float; similarities are
/// accumulated in double.
struct VectorStore {
    std::vector<std::string> ids;
    RowMatrix<float> vectors;
    bool normalized = false;

    Eigen::Index dim() const { return vectors.cols(); }
    std::size_t size() const { return ids.size(); }

    /// Rescales every non-zero row to unit L2 norm and sets `normalized`.
    void normalize();
};

/// Reads a vector file.
///
/// Two layouts are accepted:
///  - JSON-lines, one `{"id": "...", "vector": [x0, x1, ...]}` per line;
///  - raw binary: `path` holds N*d little-endian IEEE-754 float32 values,
///    row-major, no header; `path.ids` holds the N ids, one per line, in
///    row order. d = file_size / (4 * N).
/// The binary layout is chosen when the `.ids` sidecar exists.
VectorStore load_vectors(const std::filesystem::path& path, std::optional<Eigen::Index> expect_dim = std::nullopt,
                         bool normalize = false);

void save_vectors_jsonl(const VectorStore& store, const std::filesystem::path& path);
void save_vectors_binary(const VectorStore& store, const std::filesystem::path& path);

/// Exact top-k by similarity, canonical order. Cosine against a zero
/// vector (query or row) is 0.
Ranking dense_search(const VectorStore& store, const Eigen::Ref<const Vector<double>>& query, std::size_t k,
                     Similarity similarity);

template <typename Derived>
Ranking dense_search(const VectorStore& store, const Eigen::MatrixBase<Derived>& query, std::size_t k,
                     Similarity similarity) {
    const Vector<double> q = query.template cast<double>();
    return dense_search(store, Eigen::Ref<const Vector<double>>(q), k, similarity);
}

/// Searches every row of `queries` against `docs`.
RankedRun dense_run(const VectorStore& docs, const VectorStore& queries, std::size_t k, Similarity similarity,
                    std::string tag, unsigned threads = 1);

}  // namespace legalir
