#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "legalir/dense.hpp"
#include "legalir/error.hpp"
#include "legalir/instance.hpp"
#include "legalir/rng.hpp"
#include "legalir/tokenize.hpp"

namespace legalir {

/// Mean-of-token-embeddings text encoder with L2-normalized output.
///
/// encode(text) = u / |u| where u is the mean of the embedding rows of the
/// text's in-vocabulary tokens (with multiplicity). Texts with no known
/// token, or whose mean is exactly zero, encode to the zero vector.
template <typename Scalar>
class Encoder {
public:
    using Table = RowMatrix<Scalar>;
    using Index = Eigen::Index;

    Encoder() = default;

    Encoder(std::vector<std::string> vocabulary, Table table) : vocabulary_(std::move(vocabulary)), table_(std::move(table)) {
        if (static_cast<Index>(vocabulary_.size()) != table_.rows())
            throw Error("embedding table rows do not match the vocabulary size");
        index_.reserve(vocabulary_.size());
        for (std::size_t i = 0; i < vocabulary_.size(); ++i)
            if (!index_.emplace(vocabulary_[i], static_cast<Index>(i)).second)
                throw Error("duplicate token '" + vocabulary_[i] + "' in vocabulary");
    }

    /// Entries drawn i.i.d. from N(0, 1/dim).
    static Encoder random(std::vector<std::string> vocabulary, Index dim, Rng& rng) {
        Table table(static_cast<Index>(vocabulary.size()), dim);
        const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
        for (Index i = 0; i < table.rows(); ++i)
            for (Index j = 0; j < dim; ++j) table(i, j) = static_cast<Scalar>(rng.normal() * scale);
        return Encoder(std::move(vocabulary), std::move(table));
    }

    Index dim() const { return table_.cols(); }
    std::size_t vocab_size() const { return vocabulary_.size(); }
    const std::vector<std::string>& vocabulary() const { return vocabulary_; }

    Table& table() { return table_; }
    const Table& table() const { return table_; }

    std::optional<Index> token_index(std::string_view token) const {
        const auto it = index_.find(std::string(token));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    /// Row indices of the text's in-vocabulary tokens, in text order.
    std::vector<Index> token_ids(std::string_view text) const {
        std::vector<Index> ids;
        for (const auto& token : tokenize(text))
            if (const auto id = token_index(token)) ids.push_back(*id);
        return ids;
    }

    /// Unnormalized mean of the rows.
    Vector<Scalar> mean_embedding(std::span<const Index> ids) const {
        Vector<Scalar> u = Vector<Scalar>::Zero(dim());
        if (ids.empty()) return u;
        for (const auto id : ids) u += table_.row(id).transpose();
        return u / static_cast<Scalar>(ids.size());
    }

    Vector<Scalar> encode_ids(std::span<const Index> ids) const {
        Vector<Scalar> u = mean_embedding(ids);
        const Scalar norm = u.norm();
        if (norm > Scalar(0)) u /= norm;
        return u;
    }

    Vector<Scalar> encode(std::string_view text) const {
        const auto ids = token_ids(text);
        return encode_ids(ids);
    }

private:
    std::vector<std::string> vocabulary_;
    std::unordered_map<std::string, Index> index_;
    Table table_;
};

using ToyEncoder = Encoder<double>;

/// Sorted unique tokens over queries, positives and negatives.
inline std::vector<std::string> build_vocabulary(std::span<const TrainingInstance> instances) {
    std::set<std::string> tokens;
    auto add = [&](std::string_view text) {
        for (auto& t : tokenize(text)) tokens.insert(std::move(t));
    };
    for (const auto& instance : instances) {
        add(instance.query_text);
        add(instance.positive.text);
        for (const auto& n : instance.negatives) add(n.text);
    }
    return {tokens.begin(), tokens.end()};
}

/// Binary layout, little-endian:
///   8 bytes  magic "LGIRENC1"
///   u64      vocabulary size V
///   u64      dimension d
///   V times  u32 byte length + UTF-8 token bytes
///   V*d      float64 embedding values, row-major
void save_encoder(const ToyEncoder& encoder, const std::filesystem::path& path);
ToyEncoder load_encoder(const std::filesystem::path& path);

}  // namespace legalir
