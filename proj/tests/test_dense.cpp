#include <algorithm>
#include <cmath>
#include <cstring>

#include <gtest/gtest.h>

#include "legalir/dense.hpp"
#include "legalir/error.hpp"
#include "legalir/rng.hpp"
#include "test_util.hpp"

using namespace legalir;
using testutil::TempDir;
using testutil::write_file;

namespace {

VectorStore store_of(std::vector<std::string> ids, std::initializer_list<std::initializer_list<float>> rows) {
    VectorStore s;
    s.ids = std::move(ids);
    s.vectors.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index r = 0;
    for (const auto& row : rows) {
        Eigen::Index c = 0;
        for (float v : row) s.vectors(r, c++) = v;
        ++r;
    }
    return s;
}

VectorStore random_store(Rng& rng, std::size_t n, Eigen::Index d) {
    VectorStore s;
    s.vectors.resize(static_cast<Eigen::Index>(n), d);
    for (std::size_t i = 0; i < n; ++i) {
        s.ids.push_back("d" + std::to_string(i));
        for (Eigen::Index j = 0; j < d; ++j) s.vectors(static_cast<Eigen::Index>(i), j) = static_cast<float>(rng.normal());
    }
    return s;
}

// O(N*d) scan written with plain loops.
std::vector<std::pair<std::string, double>> scan(const VectorStore& s, const std::vector<double>& q, bool cosine) {
    std::vector<std::pair<std::string, double>> out;
    double qn = 0;
    for (double x : q) qn += x * x;
    qn = std::sqrt(qn);
    for (std::size_t i = 0; i < s.ids.size(); ++i) {
        double dot = 0, rn = 0;
        for (std::size_t j = 0; j < q.size(); ++j) {
            const double v = s.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            dot += v * q[j];
            rn += v * v;
        }
        rn = std::sqrt(rn);
        out.emplace_back(s.ids[i], cosine ? (qn == 0 || rn == 0 ? 0.0 : dot / (qn * rn)) : dot);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    return out;
}

}  // namespace

TEST(LoadVectors, Jsonl) {
    TempDir dir;
    write_file(dir / "v.jsonl", R"({"id":"a","vector":[1,2,3]})" "\n" R"({"id":"b","vector":[0,0,1.5]})" "\n");
    const auto s = load_vectors(dir / "v.jsonl", std::nullopt);
    EXPECT_EQ(s.dim(), 3);
    EXPECT_EQ(s.size(), 2u);
    EXPECT_FLOAT_EQ(s.vectors(1, 2), 1.5f);
}

TEST(LoadVectors, DimensionMismatchNamesId) {
    TempDir dir;
    write_file(dir / "v.jsonl", R"({"id":"a","vector":[1,2,3]})" "\n" R"({"id":"bad","vector":[1,2,3,4]})" "\n");
    try {
        load_vectors(dir / "v.jsonl", std::nullopt);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("bad"), std::string::npos);
    }
    write_file(dir / "w.jsonl", R"({"id":"a","vector":[1,2,3]})" "\n");
    EXPECT_THROW(load_vectors(dir / "w.jsonl", 4), Error);
}

TEST(LoadVectors, NonFiniteAndDuplicates) {
    TempDir dir;
    write_file(dir / "v.jsonl", R"({"id":"a","vector":[1,null,3]})" "\n");
    EXPECT_THROW(load_vectors(dir / "v.jsonl", std::nullopt), Error);
    write_file(dir / "v.jsonl", R"({"id":"a","vector":[1e400,1]})" "\n");
    EXPECT_THROW(load_vectors(dir / "v.jsonl", std::nullopt), Error);
    write_file(dir / "v.jsonl", R"({"id":"a","vector":[1]})" "\n" R"({"id":"a","vector":[2]})" "\n");
    EXPECT_THROW(load_vectors(dir / "v.jsonl", std::nullopt), Error);
}

TEST(LoadVectors, BinaryRoundTripAndNonFinite) {
    TempDir dir;
    Rng rng(3);
    const auto s = random_store(rng, 7, 5);
    save_vectors_binary(s, dir / "v.bin");
    EXPECT_EQ(std::filesystem::file_size(dir / "v.bin"), 7u * 5u * 4u);
    const auto back = load_vectors(dir / "v.bin", 5);
    EXPECT_EQ(back.ids, s.ids);
    EXPECT_EQ(back.vectors, s.vectors);

    // Byte layout: little-endian float32, row-major.
    const auto bytes = testutil::read_file(dir / "v.bin");
    float first = 0;
    std::uint32_t bits = 0;
    for (int b = 3; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(bytes[static_cast<std::size_t>(b)]);
    std::memcpy(&first, &bits, 4);
    EXPECT_EQ(first, s.vectors(0, 0));

    auto corrupted = bytes;
    corrupted[0] = '\x00';
    corrupted[1] = '\x00';
    corrupted[2] = '\x80';
    corrupted[3] = '\x7f';  // +inf
    write_file(dir / "v.bin", corrupted);
    EXPECT_THROW(load_vectors(dir / "v.bin"), Error);

    save_vectors_jsonl(s, dir / "v.jsonl");
    EXPECT_EQ(load_vectors(dir / "v.jsonl").vectors, s.vectors);
}

TEST(LoadVectors, NormalizeFlag) {
    TempDir dir;
    write_file(dir / "v.jsonl", R"({"id":"a","vector":[3,4]})" "\n" R"({"id":"z","vector":[0,0]})" "\n");
    const auto s = load_vectors(dir / "v.jsonl", std::nullopt, true);
    EXPECT_TRUE(s.normalized);
    EXPECT_NEAR(s.vectors.row(0).norm(), 1.0, 1e-6);
    EXPECT_EQ(s.vectors.row(1).norm(), 0.0f);
}

TEST(DenseSearch, Orthogonal) {
    const auto s = store_of({"d1", "d2"}, {{1, 0}, {0, 1}});
    Eigen::Vector2d q(1, 0);
    const auto r = dense_search(s, q, 10, Similarity::cosine);
    EXPECT_EQ(r, (Ranking{{"d1", 1.0}, {"d2", 0.0}}));
}

TEST(DenseSearch, ZeroQueryCosine) {
    const auto s = store_of({"d2", "d1"}, {{0, 1}, {1, 0}});
    Eigen::Vector2d q(0, 0);
    const auto r = dense_search(s, q, 10, Similarity::cosine);
    EXPECT_EQ(r, (Ranking{{"d1", 0.0}, {"d2", 0.0}}));
}

TEST(DenseSearch, ErrorsOnBadInput) {
    const auto s = store_of({"d1"}, {{1, 0}});
    Eigen::Vector3d q(1, 0, 0);
    EXPECT_THROW(dense_search(s, q, 1, Similarity::dot), Error);
    EXPECT_THROW(dense_search(s, Eigen::Vector2d(1, 0), 0, Similarity::dot), Error);
    EXPECT_THROW(parse_similarity("l2"), Error);
}

TEST(DenseSearch, MatchesLinearScan) {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const auto s = random_store(rng, 100, 12);
        std::vector<double> q(12);
        for (auto& x : q) x = rng.normal();
        const Eigen::Map<const Eigen::VectorXd> qv(q.data(), 12);
        for (const auto sim : {Similarity::dot, Similarity::cosine}) {
            const auto got = dense_search(s, qv, 15, sim);
            const auto expected = scan(s, q, sim == Similarity::cosine);
            ASSERT_EQ(got.size(), 15u);
            for (std::size_t i = 0; i < got.size(); ++i) {
                EXPECT_EQ(got[i].doc_id, expected[i].first);
                EXPECT_NEAR(got[i].score, expected[i].second, 1e-6);
            }
        }
    }
}

TEST(DenseSearch, CosineScaleInvariance) {
    Rng rng(18);
    const auto s = random_store(rng, 50, 8);
    Eigen::VectorXd q(8);
    for (int i = 0; i < 8; ++i) q(i) = rng.normal();
    const auto base = dense_search(s, q, 50, Similarity::cosine);
    for (double c : {1e-3, 0.5, 7.0, 1e4}) {
        const auto scaled = dense_search(s, Eigen::VectorXd(c * q), 50, Similarity::cosine);
        for (std::size_t i = 0; i < base.size(); ++i) EXPECT_EQ(scaled[i].doc_id, base[i].doc_id);
    }
}

TEST(DenseSearch, NormalizedStoreDotEqualsCosine) {
    Rng rng(19);
    auto s = random_store(rng, 60, 6);
    s.normalize();
    for (Eigen::Index i = 0; i < s.vectors.rows(); ++i) EXPECT_NEAR(s.vectors.row(i).norm(), 1.0, 1e-6);
    Eigen::VectorXd q(6);
    for (int i = 0; i < 6; ++i) q(i) = rng.normal();
    q.normalize();
    const auto a = dense_search(s, q, 60, Similarity::dot);
    const auto b = dense_search(s, q, 60, Similarity::cosine);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].doc_id, b[i].doc_id);
}

TEST(DenseRun, ThreadedEqualsSerialAndDimCheck) {
    Rng rng(20);
    const auto docs = random_store(rng, 40, 4);
    auto queries = random_store(rng, 9, 4);
    const auto a = dense_run(docs, queries, 5, Similarity::cosine, "dense", 1);
    const auto b = dense_run(docs, queries, 5, Similarity::cosine, "dense", 3);
    EXPECT_EQ(a.rankings, b.rankings);
    EXPECT_EQ(a.rankings.size(), 9u);
    const auto wrong = random_store(rng, 2, 5);
    EXPECT_THROW(dense_run(docs, wrong, 5, Similarity::dot, "x"), Error);
}
