#include <catch_amalgamated.hpp>

#include <cyclemine/rng.hpp>
#include <cyclemine/tokenizer.hpp>

#include "oracles.hpp"

#include <algorithm>

using namespace cyclemine;

namespace {

FeatureSequence make_seq(std::vector<std::vector<double>> frames) {
    FeatureSequence seq;
    seq.frames = std::move(frames);
    seq.id = "t";
    return seq;
}

} // namespace

TEST_CASE("fit_codebook with K distinct frames puts a centroid on each") {
    const auto seq = make_seq({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}});
    const Codebook cb = fit_codebook(seq, 4, 3);
    REQUIRE(cb.k() == 4);
    REQUIRE(codebook_inertia(seq, cb) == 0.0);
    for (const auto& f : seq.frames)
        REQUIRE(std::count(cb.centroids.begin(), cb.centroids.end(), f) == 1);
}

TEST_CASE("fit_codebook on identical frames duplicates the centroid") {
    const auto seq = make_seq({{2.0, 3.0}, {2.0, 3.0}, {2.0, 3.0}, {2.0, 3.0}});
    const Codebook cb = fit_codebook(seq, 2, 11);
    REQUIRE(cb.centroids[0] == std::vector<double>{2.0, 3.0});
    REQUIRE(cb.centroids[1] == std::vector<double>{2.0, 3.0});
    const HardTranscript ht = hard_tokenize(seq, cb);
    for (Token t : ht.tokens) REQUIRE(t == 0); // tie-break toward index 0
}

TEST_CASE("fit_codebook recovers two tight planar groups") {
    const std::vector<std::vector<double>> pts{{0.0, 0.0}, {0.2, 0.0},  {0.1, 0.3},
                                               {5.0, 5.0}, {5.2, 5.0}, {5.1, 5.3}};
    const auto expected = oracle::best_two_clusters(pts); // [(0.1, 0.1), (5.1, 5.1)]
    REQUIRE(expected[0][0] == Catch::Approx(0.1).margin(1e-12));
    REQUIRE(expected[1][1] == Catch::Approx(5.1).margin(1e-12));

    const Codebook cb = fit_codebook(make_seq(pts), 2, 5);
    auto got = cb.centroids;
    std::sort(got.begin(), got.end());
    for (size_t g = 0; g < 2; ++g)
        for (size_t d = 0; d < 2; ++d)
            REQUIRE(got[g][d] == Catch::Approx(expected[g][d]).margin(1e-9));
}

TEST_CASE("fit_codebook requires at least K frames") {
    REQUIRE_THROWS_AS(fit_codebook(make_seq({{0.0}, {1.0}}), 3, 0), TooFewFrames);
}

TEST_CASE("fit_codebook is bitwise deterministic for a fixed seed") {
    Rng rng(99);
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 60; ++i) pts.push_back({rng.next_double(), rng.next_double()});
    const auto seq = make_seq(pts);
    const Codebook a = fit_codebook(seq, 5, 42);
    const Codebook b = fit_codebook(seq, 5, 42);
    REQUIRE(a.centroids == b.centroids);
    const Codebook c = fit_codebook(seq, 5, 43);
    REQUIRE(a.centroids != c.centroids);
}

TEST_CASE("hard_tokenize picks nearest centroid with low-index ties") {
    Codebook cb;
    cb.centroids = {{0.0}, {1.0}, {3.0}, {7.0}};
    const auto seq = make_seq({{7.0}, {2.0}, {0.4}});
    const HardTranscript ht = hard_tokenize(seq, cb);
    REQUIRE(ht.tokens == std::vector<Token>{3, 1, 0}); // 2.0 is equidistant to 1 and 3
}

TEST_CASE("hard_tokenize matches a linear-scan oracle on random frames") {
    Rng rng(7);
    Codebook cb;
    for (int k = 0; k < 3; ++k) cb.centroids.push_back({rng.next_double(), rng.next_double()});
    std::vector<std::vector<double>> frames;
    for (int i = 0; i < 5; ++i) frames.push_back({rng.next_double(), rng.next_double()});
    const HardTranscript ht = hard_tokenize(make_seq(frames), cb);
    for (size_t t = 0; t < frames.size(); ++t) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 3; ++k) {
            double d = 0.0;
            for (int dd = 0; dd < 2; ++dd)
                d += (frames[t][dd] - cb.centroids[k][dd]) * (frames[t][dd] - cb.centroids[k][dd]);
            if (d < best_d) {
                best_d = d;
                best = k;
            }
        }
        REQUIRE(ht.tokens[t] == best);
    }
}

TEST_CASE("soft_tokenize gives uniform rows at equidistant frames") {
    Codebook cb;
    cb.centroids = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
    const SoftTranscript st = soft_tokenize(make_seq({{0.0, 0.0}}), cb);
    for (double v : st.rows[0]) REQUIRE(v == Catch::Approx(0.25).margin(1e-12));
}

TEST_CASE("soft_tokenize peaks at the occupied centroid") {
    Codebook cb;
    cb.centroids = {{0.0, 0.0}, {9.0, 0.0}, {0.0, 9.0}};
    const SoftTranscript st = soft_tokenize(make_seq({{9.0, 0.0}}), cb);
    REQUIRE(std::max_element(st.rows[0].begin(), st.rows[0].end()) - st.rows[0].begin() == 1);
}

TEST_CASE("soft_tokenize matches the direct formula") {
    Rng rng(13);
    Codebook cb;
    for (int k = 0; k < 3; ++k) cb.centroids.push_back({rng.next_double(), rng.next_double()});
    std::vector<std::vector<double>> frames;
    for (int i = 0; i < 4; ++i) frames.push_back({rng.next_double(), rng.next_double()});
    const SoftTranscript st = soft_tokenize(make_seq(frames), cb);
    for (size_t t = 0; t < frames.size(); ++t) {
        const auto expect = oracle::soft_row_direct(frames[t], cb.centroids);
        for (int k = 0; k < 3; ++k) REQUIRE(st.rows[t][k] == Catch::Approx(expect[k]).margin(1e-12));
    }
}

TEST_CASE("property: soft rows normalize and hard equals argmax of soft") {
    Rng rng(2024);
    for (int rep = 0; rep < 200; ++rep) {
        const int k = 2 + static_cast<int>(rng.next_index(6));
        const size_t t_len = 1 + rng.next_index(30);
        const size_t dim = 1 + rng.next_index(3);
        Codebook cb;
        for (int c = 0; c < k; ++c) {
            std::vector<double> p(dim);
            for (double& v : p) v = rng.next_double() * 10.0;
            cb.centroids.push_back(std::move(p));
        }
        std::vector<std::vector<double>> frames;
        for (size_t t = 0; t < t_len; ++t) {
            std::vector<double> f(dim);
            for (double& v : f) v = rng.next_double() * 10.0;
            frames.push_back(std::move(f));
        }
        const auto seq = make_seq(frames);
        const SoftTranscript st = soft_tokenize(seq, cb);
        st.validate();
        const HardTranscript ht = hard_tokenize(seq, cb);
        for (size_t t = 0; t < t_len; ++t) {
            const auto& row = st.rows[t];
            const Token argmax =
                static_cast<Token>(std::max_element(row.begin(), row.end()) - row.begin());
            REQUIRE(ht.tokens[t] == argmax);
        }
    }
}

TEST_CASE("rle examples") {
    REQUIRE(rle_compress({{0, 0, 0, 1, 1}}).runs.size() == 2);
    const auto rs = rle_compress({{0, 0, 0, 1, 1}});
    REQUIRE(rs.runs[0].token == 0);
    REQUIRE(rs.runs[0].length() == 3);
    REQUIRE(rs.runs[1].token == 1);
    REQUIRE(rs.runs[1].length() == 2);
    REQUIRE(rle_compress({{}}).runs.empty());
    const auto single = rle_compress({{2}});
    REQUIRE(single.runs.size() == 1);
    REQUIRE(single.runs[0].token == 2);
    REQUIRE(single.runs[0].length() == 1);
}

TEST_CASE("property: rle round-trips and adjacent runs differ") {
    Rng rng(555);
    for (int rep = 0; rep < 200; ++rep) {
        HardTranscript ht;
        const size_t t_len = rng.next_index(60);
        for (size_t t = 0; t < t_len; ++t)
            ht.tokens.push_back(static_cast<Token>(rng.next_index(4)));
        const TokenRunSequence rs = rle_compress(ht);
        REQUIRE(rle_expand(rs).tokens == ht.tokens);
        for (size_t i = 1; i < rs.runs.size(); ++i) {
            REQUIRE(rs.runs[i].token != rs.runs[i - 1].token);
            REQUIRE(rs.runs[i].begin == rs.runs[i - 1].end);
        }
        int64_t total = 0;
        for (const auto& r : rs.runs) total += r.length();
        REQUIRE(total == static_cast<int64_t>(t_len));
    }
}

TEST_CASE("auto-K finds the elbow on well-separated clusters") {
    Rng rng(31);
    std::vector<std::vector<double>> frames;
    const int true_k = 8;
    for (int c = 0; c < true_k; ++c) {
        const double cx = static_cast<double>(c % 4) * 3.0;
        const double cy = static_cast<double>(c / 4) * 3.0;
        for (int i = 0; i < 25; ++i)
            frames.push_back({cx + 0.02 * rng.next_normal(), cy + 0.02 * rng.next_normal()});
    }
    const Codebook cb = fit_codebook_auto(make_seq(frames), 17);
    REQUIRE(cb.k() == true_k);
}
