#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "core.hpp"
#include "rng.hpp"

namespace cyclemine {

namespace detail {

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

/// Nearest centroid by Euclidean distance, ties toward the lowest index.
inline int nearest_centroid(const std::vector<double>& x, const Codebook& cb) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < cb.k(); ++k) {
        const double d = sq_dist(x, cb.centroids[k]);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

} // namespace detail

struct KMeansOptions {
    int max_iterations = 300;
    double tolerance = 1e-6; // max centroid shift (Euclidean) for convergence
};

/// K-means with k-means++ seeding. Deterministic for a fixed seed: identical
/// (seq, K, seed) yields bitwise-identical centroids. Empty clusters are
/// repaired by reseeding them at the farthest point of the largest cluster.
inline Codebook fit_codebook(const FeatureSequence& seq, int k, uint64_t seed,
                             const KMeansOptions& opt = {}) {
    validate_sequence(seq);
    const auto& pts = seq.frames;
    const size_t t_len = pts.size();
    if (k < 2) throw OutOfRange("K must be >= 2");
    if (t_len < static_cast<size_t>(k))
        throw TooFewFrames("need at least K frames, got " + std::to_string(t_len));

    Rng rng(seed);
    Codebook cb;
    cb.centroids.reserve(k);

    // k-means++ seeding
    cb.centroids.push_back(pts[rng.next_index(t_len)]);
    std::vector<double> d2(t_len);
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (size_t i = 0; i < t_len; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& cent : cb.centroids) best = std::min(best, detail::sq_dist(pts[i], cent));
            d2[i] = best;
            total += best;
        }
        size_t pick = t_len - 1;
        if (total > 0.0) {
            const double r = rng.next_double() * total;
            double acc = 0.0;
            for (size_t i = 0; i < t_len; ++i) {
                acc += d2[i];
                if (acc >= r) {
                    pick = i;
                    break;
                }
            }
        } else {
            // all points coincide with existing centroids; any choice works
            pick = rng.next_index(t_len);
        }
        cb.centroids.push_back(pts[pick]);
    }

    // Lloyd iterations
    std::vector<int> assign(t_len, 0);
    std::vector<size_t> counts(k, 0);
    const size_t n = seq.dim();
    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        for (size_t i = 0; i < t_len; ++i) assign[i] = detail::nearest_centroid(pts[i], cb);

        std::vector<std::vector<double>> sums(k, std::vector<double>(n, 0.0));
        std::fill(counts.begin(), counts.end(), 0);
        for (size_t i = 0; i < t_len; ++i) {
            ++counts[assign[i]];
            for (size_t d = 0; d < n; ++d) sums[assign[i]][d] += pts[i][d];
        }

        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) continue;
            // farthest member of the largest cluster becomes the new centroid
            int big = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
            size_t far_i = 0;
            double far_d = -1.0;
            for (size_t i = 0; i < t_len; ++i) {
                if (assign[i] != big) continue;
                const double d = detail::sq_dist(pts[i], cb.centroids[big]);
                if (d > far_d) {
                    far_d = d;
                    far_i = i;
                }
            }
            for (size_t d = 0; d < n; ++d) sums[big][d] -= pts[far_i][d];
            --counts[big];
            assign[far_i] = c;
            sums[c] = pts[far_i];
            counts[c] = 1;
        }

        double shift = 0.0;
        for (int c = 0; c < k; ++c) {
            std::vector<double> mean(n);
            for (size_t d = 0; d < n; ++d) mean[d] = sums[c][d] / static_cast<double>(counts[c]);
            shift = std::max(shift, std::sqrt(detail::sq_dist(mean, cb.centroids[c])));
            cb.centroids[c] = std::move(mean);
        }
        if (shift < opt.tolerance) break;
    }
    return cb;
}

/// Within-cluster sum of squared distances under nearest-centroid assignment.
inline double codebook_inertia(const FeatureSequence& seq, const Codebook& cb) {
    double s = 0.0;
    for (const auto& x : seq.frames) s += detail::sq_dist(x, cb.centroids[detail::nearest_centroid(x, cb)]);
    return s;
}

/// Sweeps K over [k_min, k_max] and picks the elbow by the maximum second
/// difference of inertia. The default range follows the usual 6..14 working
/// band for activity tokens.
inline Codebook fit_codebook_auto(const FeatureSequence& seq, uint64_t seed, int k_min = 6,
                                  int k_max = 14, const KMeansOptions& opt = {}) {
    validate_sequence(seq);
    const int t_len = static_cast<int>(seq.size());
    k_max = std::min(k_max, t_len);
    k_min = std::min(k_min, k_max);
    // one extra value on each side so the second difference covers the band
    const int lo = std::max(2, k_min - 1);
    const int hi = std::min(t_len, k_max + 1);

    std::vector<Codebook> books;
    std::vector<double> inertia;
    for (int k = lo; k <= hi; ++k) {
        books.push_back(fit_codebook(seq, k, seed, opt));
        inertia.push_back(codebook_inertia(seq, books.back()));
    }
    int best_k = k_min;
    double best_curv = -std::numeric_limits<double>::infinity();
    for (int k = k_min; k <= k_max; ++k) {
        if (k - 1 < lo || k + 1 > hi) continue;
        const double curv = inertia[k - 1 - lo] - 2.0 * inertia[k - lo] + inertia[k + 1 - lo];
        if (curv > best_curv) {
            best_curv = curv;
            best_k = k;
        }
    }
    return books[best_k - lo];
}

/// Eq.-5 style hard assignment: token_t = argmin_k ||x_t - C_k||.
inline HardTranscript hard_tokenize(const FeatureSequence& seq, const Codebook& cb) {
    if (seq.dim() != cb.dim())
        throw DimensionMismatch("sequence dim " + std::to_string(seq.dim()) +
                                " vs codebook dim " + std::to_string(cb.dim()));
    HardTranscript out;
    out.tokens.reserve(seq.size());
    for (const auto& x : seq.frames) out.tokens.push_back(detail::nearest_centroid(x, cb));
    return out;
}

/// Eq.-6 style soft assignment: row_t[k] = exp(-||x_t - C_k||) normalized
/// over k. Computed with a max-shift so far clusters cannot underflow the
/// whole row.
inline SoftTranscript soft_tokenize(const FeatureSequence& seq, const Codebook& cb) {
    if (seq.dim() != cb.dim())
        throw DimensionMismatch("sequence dim " + std::to_string(seq.dim()) +
                                " vs codebook dim " + std::to_string(cb.dim()));
    SoftTranscript out;
    out.rows.reserve(seq.size());
    const int k = cb.k();
    std::vector<double> dist(k);
    for (const auto& x : seq.frames) {
        double dmin = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            dist[c] = std::sqrt(detail::sq_dist(x, cb.centroids[c]));
            dmin = std::min(dmin, dist[c]);
        }
        std::vector<double> row(k);
        double sum = 0.0;
        for (int c = 0; c < k; ++c) {
            row[c] = std::max(std::exp(dmin - dist[c]), 1e-300);
            sum += row[c];
        }
        for (int c = 0; c < k; ++c) row[c] /= sum;
        out.rows.push_back(std::move(row));
    }
    return out;
}

/// Maximal-run compression. Concatenating the runs reproduces the input.
inline TokenRunSequence rle_compress(const HardTranscript& t) {
    TokenRunSequence out;
    int64_t i = 0;
    const int64_t n = static_cast<int64_t>(t.tokens.size());
    while (i < n) {
        int64_t j = i + 1;
        while (j < n && t.tokens[j] == t.tokens[i]) ++j;
        out.runs.push_back({t.tokens[i], i, j});
        i = j;
    }
    return out;
}

inline HardTranscript rle_expand(const TokenRunSequence& rs) {
    HardTranscript out;
    for (const auto& r : rs.runs)
        out.tokens.insert(out.tokens.end(), static_cast<size_t>(r.length()), r.token);
    return out;
}

/// Optional per-dimension z-normalization (off by default in the pipeline).
inline FeatureSequence znormalize(const FeatureSequence& seq) {
    validate_sequence(seq);
    const size_t n = seq.dim();
    const double t_len = static_cast<double>(seq.size());
    std::vector<double> mean(n, 0.0), var(n, 0.0);
    for (const auto& x : seq.frames)
        for (size_t d = 0; d < n; ++d) mean[d] += x[d];
    for (size_t d = 0; d < n; ++d) mean[d] /= t_len;
    for (const auto& x : seq.frames)
        for (size_t d = 0; d < n; ++d) var[d] += (x[d] - mean[d]) * (x[d] - mean[d]);
    FeatureSequence out = seq;
    for (size_t d = 0; d < n; ++d) var[d] = std::sqrt(var[d] / t_len);
    for (auto& x : out.frames)
        for (size_t d = 0; d < n; ++d) x[d] = var[d] > 0.0 ? (x[d] - mean[d]) / var[d] : 0.0;
    return out;
}

} // namespace cyclemine
