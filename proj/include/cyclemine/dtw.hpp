#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "core.hpp"

namespace cyclemine {

/// Dynamic time warping distance between two sequences of K-vectors with
/// per-pair Euclidean cost, matched endpoints, and steps right/down/diagonal.
/// band = 0 means unconstrained; band > 0 applies a Sakoe-Chiba band of that
/// half-width (|i - j| <= band after slope normalization).
inline double dtw_distance(std::span<const std::vector<double>> a,
                           std::span<const std::vector<double>> b, int64_t band = 0) {
    if (a.empty() || b.empty()) throw EmptySegment("dtw on empty segment");
    const int64_t n = static_cast<int64_t>(a.size());
    const int64_t m = static_cast<int64_t>(b.size());
    const double inf = std::numeric_limits<double>::infinity();

    auto cost = [&](int64_t i, int64_t j) {
        double s = 0.0;
        const auto& x = a[static_cast<size_t>(i)];
        const auto& y = b[static_cast<size_t>(j)];
        for (size_t d = 0; d < x.size(); ++d) {
            const double diff = x[d] - y[d];
            s += diff * diff;
        }
        return std::sqrt(s);
    };

    std::vector<double> prev(static_cast<size_t>(m), inf), cur(static_cast<size_t>(m), inf);
    for (int64_t i = 0; i < n; ++i) {
        std::fill(cur.begin(), cur.end(), inf);
        int64_t j_lo = 0, j_hi = m - 1;
        if (band > 0) {
            // slope-normalized band center
            const int64_t center = m == 1 ? 0 : (i * (m - 1)) / std::max<int64_t>(1, n - 1);
            j_lo = std::max<int64_t>(0, center - band);
            j_hi = std::min<int64_t>(m - 1, center + band);
        }
        for (int64_t j = j_lo; j <= j_hi; ++j) {
            double best;
            if (i == 0 && j == 0)
                best = 0.0;
            else if (i == 0)
                best = cur[static_cast<size_t>(j - 1)];
            else if (j == 0)
                best = prev[0];
            else
                best = std::min({prev[static_cast<size_t>(j)], cur[static_cast<size_t>(j - 1)],
                                 prev[static_cast<size_t>(j - 1)]});
            cur[static_cast<size_t>(j)] = best + cost(i, j);
        }
        std::swap(prev, cur);
    }
    return prev[static_cast<size_t>(m - 1)];
}

} // namespace cyclemine
