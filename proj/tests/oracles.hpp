#pragma once

// Brute-force reference implementations used as test oracles. These stay
// deliberately naive and independent of the library's algorithmic paths:
// direct double sums, unmemoized recursions, and full enumerations.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include <cyclemine/core.hpp>
#include <cyclemine/mta.hpp>

namespace oracle {

using cyclemine::Token;
using cyclemine::kGap;

/// Literal O(T^2 K^2) evaluation of the 2D DFT and its token-axis
/// magnitude marginal.
inline std::vector<double> direct_marginal_spectrum(const std::vector<std::vector<double>>& rows) {
    const size_t t_len = rows.size();
    const size_t k = rows.front().size();
    const double pi = 3.141592653589793238462643383280;
    std::vector<double> mags(t_len, 0.0);
    for (size_t v = 0; v < t_len; ++v) {
        for (size_t u = 0; u < k; ++u) {
            std::complex<double> f(0.0, 0.0);
            for (size_t t = 0; t < t_len; ++t)
                for (size_t c = 0; c < k; ++c) {
                    const double ang = -2.0 * pi *
                                       (static_cast<double>(u * c) / static_cast<double>(k) +
                                        static_cast<double>(v * t) / static_cast<double>(t_len));
                    f += rows[t][c] * std::complex<double>(std::cos(ang), std::sin(ang));
                }
            mags[v] += std::abs(f);
        }
    }
    return mags;
}

/// DTW by exhaustive enumeration of all monotone warping paths, costs
/// accumulated front-to-back exactly like the DP does.
inline double dtw_enumerate(const std::vector<std::vector<double>>& a,
                            const std::vector<std::vector<double>>& b) {
    const size_t n = a.size(), m = b.size();
    auto cost = [&](size_t i, size_t j) {
        double s = 0.0;
        for (size_t d = 0; d < a[i].size(); ++d) {
            const double diff = a[i][d] - b[j][d];
            s += diff * diff;
        }
        return std::sqrt(s);
    };
    double best = std::numeric_limits<double>::infinity();
    auto walk = [&](auto&& self, size_t i, size_t j, double acc) -> void {
        acc += cost(i, j);
        if (i == n - 1 && j == m - 1) {
            best = std::min(best, acc);
            return;
        }
        if (i + 1 < n) self(self, i + 1, j, acc);
        if (j + 1 < m) self(self, i, j + 1, acc);
        if (i + 1 < n && j + 1 < m) self(self, i + 1, j + 1, acc);
    };
    walk(walk, 0, 0, 0.0);
    return best;
}

/// Boundary value of the alignment DP lattice exactly as InitializeMatrix
/// defines it: zero origin, linspace(0, -m*d, d) along each 1-D edge, zero
/// on every higher-dimensional face.
inline double boundary_value(std::span<const size_t> pos, std::span<const size_t> dims, size_t m) {
    size_t nonzero = 0, axis = 0;
    for (size_t i = 0; i < pos.size(); ++i)
        if (pos[i] != 0) {
            ++nonzero;
            axis = i;
        }
    if (nonzero == 0) return 0.0;
    if (nonzero == 1) {
        const double d = static_cast<double>(dims[axis]);
        return -static_cast<double>(m) * d * static_cast<double>(pos[axis]) / (d - 1.0);
    }
    return 0.0; // face: never filled by the recurrence
}

/// Optimal joint alignment score by unmemoized recursion over every
/// neighbor move, anchored on the boundary profile above. Feasible for
/// short strings only; independent of the DP fill and backtrace code.
inline double mta_score_enumerate(const std::vector<std::vector<Token>>& transcripts) {
    const size_t m = transcripts.size();
    std::vector<size_t> dims(m);
    for (size_t i = 0; i < m; ++i) dims[i] = transcripts[i].size() + 1;

    auto rec = [&](auto&& self, std::vector<size_t>& pos) -> double {
        bool interior = true;
        for (size_t p : pos)
            if (p == 0) {
                interior = false;
                break;
            }
        if (!interior) return boundary_value(pos, dims, m);
        double best = -std::numeric_limits<double>::infinity();
        std::vector<Token> column(m);
        std::vector<size_t> prev(m);
        for (uint64_t mask = 1; mask < (uint64_t{1} << m); ++mask) {
            for (size_t i = 0; i < m; ++i) {
                if ((mask >> i) & 1) {
                    prev[i] = pos[i] - 1;
                    column[i] = transcripts[i][pos[i] - 1];
                } else {
                    prev[i] = pos[i];
                    column[i] = kGap;
                }
            }
            best = std::max(best, self(self, prev) +
                                      static_cast<double>(cyclemine::score_match(column)));
        }
        return best;
    };
    std::vector<size_t> corner(m);
    for (size_t i = 0; i < m; ++i) corner[i] = dims[i] - 1;
    return rec(rec, corner);
}

/// Maximum assignment total by trying every permutation of the padded
/// square matrix.
inline double hungarian_enumerate(const std::vector<std::vector<double>>& scores) {
    const size_t rows = scores.size(), cols = scores.front().size();
    const size_t n = std::max(rows, cols);
    std::vector<size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = -std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (size_t r = 0; r < n; ++r)
            if (r < rows && perm[r] < cols) total += scores[r][perm[r]];
        best = std::max(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

/// Best 2-clustering by enumerating every assignment of points to two
/// groups; returns the two group means ordered by first coordinate.
inline std::vector<std::vector<double>> best_two_clusters(
    const std::vector<std::vector<double>>& pts) {
    const size_t n = pts.size();
    const size_t dim = pts.front().size();
    double best_sse = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> best_means;
    for (uint64_t mask = 1; mask + 1 < (uint64_t{1} << n); ++mask) {
        std::vector<std::vector<double>> means(2, std::vector<double>(dim, 0.0));
        std::vector<size_t> counts(2, 0);
        for (size_t i = 0; i < n; ++i) {
            const size_t g = (mask >> i) & 1;
            ++counts[g];
            for (size_t d = 0; d < dim; ++d) means[g][d] += pts[i][d];
        }
        if (counts[0] == 0 || counts[1] == 0) continue;
        for (size_t g = 0; g < 2; ++g)
            for (size_t d = 0; d < dim; ++d) means[g][d] /= static_cast<double>(counts[g]);
        double sse = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const size_t g = (mask >> i) & 1;
            for (size_t d = 0; d < dim; ++d) {
                const double diff = pts[i][d] - means[g][d];
                sse += diff * diff;
            }
        }
        if (sse < best_sse) {
            best_sse = sse;
            best_means = means;
        }
    }
    std::sort(best_means.begin(), best_means.end());
    return best_means;
}

/// Eq.-6 row by direct scalar evaluation, no max-shift.
inline std::vector<double> soft_row_direct(const std::vector<double>& x,
                                           const std::vector<std::vector<double>>& centroids) {
    std::vector<double> row(centroids.size());
    double denom = 0.0;
    for (size_t k = 0; k < centroids.size(); ++k) {
        double d2 = 0.0;
        for (size_t d = 0; d < x.size(); ++d) d2 += (x[d] - centroids[k][d]) * (x[d] - centroids[k][d]);
        row[k] = std::exp(-std::sqrt(d2));
        denom += row[k];
    }
    for (double& v : row) v /= denom;
    return row;
}

} // namespace oracle
