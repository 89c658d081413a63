#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"

namespace cyclemine {

/// Mean absolute percentage error of period counts. Ground-truth counts
/// below 3 are invalid under the benchmark contract.
inline double mape(const std::vector<int>& preds, const std::vector<int>& gts) {
    if (preds.size() != gts.size()) throw LengthMismatch("mape inputs differ in length");
    if (preds.empty()) throw LengthMismatch("mape needs at least one sequence");
    double acc = 0.0;
    for (size_t i = 0; i < preds.size(); ++i) {
        if (gts[i] < 3) throw InvalidGroundTruth("ground-truth count below 3");
        acc += std::abs(static_cast<double>(preds[i]) - static_cast<double>(gts[i])) /
               static_cast<double>(gts[i]);
    }
    return acc / static_cast<double>(preds.size());
}

/// Temporal intersection-over-union of two intervals.
inline double tiou_interval(const Interval& a, const Interval& b) {
    const double inter = std::min(a.end, b.end) - std::max(a.begin, b.begin);
    const double uni = std::max(a.end, b.end) - std::min(a.begin, b.begin);
    return std::max(0.0, inter) / uni;
}

struct AssignmentResult {
    std::vector<std::pair<int, int>> pairs; // (row, col), min(R, C) of them
    double total = 0.0;
};

/// Maximum-total-score one-to-one assignment over an R x C score matrix
/// (Jonker-Volgenant style shortest augmenting paths on the negated,
/// square-padded matrix; O(n^3)).
inline AssignmentResult hungarian(const std::vector<std::vector<double>>& scores) {
    const int rows = static_cast<int>(scores.size());
    if (rows == 0) throw LengthMismatch("empty score matrix");
    const int cols = static_cast<int>(scores.front().size());
    if (cols == 0) throw LengthMismatch("empty score matrix");
    const int n = std::max(rows, cols);

    double max_entry = 0.0;
    for (const auto& row : scores) {
        if (static_cast<int>(row.size()) != cols) throw LengthMismatch("ragged score matrix");
        for (double v : row) max_entry = std::max(max_entry, std::abs(v));
    }
    auto cost = [&](int r, int c) {
        if (r >= rows || c >= cols) return max_entry; // padding, constant
        return max_entry - scores[r][c];
    };

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            int j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }

    AssignmentResult out;
    for (int j = 1; j <= n; ++j) {
        const int r = match[j] - 1, c = j - 1;
        if (r < rows && c < cols) {
            out.pairs.emplace_back(r, c);
            out.total += scores[r][c];
        }
    }
    std::sort(out.pairs.begin(), out.pairs.end());
    // a perfect matching on the padded square always routes the surplus side
    // through padding, so exactly min(R, C) real pairs come out
    return out;
}

/// Hungarian-matched mean tIoU of period boundaries, normalized by the
/// ground-truth count m_i (unmatched ground-truth periods contribute 0,
/// surplus predictions contribute nothing). An empty prediction scores 0.
inline double tiou_period_sequence(const PeriodSegmentation& pred, const PeriodSegmentation& gt) {
    if (gt.boundaries.empty()) throw InvalidGroundTruth("ground truth has no periods");
    if (pred.boundaries.empty()) return 0.0;
    std::vector<std::vector<double>> scores(pred.boundaries.size(),
                                            std::vector<double>(gt.boundaries.size(), 0.0));
    for (size_t i = 0; i < pred.boundaries.size(); ++i)
        for (size_t j = 0; j < gt.boundaries.size(); ++j)
            scores[i][j] = tiou_interval(pred.boundaries[i], gt.boundaries[j]);
    return hungarian(scores).total / static_cast<double>(gt.boundaries.size());
}

inline double tiou_period(const std::vector<PeriodSegmentation>& preds,
                          const std::vector<PeriodSegmentation>& gts) {
    if (preds.size() != gts.size()) throw LengthMismatch("tiou_period inputs differ in length");
    if (preds.empty()) throw LengthMismatch("tiou_period needs at least one sequence");
    double acc = 0.0;
    for (size_t i = 0; i < preds.size(); ++i) {
        if (gts[i].boundaries.size() < 3) throw InvalidGroundTruth("ground truth needs >= 3 periods");
        acc += tiou_period_sequence(preds[i], gts[i]);
    }
    return acc / static_cast<double>(preds.size());
}

/// Mean absolute error of remaining-proportion estimates (all in [0, 1]).
inline double mae(const std::vector<double>& preds, const std::vector<double>& gts) {
    if (preds.size() != gts.size()) throw LengthMismatch("mae inputs differ in length");
    if (preds.empty()) throw LengthMismatch("mae needs at least one sequence");
    double acc = 0.0;
    for (size_t i = 0; i < preds.size(); ++i) {
        if (!(preds[i] >= 0.0 && preds[i] <= 1.0 && gts[i] >= 0.0 && gts[i] <= 1.0))
            throw OutOfRange("remaining proportions must lie in [0, 1]");
        acc += std::abs(preds[i] - gts[i]);
    }
    return acc / static_cast<double>(preds.size());
}

/// Mean anomaly tIoU; a missing prediction scores 0 (no Hungarian matching
/// here, one anomaly per sequence).
inline double tiou_anomaly(const std::vector<std::optional<Interval>>& preds,
                           const std::vector<Interval>& gts) {
    if (preds.size() != gts.size()) throw LengthMismatch("tiou_anomaly inputs differ in length");
    if (preds.empty()) throw LengthMismatch("tiou_anomaly needs at least one sequence");
    double acc = 0.0;
    for (size_t i = 0; i < preds.size(); ++i)
        if (preds[i]) acc += tiou_interval(*preds[i], gts[i]);
    return acc / static_cast<double>(preds.size());
}

/// Per-sequence metric values; absent pieces (e.g. no anomaly annotation)
/// stay unset and are excluded from the corresponding aggregate.
struct SequenceEval {
    std::string id;
    std::optional<double> count_error;   // |m_hat - m| / m
    std::optional<double> tiou_period;
    std::optional<double> completion_error; // |z_hat - z|
    std::optional<double> tiou_anomaly;
};

struct EvalReport {
    double mape = 0.0;
    double tiou_period = 0.0;
    double mae = 0.0;
    double tiou_anomaly = 0.0;
    std::vector<SequenceEval> per_sequence;

    /// Aggregates are the plain means of the per-sequence fields.
    static EvalReport aggregate(std::vector<SequenceEval> items) {
        EvalReport rep;
        rep.per_sequence = std::move(items);
        double n_count = 0, n_tiou = 0, n_mae = 0, n_anom = 0;
        for (const auto& s : rep.per_sequence) {
            if (s.count_error) {
                rep.mape += *s.count_error;
                ++n_count;
            }
            if (s.tiou_period) {
                rep.tiou_period += *s.tiou_period;
                ++n_tiou;
            }
            if (s.completion_error) {
                rep.mae += *s.completion_error;
                ++n_mae;
            }
            if (s.tiou_anomaly) {
                rep.tiou_anomaly += *s.tiou_anomaly;
                ++n_anom;
            }
        }
        if (n_count > 0) rep.mape /= n_count;
        if (n_tiou > 0) rep.tiou_period /= n_tiou;
        if (n_mae > 0) rep.mae /= n_mae;
        if (n_anom > 0) rep.tiou_anomaly /= n_anom;
        return rep;
    }
};

} // namespace cyclemine
