#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "core.hpp"

namespace cyclemine {

/// m equal-length gapped rows; removing the gaps from row i reproduces
/// input transcript i exactly.
struct Alignment {
    std::vector<std::vector<Token>> rows;
    double score = 0.0;

    size_t columns() const { return rows.empty() ? 0 : rows.front().size(); }
};

struct MtaConfig {
    int max_joint = 4;               // joint DP beyond this many transcripts is refused
    uint64_t max_cells = 50'000'000; // product of (len_i + 1) bound
    int gap_penalty = -1;            // echoed in reports; the column gap cost
                                     // comes from score_match, not from here
};

/// Column score: -(#gaps) when any gap is present, otherwise the number of
/// equal ordered token pairs (including i == j) minus the column height.
/// An all-match column of m tokens scores m^2 - m; a full mismatch scores 0.
inline int score_match(std::span<const Token> chars) {
    int gaps = 0;
    for (Token c : chars)
        if (c == kGap) ++gaps;
    if (gaps > 0) return -gaps;
    int equal_pairs = 0;
    for (size_t i = 0; i < chars.size(); ++i)
        for (size_t j = 0; j < chars.size(); ++j)
            if (chars[i] == chars[j]) ++equal_pairs;
    return equal_pairs - static_cast<int>(chars.size());
}

/// All DP positions reachable by decrementing a nonempty subset of the
/// coordinates of pos (coordinates already at 0 stay put). Enumerated in
/// ascending subset-bitmask order with bit i addressing coordinate i,
/// deduplicated, pos itself excluded. This enumeration order is the
/// backtrace tie-break, so it is part of the contract.
inline std::vector<std::vector<size_t>> get_neighbors(std::span<const size_t> pos,
                                                      std::span<const size_t> dims) {
    const size_t m = pos.size();
    std::vector<std::vector<size_t>> out;
    for (uint64_t mask = 1; mask < (uint64_t{1} << m); ++mask) {
        std::vector<size_t> nb(pos.begin(), pos.end());
        bool moved = false;
        for (size_t i = 0; i < m; ++i) {
            if ((mask >> i) & 1 && pos[i] > 0) {
                --nb[i];
                moved = true;
            }
        }
        if (!moved) continue;
        if (std::find(out.begin(), out.end(), nb) == out.end()) out.push_back(std::move(nb));
    }
    (void)dims;
    return out;
}

/// Score array plus predecessor lists over the (len_0+1) x ... x
/// (len_{m-1}+1) DP lattice, flattened row-major (last axis fastest).
/// Predecessor lists live in one pooled buffer; offsets are monotone in
/// flat index because the fill visits cells in lexicographic order.
struct DPState {
    std::vector<size_t> dims;
    std::vector<uint64_t> strides;
    std::vector<double> score;
    std::vector<uint64_t> pred_offsets; // size cells + 1
    std::vector<uint64_t> pred_pool;    // flat predecessor indices

    uint64_t cells() const { return score.size(); }

    uint64_t flat(std::span<const size_t> pos) const {
        uint64_t idx = 0;
        for (size_t i = 0; i < pos.size(); ++i) idx += pos[i] * strides[i];
        return idx;
    }

    void decode(uint64_t idx, std::span<size_t> pos) const {
        for (size_t i = 0; i < dims.size(); ++i) {
            pos[i] = static_cast<size_t>(idx / strides[i]);
            idx %= strides[i];
        }
    }

    std::span<const uint64_t> preds(uint64_t idx) const {
        return {pred_pool.data() + pred_offsets[idx],
                static_cast<size_t>(pred_offsets[idx + 1] - pred_offsets[idx])};
    }
};

/// Zero-filled score lattice with each 1-D edge (all other coordinates 0)
/// set to the evenly spaced profile linspace(0, -m*d, d) along that axis;
/// predecessor lists start empty. Faces of dimension >= 2 keep their zero
/// fill — that is how the recurrence treats them, so it is preserved
/// verbatim here.
inline DPState initialize_matrix(const std::vector<std::vector<Token>>& transcripts) {
    const size_t m = transcripts.size();
    if (m < 2) throw OutOfRange("need at least two transcripts");
    for (const auto& t : transcripts)
        if (t.empty()) throw EmptyTranscript("empty transcript in alignment input");

    DPState dp;
    dp.dims.resize(m);
    for (size_t i = 0; i < m; ++i) dp.dims[i] = transcripts[i].size() + 1;
    dp.strides.assign(m, 1);
    for (size_t i = m; i-- > 1;) dp.strides[i - 1] = dp.strides[i] * dp.dims[i];
    const uint64_t cells = dp.strides[0] * dp.dims[0];

    dp.score.assign(cells, 0.0);
    dp.pred_offsets.assign(cells + 1, 0);
    for (size_t axis = 0; axis < m; ++axis) {
        const double d = static_cast<double>(dp.dims[axis]);
        for (size_t c = 1; c < dp.dims[axis]; ++c)
            dp.score[c * dp.strides[axis]] =
                -static_cast<double>(m) * d * static_cast<double>(c) / (d - 1.0);
    }
    return dp;
}

/// Joint optimal alignment of m token strings by the m-dimensional DP.
/// The recurrence maximizes F[prev] + score_match over all neighbor
/// predecessors; ties keep every best move and the backtrace follows the
/// first one in enumeration order. If the backtrace reaches a boundary
/// cell with no predecessors before the origin, the residual prefixes are
/// emitted as single-token gap columns so the gap-removal round-trip holds.
inline Alignment mta_align(const std::vector<std::vector<Token>>& transcripts,
                           const MtaConfig& cfg = {}) {
    const size_t m = transcripts.size();
    if (m < 2) throw OutOfRange("need at least two transcripts");
    if (static_cast<int>(m) > cfg.max_joint)
        throw TooManySequences("joint alignment limited to " + std::to_string(cfg.max_joint) +
                               " transcripts, got " + std::to_string(m));
    uint64_t cells = 1;
    for (const auto& t : transcripts) {
        if (t.empty()) throw EmptyTranscript("empty transcript in alignment input");
        if (cells > cfg.max_cells / (t.size() + 1))
            throw MatrixTooLarge("DP lattice exceeds max_cells");
        cells *= t.size() + 1;
    }

    DPState dp = initialize_matrix(transcripts);
    dp.pred_pool.reserve(cells);

    std::vector<size_t> pos(m);
    std::array<Token, 16> column{};
    std::vector<uint64_t> best_moves;
    for (uint64_t idx = 0; idx < dp.cells(); ++idx) {
        dp.decode(idx, pos);
        bool interior = true;
        for (size_t i = 0; i < m; ++i)
            if (pos[i] == 0) {
                interior = false;
                break;
            }
        if (!interior) {
            dp.pred_offsets[idx + 1] = dp.pred_pool.size();
            continue;
        }

        double max_score = -std::numeric_limits<double>::infinity();
        best_moves.clear();
        for (uint64_t mask = 1; mask < (uint64_t{1} << m); ++mask) {
            uint64_t nb = idx;
            for (size_t i = 0; i < m; ++i) {
                if ((mask >> i) & 1) {
                    nb -= dp.strides[i];
                    column[i] = transcripts[i][pos[i] - 1];
                } else {
                    column[i] = kGap;
                }
            }
            const double s = dp.score[nb] +
                             static_cast<double>(score_match({column.data(), m}));
            if (s > max_score) {
                max_score = s;
                best_moves.assign(1, nb);
            } else if (s == max_score) {
                best_moves.push_back(nb);
            }
        }
        dp.score[idx] = max_score;
        dp.pred_pool.insert(dp.pred_pool.end(), best_moves.begin(), best_moves.end());
        dp.pred_offsets[idx + 1] = dp.pred_pool.size();
    }

    // backtrace from the terminal corner
    Alignment out;
    out.rows.assign(m, {});
    uint64_t cur = dp.cells() - 1;
    out.score = dp.score[cur];
    std::vector<size_t> prev_pos(m);
    while (true) {
        dp.decode(cur, pos);
        const bool at_origin = std::all_of(pos.begin(), pos.end(), [](size_t p) { return p == 0; });
        auto preds = dp.preds(cur);
        if (at_origin || preds.empty()) break;
        const uint64_t prev = preds[0];
        dp.decode(prev, prev_pos);
        for (size_t i = 0; i < m; ++i)
            out.rows[i].push_back(pos[i] != prev_pos[i] ? transcripts[i][pos[i] - 1] : kGap);
        cur = prev;
    }
    // residual prefixes at a predecessor-free boundary become gap columns
    dp.decode(cur, pos);
    for (size_t i = 0; i < m; ++i) {
        while (pos[i] > 0) {
            for (size_t r = 0; r < m; ++r)
                out.rows[r].push_back(r == i ? transcripts[i][pos[i] - 1] : kGap);
            --pos[i];
        }
    }
    for (auto& row : out.rows) std::reverse(row.begin(), row.end());
    return out;
}

/// Two-sequence case of mta_align (the modified Needleman-Wunsch).
inline Alignment pairwise_nw(const std::vector<Token>& a, const std::vector<Token>& b) {
    MtaConfig cfg;
    cfg.max_joint = 2;
    cfg.max_cells = std::numeric_limits<uint64_t>::max();
    return mta_align({a, b}, cfg);
}

namespace detail {

/// Majority non-gap token per column, ties toward the smaller token.
inline std::vector<Token> column_consensus(const std::vector<std::vector<Token>>& rows) {
    const size_t cols = rows.front().size();
    std::vector<Token> cons(cols);
    std::map<Token, int> counts;
    for (size_t c = 0; c < cols; ++c) {
        counts.clear();
        for (const auto& row : rows)
            if (row[c] != kGap) ++counts[row[c]];
        Token best = kGap;
        int best_n = 0;
        for (const auto& [tok, n] : counts)
            if (n > best_n) {
                best = tok;
                best_n = n;
            }
        cons[c] = best;
    }
    return cons;
}

} // namespace detail

/// Center-star progressive alignment for transcript counts beyond the
/// joint-DP budget. The center transcript maximizes summed pairwise NW
/// score; every other transcript is aligned against the profile consensus
/// and gaps, once inserted, stay ("once a gap, always a gap"). The score
/// is recomputed column-wise and may fall below the joint optimum.
inline Alignment progressive_align(const std::vector<std::vector<Token>>& transcripts) {
    const size_t m = transcripts.size();
    if (m < 2) throw OutOfRange("need at least two transcripts");
    for (const auto& t : transcripts)
        if (t.empty()) throw EmptyTranscript("empty transcript in alignment input");

    size_t center = 0;
    double best_sum = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (size_t j = 0; j < m; ++j)
            if (j != i) s += pairwise_nw(transcripts[i], transcripts[j]).score;
        if (s > best_sum) {
            best_sum = s;
            center = i;
        }
    }

    std::vector<std::vector<Token>> rows{transcripts[center]};
    std::vector<size_t> row_source{center};
    for (size_t j = 0; j < m; ++j) {
        if (j == center) continue;
        const std::vector<Token> cons = detail::column_consensus(rows);
        const Alignment pa = pairwise_nw(cons, transcripts[j]);
        std::vector<std::vector<Token>> merged(rows.size() + 1);
        size_t col = 0; // position in the existing profile
        for (size_t c = 0; c < pa.columns(); ++c) {
            if (pa.rows[0][c] == kGap) {
                for (size_t r = 0; r < rows.size(); ++r) merged[r].push_back(kGap);
            } else {
                for (size_t r = 0; r < rows.size(); ++r) merged[r].push_back(rows[r][col]);
                ++col;
            }
            merged[rows.size()].push_back(pa.rows[1][c]);
        }
        rows = std::move(merged);
        row_source.push_back(j);
    }

    Alignment out;
    out.rows.assign(m, {});
    for (size_t r = 0; r < rows.size(); ++r) out.rows[row_source[r]] = std::move(rows[r]);
    std::vector<Token> column(m);
    for (size_t c = 0; c < out.columns(); ++c) {
        for (size_t r = 0; r < m; ++r) column[r] = out.rows[r][c];
        out.score += static_cast<double>(score_match(column));
    }
    return out;
}

/// Joint DP when affordable, progressive otherwise.
inline Alignment align_transcripts(const std::vector<std::vector<Token>>& transcripts,
                                   const MtaConfig& cfg = {}) {
    if (static_cast<int>(transcripts.size()) <= cfg.max_joint) {
        uint64_t cells = 1;
        bool fits = true;
        for (const auto& t : transcripts) {
            if (t.empty()) throw EmptyTranscript("empty transcript in alignment input");
            if (cells > cfg.max_cells / (t.size() + 1)) {
                fits = false;
                break;
            }
            cells *= t.size() + 1;
        }
        if (fits) return mta_align(transcripts, cfg);
    }
    return progressive_align(transcripts);
}

} // namespace cyclemine
