#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <vector>

#include "mta.hpp"
#include "period.hpp"
#include "tokenizer.hpp"

namespace cyclemine {

/// One buffered segment of the run-compressed transcript. Runs keep their
/// true frame extents so refined boundaries come out at frame resolution.
struct SegmentSlice {
    std::vector<TokenRun> runs;
    int64_t nominal_begin = 0;
    int64_t nominal_end = 0;
    int64_t range_begin = 0; // buffered, clipped to [0, T)
    int64_t range_end = 0;

    std::vector<Token> tokens() const {
        std::vector<Token> out;
        out.reserve(runs.size());
        for (const auto& r : runs) out.push_back(r.token);
        return out;
    }
};

/// Cuts the run sequence into consecutive windows of length w extended by
/// buffer*w on both sides (clipped to the stream). A final partial window
/// shorter than w/2 is merged into its predecessor, otherwise kept.
inline std::vector<SegmentSlice> segment_transcript(const TokenRunSequence& runs, int64_t w,
                                                    double buffer) {
    if (!(buffer >= 0.0 && buffer < 0.5)) throw OutOfRange("buffer must be in [0, 0.5)");
    if (w < 2) throw OutOfRange("window must be >= 2");
    const int64_t t_len = runs.total_frames();
    if (t_len < 2 * w) throw WindowTooLarge("stream shorter than two windows");

    std::vector<std::pair<int64_t, int64_t>> nominal;
    const int64_t full = t_len / w;
    for (int64_t i = 0; i < full; ++i) nominal.emplace_back(i * w, (i + 1) * w);
    const int64_t rem = t_len - full * w;
    if (rem > 0) {
        if (2 * rem >= w)
            nominal.emplace_back(full * w, t_len);
        else
            nominal.back().second = t_len;
    }

    const int64_t pad = std::llround(buffer * static_cast<double>(w));
    std::vector<SegmentSlice> out;
    out.reserve(nominal.size());
    for (const auto& [nb, ne] : nominal) {
        SegmentSlice seg;
        seg.nominal_begin = nb;
        seg.nominal_end = ne;
        seg.range_begin = std::max<int64_t>(0, nb - pad);
        seg.range_end = std::min<int64_t>(t_len, ne + pad);
        for (const auto& r : runs.runs)
            if (r.begin < seg.range_end && r.end > seg.range_begin) seg.runs.push_back(r);
        out.push_back(std::move(seg));
    }
    return out;
}

/// Alignment columns kept after trimming, plus each row's retained token
/// window [first, last) in pre-trim non-gap positions.
struct TrimmedAlignment {
    Alignment alignment;
    size_t col_begin = 0;
    size_t col_end = 0;
    std::vector<std::pair<size_t, size_t>> row_token_window;
};

namespace detail {

inline bool majority_gap(const std::vector<std::vector<Token>>& rows, size_t col) {
    size_t gaps = 0;
    for (const auto& row : rows)
        if (row[col] == kGap) ++gaps;
    return 2 * gaps > rows.size();
}

/// Forward recurring-motif scan: the first position (after the head) whose
/// token equals the head token once every distinct token of the span has
/// already appeared marks the start of the next repetition.
inline std::optional<size_t> motif_cut(const std::vector<Token>& cons, size_t lo, size_t hi) {
    if (hi - lo < 2) return std::nullopt;
    std::set<Token> need(cons.begin() + static_cast<long>(lo), cons.begin() + static_cast<long>(hi));
    std::set<Token> seen;
    const Token start = cons[lo];
    for (size_t c = lo; c < hi; ++c) {
        if (c > lo && cons[c] == start && seen.size() == need.size()) return c;
        seen.insert(cons[c]);
    }
    return std::nullopt;
}

} // namespace detail

struct TrimOptions {
    /// Run the bidirectional recurring-motif pass over the column
    /// consensus. The miner turns this off and masks spill by frame
    /// anchors instead, which survives fragmented consensus rows.
    bool motif = true;
};

/// Removes buffer-induced redundancy from an alignment of buffered
/// segments: (a) leading/trailing majority-gap columns; (b) columns before
/// the first segment's start symbol (the stream begins at a period start,
/// so row 0 carries no left spill and its leading gaps are boundary
/// points); (c) a bidirectional recurring-motif pass over the column
/// consensus that cuts inter-repetition spill the gap rules missed. The
/// trailing edge is left to the motif pass on purpose: the last segment
/// may be a mid-period fragment (truncated streams) whose trailing gaps
/// say nothing about the workflow's end.
inline TrimmedAlignment trim_alignment(const Alignment& al, const TrimOptions& opt = {}) {
    const size_t cols = al.columns();
    const size_t m = al.rows.size();
    if (cols == 0 || m == 0) throw DegenerateAlignment("empty alignment");

    size_t lo = 0, hi = cols;
    while (lo < hi && detail::majority_gap(al.rows, lo)) ++lo;
    while (hi > lo && detail::majority_gap(al.rows, hi - 1)) --hi;

    const auto& first_row = al.rows.front();
    size_t first_tok = lo;
    while (first_tok < hi && first_row[first_tok] == kGap) ++first_tok;
    lo = std::min(first_tok, hi);
    if (hi <= lo) throw DegenerateAlignment("trimming removed every column");

    if (opt.motif) {
        std::vector<Token> cons = detail::column_consensus(al.rows);
        if (auto cut = detail::motif_cut(cons, lo, hi)) hi = *cut;
        // mirror pass over the reversed consensus trims the left context
        std::vector<Token> rev(cons.begin() + static_cast<long>(lo),
                               cons.begin() + static_cast<long>(hi));
        std::reverse(rev.begin(), rev.end());
        if (auto cut = detail::motif_cut(rev, 0, rev.size())) lo = hi - *cut;
        if (hi <= lo) throw DegenerateAlignment("trimming removed every column");
    }

    TrimmedAlignment out;
    out.col_begin = lo;
    out.col_end = hi;
    out.alignment.rows.assign(m, {});
    out.row_token_window.resize(m);
    for (size_t r = 0; r < m; ++r) {
        size_t lead = 0;
        for (size_t c = 0; c < lo; ++c)
            if (al.rows[r][c] != kGap) ++lead;
        size_t kept = 0;
        for (size_t c = lo; c < hi; ++c) {
            out.alignment.rows[r].push_back(al.rows[r][c]);
            if (al.rows[r][c] != kGap) ++kept;
        }
        out.row_token_window[r] = {lead, lead + kept};
    }
    std::vector<Token> column(m);
    for (size_t c = 0; c < out.alignment.columns(); ++c) {
        for (size_t r = 0; r < m; ++r) column[r] = out.alignment.rows[r][c];
        out.alignment.score += static_cast<double>(score_match(column));
    }
    return out;
}

/// Builds the multi-branch workflow from a trimmed alignment. Column
/// support below half the rows is treated as noise (a single deviant
/// segment must not mint a slot), which keeps the slot count at or below
/// the column count. Durations come from the retained runs' frame lengths.
inline Workflow build_workflow(const std::vector<std::vector<Token>>& rows,
                               const std::vector<std::vector<TokenRun>>& row_runs) {
    if (rows.empty() || rows.front().empty()) throw DegenerateAlignment("no columns to build from");
    const size_t m = rows.size();
    const size_t cols = rows.front().size();

    std::vector<size_t> cursor(m, 0);
    Workflow wf;
    for (size_t c = 0; c < cols; ++c) {
        Slot slot;
        std::map<Token, int> counts;
        std::vector<double> durations;
        for (size_t r = 0; r < m; ++r) {
            const Token tok = rows[r][c];
            if (tok == kGap) {
                slot.skippable = true;
                continue;
            }
            ++counts[tok];
            slot.alternatives.insert(tok);
            durations.push_back(static_cast<double>(row_runs[r][cursor[r]].length()));
            ++cursor[r];
        }
        if (durations.empty()) continue;       // all-gap column (filtered rows)
        if (2 * durations.size() < m) continue; // sub-majority support: noise column
        int best_n = 0;
        for (const auto& [tok, n] : counts)
            if (n > best_n) {
                slot.primary = tok;
                best_n = n;
            }
        double mean = 0.0;
        for (double d : durations) mean += d;
        mean /= static_cast<double>(durations.size());
        double var = 0.0;
        for (double d : durations) var += (d - mean) * (d - mean);
        slot.mean_duration = std::max(1.0, mean);
        slot.duration_var = var / static_cast<double>(durations.size());
        wf.slots.push_back(std::move(slot));
    }
    if (wf.slots.empty()) throw DegenerateAlignment("no supported columns");

    wf.start_symbol = wf.slots.front().primary;
    for (const auto& slot : wf.slots)
        if (!slot.skippable) {
            wf.start_symbol = slot.primary;
            break;
        }
    return wf;
}

struct MineConfig {
    int k = 0; // 0 -> auto-K sweep over [auto_k_min, auto_k_max]
    int auto_k_min = 6;
    int auto_k_max = 14;
    double buffer = 0.2;
    PeriodConfig period;
    MtaConfig mta;
    uint64_t seed = 0;
    bool znorm = false;
};

struct MiningResult {
    Workflow workflow;
    PeriodSegmentation segmentation;
    int64_t window = 0;
    HardTranscript transcript;
    Alignment alignment;
    Codebook codebook;
};

/// Full Step-1 + Step-2 pipeline: tokenize, estimate the period window,
/// segment with buffers, align, trim, and assemble workflow plus refined
/// boundaries. Deterministic for fixed (seq, cfg).
inline MiningResult mine(const FeatureSequence& seq, const MineConfig& cfg = {}) {
    validate_sequence(seq);
    const FeatureSequence& input = cfg.znorm ? znormalize(seq) : seq;

    MiningResult res;
    res.codebook = cfg.k > 0 ? fit_codebook(input, cfg.k, cfg.seed)
                             : fit_codebook_auto(input, cfg.seed, cfg.auto_k_min, cfg.auto_k_max);
    res.transcript = hard_tokenize(input, res.codebook);
    const SoftTranscript soft = soft_tokenize(input, res.codebook);

    res.window = estimate_period_window(soft, res.transcript, cfg.period);

    const TokenRunSequence runs = rle_compress(res.transcript);
    const auto segments = segment_transcript(runs, res.window, cfg.buffer);

    std::vector<std::vector<Token>> transcripts;
    transcripts.reserve(segments.size());
    for (const auto& s : segments) transcripts.push_back(s.tokens());
    const Alignment aligned = align_transcripts(transcripts, cfg.mta);
    const TrimmedAlignment trimmed = trim_alignment(aligned, TrimOptions{.motif = false});
    res.alignment = trimmed.alignment;

    // Buffer spill that survived the column trim is masked per cell by its
    // frame anchors: a run belongs to its segment's period only when at
    // least half of it overlaps the nominal (unbuffered) window. Masked
    // cells become gaps so spill can neither mint workflow slots nor drag
    // the refined boundaries outward.
    const size_t cols = trimmed.alignment.columns();
    std::vector<std::vector<Token>> masked_rows;
    std::vector<std::vector<TokenRun>> masked_runs;
    for (size_t r = 0; r < segments.size(); ++r) {
        const auto [from, to] = trimmed.row_token_window[r];
        std::vector<Token> row = trimmed.alignment.rows[r];
        std::vector<TokenRun> core_runs;
        size_t cell = from;
        for (size_t c = 0; c < cols && cell < to; ++c) {
            if (row[c] == kGap) continue;
            const TokenRun& run = segments[r].runs[cell++];
            const int64_t overlap = std::min(run.end, segments[r].nominal_end) -
                                    std::max(run.begin, segments[r].nominal_begin);
            if (2 * overlap >= run.length())
                core_runs.push_back(run);
            else
                row[c] = kGap;
        }
        masked_runs.push_back(std::move(core_runs));
        masked_rows.push_back(std::move(row));
    }

    // a row supporting less than half the median core size is a fragment of
    // a drifted or truncated window, not a period
    std::vector<size_t> supports;
    for (const auto& rr : masked_runs) supports.push_back(rr.size());
    std::vector<size_t> sorted_supports = supports;
    std::sort(sorted_supports.begin(), sorted_supports.end());
    const size_t median_support = sorted_supports[sorted_supports.size() / 2];
    std::vector<std::vector<Token>> kept_rows;
    std::vector<std::vector<TokenRun>> kept_runs;
    for (size_t r = 0; r < masked_runs.size(); ++r) {
        if (masked_runs[r].empty() || 2 * supports[r] < median_support) continue;
        kept_runs.push_back(std::move(masked_runs[r]));
        kept_rows.push_back(std::move(masked_rows[r]));
    }
    if (kept_runs.empty()) throw DegenerateAlignment("no segment survived trimming");

    res.workflow = build_workflow(kept_rows, kept_runs);

    // refined boundaries from run anchors, overlaps resolved at midpoints
    const int64_t t_len = runs.total_frames();
    std::vector<std::pair<int64_t, int64_t>> spans;
    for (const auto& rr : kept_runs) {
        int64_t b = std::max<int64_t>(0, rr.front().begin);
        int64_t e = std::min<int64_t>(t_len, rr.back().end);
        spans.emplace_back(b, e);
    }
    std::sort(spans.begin(), spans.end());
    for (size_t i = 0; i + 1 < spans.size(); ++i) {
        if (spans[i].second > spans[i + 1].first) {
            const int64_t mid = (spans[i].second + spans[i + 1].first) / 2;
            spans[i].second = mid;
            spans[i + 1].first = std::max(spans[i + 1].first, mid);
        }
    }
    int64_t watermark = 0;
    for (auto& [b, e] : spans) {
        b = std::max(b, watermark);
        if (b >= e) continue;
        res.segmentation.boundaries.emplace_back(static_cast<double>(b), static_cast<double>(e));
        watermark = e;
    }
    res.segmentation.count = static_cast<int>(res.segmentation.boundaries.size());
    res.segmentation.validate();
    return res;
}

} // namespace cyclemine
