#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "dtw.hpp"
#include "spectrum.hpp"

namespace cyclemine {

enum class WindowToken { soft, hard };

struct PeriodConfig {
    int64_t min_window = 2;
    int64_t max_window = 0; // 0 -> floor(T / 3)
    int top_f = 3;
    bool rerank = true;
    WindowToken window_token = WindowToken::soft;
    int64_t dtw_band = 0; // 0 -> unconstrained
};

/// Re-ranks window candidates by mean DTW distance between consecutive
/// segments of that length (normalized by the window), ascending. The
/// final partial segment is kept when it is at least half a window long.
/// Candidates that produce fewer than two segments are dropped; if every
/// candidate drops, DegeneratePartition is thrown.
///
/// Candidates whose scores sit within a relative band of the best are
/// treated as ties and keep their incoming (spectral-magnitude) order: a
/// window and its double both partition the stream self-consistently, so
/// DTW separates them only by noise, while a genuinely wrong window loses
/// by a wide margin.
inline WindowCandidates rerank_windows(const SoftTranscript& st, const WindowCandidates& wc,
                                       int64_t dtw_band = 0) {
    if (wc.windows.empty()) throw OutOfRange("no candidates to rerank");
    const int64_t t_len = static_cast<int64_t>(st.size());

    struct Scored {
        int64_t window;
        double score;
        size_t input_rank;
    };
    std::vector<Scored> scored;
    for (size_t r = 0; r < wc.windows.size(); ++r) {
        const int64_t w = wc.windows[r];
        std::vector<std::pair<int64_t, int64_t>> segs;
        int64_t pos = 0;
        while (pos + w <= t_len) {
            segs.emplace_back(pos, pos + w);
            pos += w;
        }
        if (t_len - pos >= (w + 1) / 2 && t_len - pos > 0) segs.emplace_back(pos, t_len);
        if (segs.size() < 2) continue;

        double total = 0.0;
        for (size_t i = 0; i + 1 < segs.size(); ++i) {
            std::span<const std::vector<double>> a(st.rows.data() + segs[i].first,
                                                   static_cast<size_t>(segs[i].second - segs[i].first));
            std::span<const std::vector<double>> b(st.rows.data() + segs[i + 1].first,
                                                   static_cast<size_t>(segs[i + 1].second - segs[i + 1].first));
            total += dtw_distance(a, b, dtw_band);
        }
        const double mean = total / static_cast<double>(segs.size() - 1);
        scored.push_back({w, mean / static_cast<double>(w), r});
    }
    if (scored.empty()) throw DegeneratePartition("every candidate yields < 2 segments");

    std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score < b.score;
        return a.input_rank < b.input_rank;
    });
    constexpr double kTieBand = 2.0;
    const double cutoff = scored.front().score * kTieBand + 1e-12;
    std::stable_sort(scored.begin(), scored.end(), [&](const Scored& a, const Scored& b) {
        const bool a_tied = a.score <= cutoff;
        const bool b_tied = b.score <= cutoff;
        if (a_tied && b_tied) return a.input_rank < b.input_rank;
        return a_tied && !b_tied;
    });
    WindowCandidates out;
    for (const auto& s : scored) out.windows.push_back(s.window);
    return out;
}

/// Step-1 window estimation: magnitude marginal -> top-f windows -> DTW
/// re-ranking (skippable for the ablation arm). The hard-token variant
/// replaces the 2D marginal with a 1D spectrum of the token signal; the
/// re-ranking DTW always runs on soft rows.
inline int64_t estimate_period_window(const SoftTranscript& st, const HardTranscript& ht,
                                      const PeriodConfig& cfg = {}) {
    const int64_t t_len = static_cast<int64_t>(st.size());
    const int64_t max_window = cfg.max_window > 0 ? cfg.max_window : t_len / 3;
    if (t_len < 3 * cfg.min_window) throw SequenceTooShort("need T >= 3 * min_window");

    const MagnitudeSpectrum ms = cfg.window_token == WindowToken::soft
                                     ? marginal_spectrum(st)
                                     : hard_token_spectrum(ht);
    WindowCandidates wc = top_windows(ms, cfg.min_window, max_window, cfg.top_f);
    if (cfg.rerank) wc = rerank_windows(st, wc, cfg.dtw_band);
    return wc.windows.front();
}

inline int64_t estimate_period_window(const SoftTranscript& st, const PeriodConfig& cfg = {}) {
    HardTranscript ht;
    if (cfg.window_token == WindowToken::hard) {
        ht.tokens.reserve(st.size());
        for (const auto& row : st.rows)
            ht.tokens.push_back(static_cast<Token>(
                std::max_element(row.begin(), row.end()) - row.begin()));
    }
    return estimate_period_window(st, ht, cfg);
}

} // namespace cyclemine
