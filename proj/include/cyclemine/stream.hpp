#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "core.hpp"

namespace cyclemine {

struct StreamConfig {
    int64_t min_anomaly_frames = 3;
    int64_t merge_gap = 5;
};

/// Two-pointer matcher state. The workflow pointer starts "at the end"
/// (no open period); a stream token matching the start symbol while the
/// pointer is at its end closes the running period and opens a new one.
struct StreamState {
    bool open = false;
    size_t slot = 0;            // workflow pointer
    bool slot_satisfied = false;
    int64_t frame = 0;          // stream pointer (next frame index)
    int64_t period_start = 0;
    int64_t slot_frames = 0;    // frames spent in the current slot
    int64_t deviation_run = 0;  // current unmatched-frame counter
    bool last_frame_matched = false;
    std::vector<bool> matched_slots;
    std::vector<Interval> completed;
};

namespace detail {

inline bool slot_accepts(const Slot& s, Token t) { return s.alternatives.count(t) > 0; }

/// True when every slot after `slot` is skippable (the pointer is
/// effectively at the workflow's end).
inline bool at_effective_end(const Workflow& wf, size_t slot) {
    for (size_t i = slot + 1; i < wf.slots.size(); ++i)
        if (!wf.slots[i].skippable) return false;
    return true;
}

/// First slot that accepts the token when scanning from the front through
/// leading skippable slots; a period can open at any such slot.
inline std::optional<size_t> opening_slot(const Workflow& wf, Token token) {
    for (size_t j = 0; j < wf.slots.size(); ++j) {
        if (slot_accepts(wf.slots[j], token)) return j;
        if (!wf.slots[j].skippable) return std::nullopt;
    }
    return std::nullopt;
}

inline void open_period(StreamState& st, size_t slot, int64_t frame, size_t n_slots) {
    st.open = true;
    st.period_start = frame;
    st.slot = slot;
    st.slot_satisfied = true;
    st.slot_frames = 1;
    st.deviation_run = 0;
    st.matched_slots.assign(n_slots, false);
    st.matched_slots[slot] = true;
    st.last_frame_matched = true;
}

} // namespace detail

/// Pure transition: consumes one token and returns the next state. The
/// checks run in the order stay -> close -> advance -> deviate: a token
/// that continues the current slot never closes a period, which keeps
/// shared alternatives between the first and last slots from splitting a
/// run across a phantom boundary.
inline StreamState step(StreamState st, Token token, const Workflow& wf) {
    const size_t n_slots = wf.slots.size();
    const int64_t frame = st.frame;
    st.frame = frame + 1;

    if (!st.open) {
        if (const auto j = detail::opening_slot(wf, token)) {
            detail::open_period(st, *j, frame, n_slots);
        } else {
            ++st.deviation_run;
            st.last_frame_matched = false;
        }
        return st;
    }

    if (detail::slot_accepts(wf.slots[st.slot], token)) {
        st.slot_satisfied = true;
        ++st.slot_frames;
        st.deviation_run = 0;
        st.matched_slots[st.slot] = true;
        st.last_frame_matched = true;
        return st;
    }

    // boundary: a period-opening token arrives while the pointer is at the
    // (effective) end of a satisfied workflow
    if (st.slot_satisfied && detail::at_effective_end(wf, st.slot)) {
        if (const auto j = detail::opening_slot(wf, token)) {
            if (frame > st.period_start)
                st.completed.emplace_back(static_cast<double>(st.period_start),
                                          static_cast<double>(frame));
            detail::open_period(st, *j, frame, n_slots);
            return st;
        }
    }

    // advance past consecutive skippable slots, then at most one more
    if (st.slot_satisfied || wf.slots[st.slot].skippable) {
        size_t j = st.slot + 1;
        while (j < n_slots && wf.slots[j].skippable && !detail::slot_accepts(wf.slots[j], token)) ++j;
        if (j < n_slots && detail::slot_accepts(wf.slots[j], token)) {
            st.slot = j;
            st.slot_satisfied = true;
            st.slot_frames = 1;
            st.deviation_run = 0;
            st.matched_slots[j] = true;
            st.last_frame_matched = true;
            return st;
        }
    }

    ++st.deviation_run;
    st.last_frame_matched = false;
    return st;
}

/// Folds step over the whole transcript. A trailing period whose pointer
/// reached the (effective) end is closed at the stream end; anything less
/// complete is excluded from the count.
inline PeriodSegmentation detect_periods(const HardTranscript& tokens, const Workflow& wf) {
    StreamState st;
    for (Token t : tokens.tokens) st = step(st, t, wf);
    if (st.open && st.slot_satisfied && st.slot > 0 && detail::at_effective_end(wf, st.slot) &&
        st.frame > st.period_start)
        st.completed.emplace_back(static_cast<double>(st.period_start), static_cast<double>(st.frame));
    PeriodSegmentation out;
    out.boundaries = std::move(st.completed);
    out.count = static_cast<int>(out.boundaries.size());
    return out;
}

struct CompletionEstimate {
    double remaining = 0.0; // in [0, 1]
};

/// Duration-weighted remaining proportion of the last open period:
/// (residue of the current slot + mean durations of all later slots) over
/// the total mean duration. A stream ending exactly on a boundary is 0.
inline CompletionEstimate track_completion(const HardTranscript& partial, const Workflow& wf) {
    StreamState st;
    for (Token t : partial.tokens) st = step(st, t, wf);
    if (!st.open) {
        if (st.completed.empty()) throw NoOpenPeriod("no period ever started");
        return {0.0};
    }
    // pointer at the effective end with the final slot satisfied: the period
    // is fully covered even though the closing token has not arrived yet
    const double total = wf.total_mean_duration();
    double rest = std::max(0.0, wf.slots[st.slot].mean_duration - static_cast<double>(st.slot_frames));
    for (size_t j = st.slot + 1; j < wf.slots.size(); ++j) rest += wf.slots[j].mean_duration;
    const double remaining = total > 0.0 ? rest / total : 0.0;
    return {std::clamp(remaining, 0.0, 1.0)};
}

/// Frame where the stream's open (incomplete) period begins, according to
/// a mined segmentation of that same stream. The final mined interval is
/// either the last complete period (the open period follows it) or the
/// open fragment itself when it was long enough to be retained.
inline int64_t open_period_anchor(const PeriodSegmentation& seg, int64_t t_len) {
    if (seg.boundaries.empty()) return 0;
    std::vector<double> lengths;
    for (const auto& b : seg.boundaries) lengths.push_back(b.length());
    std::nth_element(lengths.begin(), lengths.begin() + lengths.size() / 2, lengths.end());
    const double median = lengths[lengths.size() / 2];
    const Interval& last = seg.boundaries.back();
    const bool last_is_fragment = last.length() < 0.75 * median;
    const int64_t anchor =
        last_is_fragment ? static_cast<int64_t>(last.begin) : static_cast<int64_t>(last.end);
    return std::clamp<int64_t>(anchor, 0, t_len);
}

/// Completion tracking anchored on the task-1 segmentation: only the open
/// period's tokens feed the pointer, so earlier-period tracking drift
/// cannot contaminate the estimate.
inline CompletionEstimate track_completion(const HardTranscript& partial, const Workflow& wf,
                                           const PeriodSegmentation& seg) {
    const int64_t t_len = static_cast<int64_t>(partial.tokens.size());
    const int64_t anchor = open_period_anchor(seg, t_len);
    if (anchor >= t_len) return {0.0};
    HardTranscript slice;
    slice.tokens.assign(partial.tokens.begin() + anchor, partial.tokens.end());
    return track_completion(slice, wf);
}

struct AnomalyReport {
    std::optional<Interval> interval; // frame units, absolute
};

/// Localizes the single longest run of frames that match no reachable slot
/// within one period. Runs shorter than min_anomaly_frames are ignored;
/// runs separated by less than merge_gap merge. period_offset shifts the
/// reported interval into absolute stream frames.
inline AnomalyReport localize_anomaly(const HardTranscript& period_tokens, const Workflow& wf,
                                      const StreamConfig& cfg = {}, int64_t period_offset = 0) {
    StreamState st;
    std::vector<std::pair<int64_t, int64_t>> runs;
    int64_t run_begin = -1;
    for (int64_t f = 0; f < static_cast<int64_t>(period_tokens.tokens.size()); ++f) {
        st = step(st, period_tokens.tokens[static_cast<size_t>(f)], wf);
        if (!st.last_frame_matched) {
            if (run_begin < 0) run_begin = f;
        } else if (run_begin >= 0) {
            runs.emplace_back(run_begin, f);
            run_begin = -1;
        }
    }
    if (run_begin >= 0) runs.emplace_back(run_begin, static_cast<int64_t>(period_tokens.tokens.size()));

    std::erase_if(runs, [&](const auto& r) { return r.second - r.first < cfg.min_anomaly_frames; });
    if (runs.empty()) return {};

    std::vector<std::pair<int64_t, int64_t>> merged{runs.front()};
    for (size_t i = 1; i < runs.size(); ++i) {
        if (runs[i].first - merged.back().second < cfg.merge_gap)
            merged.back().second = runs[i].second;
        else
            merged.push_back(runs[i]);
    }
    auto longest = std::max_element(merged.begin(), merged.end(), [](const auto& a, const auto& b) {
        return a.second - a.first < b.second - b.first;
    });
    return {Interval(static_cast<double>(longest->first + period_offset),
                     static_cast<double>(longest->second + period_offset))};
}

} // namespace cyclemine
