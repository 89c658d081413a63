#pragma once

// End-to-end task helpers shared by the CLI and the acceptance harness.

#include "metrics.hpp"
#include "miner.hpp"
#include "stream.hpp"
#include "tokenizer.hpp"

namespace cyclemine {

/// Frame span holding the last mined period, extended to the stream end so
/// trailing content (e.g. a spliced anomaly) stays inside the analyzed span.
inline std::pair<int64_t, int64_t> final_period_span(const PeriodSegmentation& seg, int64_t t_len) {
    if (seg.boundaries.empty()) return {0, t_len};
    return {static_cast<int64_t>(seg.boundaries.back().begin), t_len};
}

/// Task-3 inference: localize the anomaly within the final mined period.
inline AnomalyReport detect_stream_anomaly(const HardTranscript& tokens,
                                           const PeriodSegmentation& seg, const Workflow& wf,
                                           const StreamConfig& cfg = {}) {
    const auto [begin, end] = final_period_span(seg, static_cast<int64_t>(tokens.size()));
    HardTranscript slice;
    slice.tokens.assign(tokens.tokens.begin() + begin, tokens.tokens.begin() + end);
    if (slice.tokens.empty()) return {};
    return localize_anomaly(slice, wf, cfg, begin);
}

} // namespace cyclemine
