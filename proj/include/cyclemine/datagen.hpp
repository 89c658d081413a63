#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "core.hpp"
#include "rng.hpp"

namespace cyclemine {

enum class Task { period, completion, anomaly };
enum class Tier { clean, jittered, noisy };

inline const char* task_name(Task t) {
    switch (t) {
        case Task::period: return "period";
        case Task::completion: return "completion";
        default: return "anomaly";
    }
}

inline const char* tier_name(Tier t) {
    switch (t) {
        case Tier::clean: return "clean";
        case Tier::jittered: return "jittered";
        default: return "noisy";
    }
}

/// Parameters of one synthetic benchmark sequence. Sequences carry 5..8
/// periods of a fixed multi-branch workflow; completion instances truncate
/// the second-last period, anomaly instances splice a foreign-token segment
/// into the final period.
struct GenSpec {
    int k = 8;                      // alphabet size (cluster count)
    int dim = 2;                    // feature dimension
    int workflow_len = 4;           // slots in the workflow
    int periods = 6;                // in [5, 8]
    double mean_token_frames = 10.0;
    double jitter = 0.0;            // lognormal sigma of per-token durations
    double noise = 0.0;             // feature noise std, fraction of min centroid gap
    std::vector<int> branch_slots;  // slots given a second alternative token
    double skip_prob = 0.0;         // skip probability for interior slots
    int repeat_start_slot = 0;      // if > 0, this slot reuses the start token
                                    // (recurring motions inside a period make
                                    // the raw spectrum ambiguous)
    Task task = Task::period;
    uint64_t seed = 0;
    double min_gap = 0.22;          // centroid rejection-sampling gap
    std::string id;
    double frame_rate = 30.0;

    void validate() const {
        if (periods < 5 || periods > 8) throw OutOfRange("periods must be in [5, 8]");
        if (workflow_len < 3) throw OutOfRange("workflow_len must be >= 3");
        const int used = workflow_len + static_cast<int>(branch_slots.size()) +
                         (task == Task::anomaly ? 1 : 0);
        if (k < used) throw OutOfRange("K too small for the requested workflow");
        if (dim < 1) throw OutOfRange("dim must be >= 1");
        if (repeat_start_slot != 0 &&
            (repeat_start_slot < 2 || repeat_start_slot > workflow_len - 2))
            throw OutOfRange("repeat_start_slot must be interior and non-adjacent to slot 0");
    }
};

namespace detail {

inline std::vector<std::vector<double>> place_centroids(Rng& rng, int k, int dim, double gap) {
    const int restarts = 60;
    const int tries_per_point = 600;
    for (int attempt = 0; attempt < restarts; ++attempt) {
        std::vector<std::vector<double>> pts;
        pts.reserve(k);
        while (static_cast<int>(pts.size()) < k) {
            bool placed = false;
            for (int t = 0; t < tries_per_point && !placed; ++t) {
                std::vector<double> cand(dim);
                for (double& v : cand) v = rng.next_double();
                bool ok = true;
                for (const auto& p : pts) {
                    double d2 = 0.0;
                    for (int i = 0; i < dim; ++i) d2 += (cand[i] - p[i]) * (cand[i] - p[i]);
                    if (d2 < gap * gap) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    pts.push_back(std::move(cand));
                    placed = true;
                }
            }
            if (!placed) break;
        }
        if (static_cast<int>(pts.size()) == k) return pts;
    }
    throw CentroidRejectionExhausted("cannot place " + std::to_string(k) +
                                     " centroids at gap " + std::to_string(gap));
}

inline double min_pairwise_gap(const std::vector<std::vector<double>>& pts) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t a = 0; a < pts.size(); ++a)
        for (size_t b = a + 1; b < pts.size(); ++b) {
            double d2 = 0.0;
            for (size_t i = 0; i < pts[a].size(); ++i)
                d2 += (pts[a][i] - pts[b][i]) * (pts[a][i] - pts[b][i]);
            best = std::min(best, std::sqrt(d2));
        }
    return best;
}

} // namespace detail

/// Everything one synthetic instance is made of; the codebook and realized
/// per-frame tokens let tests verify tokenization consistency directly.
struct GenResult {
    FeatureSequence sequence;
    GroundTruth truth;
    Codebook codebook;
    HardTranscript tokens;
};

/// Generates one sequence with exact ground truth. Fully deterministic per
/// (spec, seed). With jitter = 0 and noise = 0 every frame sits exactly on
/// its token's centroid and hard tokenization with the true codebook
/// reproduces the token string.
inline GenResult generate_full(const GenSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);

    const auto centroids = detail::place_centroids(rng, spec.k, spec.dim, spec.min_gap);
    const double gap = detail::min_pairwise_gap(centroids);
    const double noise_std = spec.noise * gap;

    // workflow over distinct tokens; branch alternatives and the anomaly
    // token come from the unused remainder of the alphabet
    std::vector<Token> perm(spec.k);
    for (int i = 0; i < spec.k; ++i) perm[i] = i;
    for (int i = spec.k - 1; i > 0; --i)
        std::swap(perm[i], perm[rng.next_index(static_cast<uint64_t>(i) + 1)]);
    std::vector<Token> slot_tokens(perm.begin(), perm.begin() + spec.workflow_len);
    if (spec.repeat_start_slot != 0) slot_tokens[spec.repeat_start_slot] = slot_tokens[0];
    size_t next_free = static_cast<size_t>(spec.workflow_len);
    std::vector<Token> branch_alt(spec.workflow_len, kGap);
    for (int s : spec.branch_slots) {
        if (s <= 0 || s >= spec.workflow_len - 1) throw OutOfRange("branch slot must be interior");
        branch_alt[s] = perm[next_free++];
    }
    const Token anomaly_token = spec.task == Task::anomaly ? perm[next_free++] : kGap;

    GenResult out;
    FeatureSequence& seq = out.sequence;
    GroundTruth& gt = out.truth;
    out.codebook.centroids = centroids;
    seq.frame_rate = spec.frame_rate;
    seq.id = spec.id.empty() ? "gen_" + std::to_string(spec.seed) : spec.id;
    gt.workflow_tokens = slot_tokens;

    // Motion features drift smoothly rather than flickering frame to frame,
    // so the noise is an AR(1) wander with the requested stationary std.
    constexpr double kNoiseRho = 0.9;
    std::vector<double> drift(spec.dim, 0.0);
    auto emit = [&](Token tok, int64_t frames) {
        for (int64_t f = 0; f < frames; ++f) {
            std::vector<double> x = centroids[static_cast<size_t>(tok)];
            if (noise_std > 0.0) {
                for (int d = 0; d < spec.dim; ++d) {
                    drift[d] = kNoiseRho * drift[d] +
                               std::sqrt(1.0 - kNoiseRho * kNoiseRho) * noise_std * rng.next_normal();
                    x[d] += drift[d];
                }
            }
            seq.frames.push_back(std::move(x));
            out.tokens.tokens.push_back(tok);
        }
    };

    std::vector<int64_t> period_begin(spec.periods), period_end(spec.periods);
    for (int p = 0; p < spec.periods; ++p) {
        period_begin[p] = static_cast<int64_t>(seq.frames.size());
        for (int s = 0; s < spec.workflow_len; ++s) {
            const bool interior = s > 0 && s < spec.workflow_len - 1;
            if (interior && spec.skip_prob > 0.0 && rng.next_double() < spec.skip_prob) continue;
            Token tok = slot_tokens[static_cast<size_t>(s)];
            if (branch_alt[s] != kGap && rng.next_double() < 0.5) tok = branch_alt[s];
            const int64_t frames = std::max<int64_t>(
                1, std::llround(rng.next_lognormal_mean(spec.mean_token_frames, spec.jitter)));
            emit(tok, frames);
        }
        period_end[p] = static_cast<int64_t>(seq.frames.size());
    }

    if (spec.task == Task::period) {
        for (int p = 0; p < spec.periods; ++p)
            gt.boundaries.emplace_back(static_cast<double>(period_begin[p]),
                                       static_cast<double>(period_end[p]));
    } else if (spec.task == Task::completion) {
        const int cut_p = spec.periods - 2;
        const int64_t full = period_end[cut_p] - period_begin[cut_p];
        const int64_t emitted = 1 + static_cast<int64_t>(rng.next_index(static_cast<uint64_t>(full - 1)));
        seq.frames.resize(static_cast<size_t>(period_begin[cut_p] + emitted));
        out.tokens.tokens.resize(seq.frames.size());
        for (int p = 0; p < cut_p; ++p)
            gt.boundaries.emplace_back(static_cast<double>(period_begin[p]),
                                       static_cast<double>(period_end[p]));
        gt.boundaries.emplace_back(static_cast<double>(period_begin[cut_p]),
                                   static_cast<double>(period_begin[cut_p] + emitted));
        gt.remaining = 1.0 - static_cast<double>(emitted) / static_cast<double>(full);
    } else {
        const int last = spec.periods - 1;
        const int64_t plen = period_end[last] - period_begin[last];
        const int64_t alen =
            std::max<int64_t>(1, std::llround((0.10 + 0.10 * rng.next_double()) *
                                              static_cast<double>(plen)));
        const int64_t at = period_begin[last] + static_cast<int64_t>(rng.next_index(static_cast<uint64_t>(plen)));
        std::vector<std::vector<double>> insert;
        insert.reserve(static_cast<size_t>(alen));
        std::vector<double> adrift(spec.dim, 0.0);
        for (int64_t f = 0; f < alen; ++f) {
            std::vector<double> x = centroids[static_cast<size_t>(anomaly_token)];
            if (noise_std > 0.0) {
                for (int d = 0; d < spec.dim; ++d) {
                    adrift[d] = kNoiseRho * adrift[d] +
                                std::sqrt(1.0 - kNoiseRho * kNoiseRho) * noise_std * rng.next_normal();
                    x[d] += adrift[d];
                }
            }
            insert.push_back(std::move(x));
        }
        seq.frames.insert(seq.frames.begin() + static_cast<long>(at), insert.begin(), insert.end());
        out.tokens.tokens.insert(out.tokens.tokens.begin() + static_cast<long>(at),
                                 static_cast<size_t>(alen), anomaly_token);
        for (int p = 0; p < spec.periods; ++p) {
            const double b = static_cast<double>(period_begin[p]);
            const double e = static_cast<double>(p == last ? period_end[p] + alen : period_end[p]);
            gt.boundaries.emplace_back(b, e);
        }
        gt.anomaly = Interval(static_cast<double>(at), static_cast<double>(at + alen));
    }
    return out;
}

inline std::pair<FeatureSequence, GroundTruth> generate(const GenSpec& spec) {
    GenResult res = generate_full(spec);
    return {std::move(res.sequence), std::move(res.truth)};
}

struct TierParams {
    double jitter;
    double noise;
};

inline TierParams tier_params(Tier tier) {
    switch (tier) {
        case Tier::clean: return {0.05, 0.05};
        case Tier::jittered: return {0.2, 0.1};
        default: return {0.3, 0.25};
    }
}

/// Samples `count` specs from the tier's parameter ranges (periods uniform
/// in [5, 8], K uniform in [6, 14]) and generates them with per-item
/// derived seeds. gap_scale < 1 tightens centroid separation to make the
/// clusters overlap (ablation suites).
inline std::vector<GenSpec> suite_specs(Tier tier, int count, uint64_t seed, Task task,
                                        double gap_scale = 1.0) {
    if (count < 1) throw OutOfRange("count must be >= 1");
    const TierParams tp = tier_params(tier);
    std::vector<GenSpec> specs;
    specs.reserve(count);
    for (int i = 0; i < count; ++i) {
        Rng rng(mix_seed(seed, static_cast<uint64_t>(i)));
        GenSpec g;
        g.task = task;
        g.jitter = tp.jitter;
        g.noise = tp.noise;
        g.periods = 5 + static_cast<int>(rng.next_index(4));
        g.k = 6 + static_cast<int>(rng.next_index(9));
        g.dim = 2 + static_cast<int>(rng.next_index(2));
        const int max_len = std::min(7, g.k - 2);
        g.workflow_len = 3 + static_cast<int>(rng.next_index(static_cast<uint64_t>(max_len - 2)));
        g.mean_token_frames = 8.0 + static_cast<double>(rng.next_index(7));
        if (g.workflow_len >= 4 && rng.next_double() < 0.5)
            g.repeat_start_slot =
                2 + static_cast<int>(rng.next_index(static_cast<uint64_t>(g.workflow_len - 3)));
        if (g.workflow_len >= 4 && rng.next_double() < 0.5) {
            int slot = 1 + static_cast<int>(rng.next_index(static_cast<uint64_t>(g.workflow_len - 2)));
            if (slot == g.repeat_start_slot) slot = slot > 1 ? slot - 1 : slot + 1;
            if (slot != g.repeat_start_slot) g.branch_slots = {slot};
        }
        g.skip_prob = g.workflow_len >= 5 ? 0.1 : 0.0;
        g.min_gap = 0.22 * gap_scale;
        g.seed = mix_seed(seed, 0x9000 + static_cast<uint64_t>(i));
        g.id = std::string(tier_name(tier)) + "_" + task_name(task) + "_" + std::to_string(i);
        specs.push_back(std::move(g));
    }
    return specs;
}

inline std::vector<std::pair<FeatureSequence, GroundTruth>> generate_suite(
    Tier tier, int count, uint64_t seed, Task task = Task::period, double gap_scale = 1.0) {
    std::vector<std::pair<FeatureSequence, GroundTruth>> out;
    out.reserve(count);
    for (const auto& spec : suite_specs(tier, count, seed, task, gap_scale))
        out.push_back(generate(spec));
    return out;
}

} // namespace cyclemine
