#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"

namespace cyclemine {

/// Activity tokens are small nonnegative integers (cluster indices).
/// kGap marks an alignment gap and never appears in a transcript.
using Token = int;
constexpr Token kGap = -1;

/// Display alphabet: 0..25 -> 'A'..'Z', larger values -> "#<k>".
inline std::string token_display(Token t) {
    if (t == kGap) return "-";
    if (t >= 0 && t < 26) return std::string(1, static_cast<char>('A' + t));
    return "#" + std::to_string(t);
}

inline Token token_from_display(const std::string& s) {
    if (s == "-") return kGap;
    if (s.size() == 1 && s[0] >= 'A' && s[0] <= 'Z') return s[0] - 'A';
    if (s.size() >= 2 && s[0] == '#') {
        try {
            return std::stoi(s.substr(1));
        } catch (const std::exception&) {
            throw ParseError("bad token literal: " + s);
        }
    }
    throw ParseError("bad token literal: " + s);
}

inline std::string tokens_display(const std::vector<Token>& ts) {
    std::string out;
    for (Token t : ts) out += token_display(t);
    return out;
}

inline std::vector<Token> tokens_from_display(const std::string& s) {
    std::vector<Token> out;
    for (size_t i = 0; i < s.size();) {
        if (s[i] == '#') {
            size_t j = i + 1;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            out.push_back(token_from_display(s.substr(i, j - i)));
            i = j;
        } else {
            out.push_back(token_from_display(s.substr(i, 1)));
            ++i;
        }
    }
    return out;
}

/// A length-T series of n-dimensional feature vectors. Frame indices are
/// the time unit everywhere in the library; frame_rate is applied only
/// when reporting in seconds.
struct FeatureSequence {
    std::vector<std::vector<double>> frames;
    double frame_rate = 1.0;
    std::string id;

    size_t size() const { return frames.size(); }
    size_t dim() const { return frames.empty() ? 0 : frames.front().size(); }
};

/// Returns the input unchanged if all invariants hold; throws otherwise.
inline const FeatureSequence& validate_sequence(const FeatureSequence& seq) {
    if (seq.frames.empty()) throw EmptySequence("sequence has no frames");
    const size_t n = seq.frames.front().size();
    if (n < 1) throw DimensionMismatch("frame dimensionality must be >= 1");
    for (size_t t = 0; t < seq.frames.size(); ++t) {
        if (seq.frames[t].size() != n)
            throw DimensionMismatch("frame " + std::to_string(t) + " has dim " +
                                    std::to_string(seq.frames[t].size()) + ", expected " +
                                    std::to_string(n));
        for (double v : seq.frames[t])
            if (!std::isfinite(v)) throw NonFiniteValue("frame " + std::to_string(t));
    }
    if (!(seq.frame_rate > 0.0)) throw OutOfRange("frame_rate must be positive");
    return seq;
}

/// K cluster centroids over feature space; defines the token alphabet.
struct Codebook {
    std::vector<std::vector<double>> centroids;

    int k() const { return static_cast<int>(centroids.size()); }
    size_t dim() const { return centroids.empty() ? 0 : centroids.front().size(); }
};

struct HardTranscript {
    std::vector<Token> tokens;
    size_t size() const { return tokens.size(); }
};

/// Per-frame K-simplex rows (softmax of negated centroid distances).
struct SoftTranscript {
    std::vector<std::vector<double>> rows;

    size_t size() const { return rows.size(); }
    int k() const { return rows.empty() ? 0 : static_cast<int>(rows.front().size()); }

    /// Checks row normalization and positivity.
    void validate() const {
        for (const auto& row : rows) {
            double sum = 0.0;
            for (double v : row) {
                if (!(v > 0.0)) throw OutOfRange("soft row entry not strictly positive");
                sum += v;
            }
            if (std::abs(sum - 1.0) > 1e-9) throw OutOfRange("soft row does not sum to 1");
        }
    }
};

/// One maximal run of identical tokens, with its frame extent retained so
/// alignment results can be mapped back to frame-resolution boundaries.
struct TokenRun {
    Token token = 0;
    int64_t begin = 0; // inclusive frame
    int64_t end = 0;   // exclusive frame
    int64_t length() const { return end - begin; }
};

struct TokenRunSequence {
    std::vector<TokenRun> runs;
    int64_t total_frames() const { return runs.empty() ? 0 : runs.back().end; }
};

/// Half-open time interval [begin, end). begin < end is enforced at
/// construction and never silently repaired.
struct Interval {
    double begin;
    double end;

    Interval(double b, double e) : begin(b), end(e) {
        if (!(b < e)) throw InvalidInterval("interval requires begin < end");
    }
    double length() const { return end - begin; }
};

/// One column of a mined workflow.
struct Slot {
    std::set<Token> alternatives; // nonempty
    bool skippable = false;       // a gap appeared in this column
    Token primary = 0;            // majority token of the column
    double mean_duration = 1.0;   // frames, >= 1
    double duration_var = 0.0;
};

/// Ordered multi-branch slot sequence shared by all periods of a sequence.
struct Workflow {
    std::vector<Slot> slots;
    Token start_symbol = 0;

    size_t size() const { return slots.size(); }

    double total_mean_duration() const {
        double s = 0.0;
        for (const auto& slot : slots) s += slot.mean_duration;
        return s;
    }

    void validate() const {
        if (slots.empty()) throw DegenerateAlignment("workflow has no slots");
        for (const auto& slot : slots) {
            if (slot.alternatives.empty()) throw DegenerateAlignment("slot without alternatives");
            if (!(slot.mean_duration > 0.0)) throw OutOfRange("slot mean_duration must be positive");
        }
        for (const auto& slot : slots) {
            if (!slot.skippable) {
                if (slot.primary != start_symbol)
                    throw DegenerateAlignment("start_symbol does not match first non-skippable slot");
                break;
            }
        }
    }

    /// Fig.-6 style rendering: "A [B|D] _C" where '_' marks a skippable slot.
    std::string display() const {
        std::string out;
        for (size_t i = 0; i < slots.size(); ++i) {
            if (i) out += ' ';
            const Slot& s = slots[i];
            if (s.skippable) out += '_';
            if (s.alternatives.size() > 1) {
                out += '[';
                bool first = true;
                for (Token t : s.alternatives) {
                    if (!first) out += '|';
                    out += token_display(t);
                    first = false;
                }
                out += ']';
            } else {
                out += token_display(*s.alternatives.begin());
            }
        }
        return out;
    }
};

/// Detected period boundaries and count for one sequence.
struct PeriodSegmentation {
    std::vector<Interval> boundaries;
    int count = 0;

    void validate() const {
        if (count != static_cast<int>(boundaries.size()))
            throw OutOfRange("count must equal boundary list length");
        for (size_t i = 1; i < boundaries.size(); ++i)
            if (boundaries[i].begin < boundaries[i - 1].end)
                throw OutOfRange("boundaries must be sorted and non-overlapping");
    }
};

/// Annotation mirror of the detection outputs, used by metrics and datagen.
struct GroundTruth {
    std::vector<Interval> boundaries;
    std::vector<Token> workflow_tokens;
    std::optional<Interval> anomaly;
    std::optional<double> remaining;

    int count() const { return static_cast<int>(boundaries.size()); }
};

} // namespace cyclemine
