#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "core.hpp"
#include "fft.hpp"

namespace cyclemine {

/// Temporal-frequency magnitude marginal: mags[v] = sum_u |F(u,v)| where
/// F is the 2D DFT of the (K x T) soft-token matrix.
struct MagnitudeSpectrum {
    std::vector<double> mags;
    size_t source_length = 0;
};

/// 2D DFT with context marginalization over the token axis. Equals the
/// direct double sum to within floating-point accuracy; the fast transform
/// is an implementation detail, not part of the contract.
inline MagnitudeSpectrum marginal_spectrum(const SoftTranscript& st) {
    const size_t t_len = st.size();
    if (t_len < 2) throw SequenceTooShort("need T >= 2 for a spectrum");
    const int k = st.k();

    // token-axis DFT first: G(u, t) = sum_k Y[k][t] e^{-2 pi i u k / K}
    std::vector<std::vector<detail::cplx>> g(k, std::vector<detail::cplx>(t_len));
    for (size_t t = 0; t < t_len; ++t) {
        for (int u = 0; u < k; ++u) {
            detail::cplx acc(0.0, 0.0);
            for (int c = 0; c < k; ++c) {
                const double ang = -2.0 * 3.141592653589793238462643383280 *
                                   static_cast<double>(u) * static_cast<double>(c) / static_cast<double>(k);
                acc += st.rows[t][c] * detail::cplx(std::cos(ang), std::sin(ang));
            }
            g[u][t] = acc;
        }
    }

    MagnitudeSpectrum ms;
    ms.source_length = t_len;
    ms.mags.assign(t_len, 0.0);
    for (int u = 0; u < k; ++u) {
        const auto f_row = detail::dft(g[u]);
        for (size_t v = 0; v < t_len; ++v) ms.mags[v] += std::abs(f_row[v]);
    }
    return ms;
}

/// 1D magnitude spectrum of the hard-token signal (token indices as reals).
/// This is the ablation arm for window initialization; the primary path
/// uses marginal_spectrum on soft tokens.
inline MagnitudeSpectrum hard_token_spectrum(const HardTranscript& ht) {
    const size_t t_len = ht.size();
    if (t_len < 2) throw SequenceTooShort("need T >= 2 for a spectrum");
    std::vector<detail::cplx> x(t_len);
    for (size_t t = 0; t < t_len; ++t) x[t] = detail::cplx(static_cast<double>(ht.tokens[t]), 0.0);
    const auto f = detail::dft(x);
    MagnitudeSpectrum ms;
    ms.source_length = t_len;
    ms.mags.resize(t_len);
    for (size_t v = 0; v < t_len; ++v) ms.mags[v] = std::abs(f[v]);
    return ms;
}

/// Up to top_f candidate period window sizes, ranked.
struct WindowCandidates {
    std::vector<int64_t> windows;
};

/// Picks the dominant nonzero frequencies whose implied window
/// w = round(T / v) lies in [min_window, max_window]. Candidates are
/// ordered by descending magnitude (ties toward smaller v) and
/// deduplicated after rounding. Frequencies whose magnitude is
/// negligible next to the DC term (< 1e-9 relative) do not count as
/// periodicity.
inline WindowCandidates top_windows(const MagnitudeSpectrum& ms, int64_t min_window,
                                    int64_t max_window, int top_f = 3) {
    const int64_t t_len = static_cast<int64_t>(ms.source_length);
    if (min_window < 1 || min_window >= max_window || max_window > t_len)
        throw OutOfRange("window bounds must satisfy 1 <= min < max <= T");

    const double floor_mag = 1e-9 * std::max(ms.mags.empty() ? 0.0 : ms.mags[0], 1.0);
    struct Peak {
        int64_t v;
        double mag;
        int64_t window;
    };
    std::vector<Peak> peaks;
    for (int64_t v = 1; v < t_len; ++v) {
        const double mag = ms.mags[static_cast<size_t>(v)];
        if (!(mag > floor_mag)) continue;
        const int64_t w = std::llround(static_cast<double>(t_len) / static_cast<double>(v));
        if (w < min_window || w > max_window) continue;
        peaks.push_back({v, mag, w});
    }
    if (peaks.empty()) throw NoPeriodicity("no admissible nonzero frequency");

    std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
        if (a.mag != b.mag) return a.mag > b.mag;
        return a.v < b.v;
    });
    // magnitudes equal in exact arithmetic (conjugate-symmetric bins) come
    // out of the transform with ~1e-13 relative noise; group them so the
    // smaller-v tie-break applies to real ties, not bit patterns
    for (size_t g = 0; g < peaks.size();) {
        size_t end = g + 1;
        while (end < peaks.size() && peaks[end].mag >= peaks[g].mag * (1.0 - 1e-9)) ++end;
        std::sort(peaks.begin() + static_cast<long>(g), peaks.begin() + static_cast<long>(end),
                  [](const Peak& a, const Peak& b) { return a.v < b.v; });
        g = end;
    }

    WindowCandidates wc;
    for (const Peak& p : peaks) {
        if (std::find(wc.windows.begin(), wc.windows.end(), p.window) != wc.windows.end()) continue;
        wc.windows.push_back(p.window);
        if (static_cast<int>(wc.windows.size()) == top_f) break;
    }
    return wc;
}

} // namespace cyclemine
