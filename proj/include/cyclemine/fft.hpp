#pragma once

#include <complex>
#include <vector>

namespace cyclemine::detail {

using cplx = std::complex<double>;

inline bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// In-place iterative radix-2 Cooley-Tukey. n must be a power of two.
inline void fft_pow2(std::vector<cplx>& a, bool inverse) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * 3.141592653589793238462643383280 / static_cast<double>(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (size_t j = 0; j < len / 2; ++j) {
                const cplx u = a[i + j];
                const cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

/// DFT of arbitrary length via Bluestein's chirp-z transform (pow2 fast
/// path). Matches the direct sum X[v] = sum_t x[t] e^{-2*pi*i*v*t/n}.
inline std::vector<cplx> dft(const std::vector<cplx>& x) {
    const size_t n = x.size();
    if (n == 0) return {};
    if (n == 1) return x;
    if (is_pow2(n)) {
        std::vector<cplx> a = x;
        fft_pow2(a, false);
        return a;
    }
    size_t m = 1;
    while (m < 2 * n - 1) m <<= 1;
    // chirp table with arguments reduced mod 2n to keep the angle small
    std::vector<cplx> chirp(n);
    for (size_t t = 0; t < n; ++t) {
        const size_t tt = (t * t) % (2 * n);
        const double ang = -3.141592653589793238462643383280 * static_cast<double>(tt) / static_cast<double>(n);
        chirp[t] = cplx(std::cos(ang), std::sin(ang));
    }
    std::vector<cplx> a(m, cplx(0.0, 0.0)), b(m, cplx(0.0, 0.0));
    for (size_t t = 0; t < n; ++t) a[t] = x[t] * chirp[t];
    b[0] = std::conj(chirp[0]);
    for (size_t t = 1; t < n; ++t) b[t] = b[m - t] = std::conj(chirp[t]);
    fft_pow2(a, false);
    fft_pow2(b, false);
    for (size_t i = 0; i < m; ++i) a[i] *= b[i];
    fft_pow2(a, true);
    std::vector<cplx> out(n);
    for (size_t v = 0; v < n; ++v) out[v] = a[v] * chirp[v];
    return out;
}

} // namespace cyclemine::detail
