#pragma once

// Radix-2 complex FFT, power-of-two sizes only. Self-contained so the
// library has no external FFT dependency; sizes here are desk-scale
// (M <= 1024 per axis), so a plain iterative Cooley-Tukey is plenty.

#include <cassert>
#include <complex>
#include <vector>

namespace mckv::detail {

using cplx = std::complex<double>;

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place transform: sign = -1 forward (e^{-2pi i jk/n}), +1 inverse
// (unnormalised; caller divides by n).
inline void fft_pow2(std::vector<cplx>& a, int sign)
{
    const int n = static_cast<int>(a.size());
    assert(is_pow2(n));
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * 3.14159265358979323846 / len;
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (int i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (int j = 0; j < len / 2; ++j) {
                cplx u = a[i + j];
                cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// 2D row-column transform on an n x n array in row-major order.
inline void fft2_pow2(std::vector<cplx>& a, int n, int sign)
{
    assert(static_cast<int>(a.size()) == n * n);
    std::vector<cplx> buf(n);
    for (int r = 0; r < n; ++r) {
        std::copy(a.begin() + r * n, a.begin() + (r + 1) * n, buf.begin());
        fft_pow2(buf, sign);
        std::copy(buf.begin(), buf.end(), a.begin() + r * n);
    }
    for (int c = 0; c < n; ++c) {
        for (int r = 0; r < n; ++r) buf[r] = a[r * n + c];
        fft_pow2(buf, sign);
        for (int r = 0; r < n; ++r) a[r * n + c] = buf[r];
    }
}

} // namespace mckv::detail
