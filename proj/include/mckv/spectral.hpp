#pragma once

// The coordinate-wise even/odd real basis on the torus,
//
//   w_k(x) = N_k prod_i w_{k_i}(x_i),   w_{k_i} = cos (k_i > 0), 1 (k_i = 0), sin (k_i < 0),
//   N_k = Theta(k) / L^{d/2},           Theta(k) = prod_i sqrt(2 - delta_{k_i,0}),
//
// forward/inverse transforms (FFT-backed), spectral convolution and the
// interaction bilinear form. Coefficients are stored over signed indices
// |k_i| <= M/2 - 1; the Nyquist mode is zeroed.

#include <array>
#include <cmath>
#include <stdexcept>

#include "mckv/grid.hpp"

namespace mckv {

struct FourierIndex {
    int k1 = 0;
    int k2 = 0; // unused for d=1

    static FourierIndex one_d(int k) { return {k, 0}; }
    int nonzero_count(int d) const { return (k1 != 0) + (d == 2 ? (k2 != 0) : 0); }
    bool is_zero(int d) const { return k1 == 0 && (d == 1 || k2 == 0); }
    FourierIndex abs() const { return {std::abs(k1), std::abs(k2)}; }
    bool operator==(const FourierIndex& o) const { return k1 == o.k1 && k2 == o.k2; }
};

inline double theta_factor(const FourierIndex& k, int d)
{
    double t = (k.k1 != 0) ? std::numbers::sqrt2 : 1.0;
    if (d == 2) t *= (k.k2 != 0) ? std::numbers::sqrt2 : 1.0;
    return t;
}

inline double basis_normalisation(const FourierIndex& k, const TorusGrid& g)
{
    return theta_factor(k, g.d) / std::pow(g.L, 0.5 * g.d);
}

inline double basis_factor_1d(int ki, double x, double L)
{
    const double arg = 2.0 * std::numbers::pi * std::abs(ki) * x / L;
    if (ki > 0) return std::cos(arg);
    if (ki < 0) return std::sin(arg);
    return 1.0;
}

// w_k evaluated on the grid nodes. Rejects indices outside the resolved band.
inline NodalField basis_eval(const FourierIndex& k, const TorusGrid& g)
{
    if (std::abs(k.k1) > g.band() || (g.d == 2 && std::abs(k.k2) > g.band()))
        throw std::out_of_range("basis_eval: index outside resolved band |k_i| < M/2");
    NodalField f(g);
    const double nk = basis_normalisation(k, g);
    if (g.d == 1) {
        for (int i = 0; i < g.M; ++i)
            f[i] = nk * basis_factor_1d(k.k1, g.node(i), g.L);
    } else {
        for (int i = 0; i < g.M; ++i) {
            const double fx = basis_factor_1d(k.k1, g.node(i), g.L);
            for (int j = 0; j < g.M; ++j)
                f[static_cast<size_t>(i) * g.M + j] = nk * fx * basis_factor_1d(k.k2, g.node(j), g.L);
        }
    }
    return f;
}

// Coefficients over the truncated signed index set |k_i| <= M/2 - 1.
struct SpectralField {
    TorusGrid grid;
    std::vector<double> coef; // size (M-1)^d, index offset band()

    SpectralField() = default;
    explicit SpectralField(const TorusGrid& g)
        : grid(g), coef(static_cast<size_t>(g.d == 1 ? g.M - 1 : (g.M - 1) * (g.M - 1)), 0.0) {}

    int band() const { return grid.band(); }

    size_t idx(const FourierIndex& k) const
    {
        const int o = band();
        return grid.d == 1 ? static_cast<size_t>(k.k1 + o)
                           : static_cast<size_t>(k.k1 + o) * (grid.M - 1) + (k.k2 + o);
    }
    double  at(const FourierIndex& k) const { return coef[idx(k)]; }
    double& at(const FourierIndex& k) { return coef[idx(k)]; }

    double sum_of_squares() const
    {
        double s = 0.0;
        for (double c : coef) s += c * c;
        return s;
    }

    // visit every signed index in the band
    template <class F>
    void for_each(F&& fn) const
    {
        const int b = band();
        if (grid.d == 1) {
            for (int k = -b; k <= b; ++k) fn(FourierIndex{k, 0});
        } else {
            for (int k1 = -b; k1 <= b; ++k1)
                for (int k2 = -b; k2 <= b; ++k2) fn(FourierIndex{k1, k2});
        }
    }
};

namespace detail {

// Quadrature of f against e^{-i 2pi k x/L} per axis, as a complex array with
// the phase for x_0 = -L/2 folded in: q_k = (L/M)^d * (-1)^{sum k_i} * DFT(f)_k.
inline std::vector<cplx> forward_complex(const NodalField& f)
{
    const int M = f.grid.M;
    std::vector<cplx> a(f.values.begin(), f.values.end());
    if (f.grid.d == 1)
        fft_pow2(a, -1);
    else
        fft2_pow2(a, M, -1);
    return a;
}

inline double neg1pow(int k) { return (k & 1) ? -1.0 : 1.0; }

} // namespace detail

// Forward transform: f~(k) = <f, w_k> for all resolved signed indices.
inline SpectralField cosine_transform(const NodalField& f)
{
    const TorusGrid& g = f.grid;
    const int M = g.M, b = g.band();
    SpectralField out(g);
    auto q = detail::forward_complex(f);
    const double w = g.weight();

    if (g.d == 1) {
        for (int k = 0; k <= b; ++k) {
            const detail::cplx qi = w * detail::neg1pow(k) * q[k];
            const double nk_c = basis_normalisation({k, 0}, g);
            out.at({k, 0}) = nk_c * qi.real();
            if (k > 0) out.at({-k, 0}) = nk_c * (-qi.imag());
        }
    } else {
        // q(k1,k2) = Iint f e^{-i(k1 x + k2 y) 2pi/L}; combine +-k2 to split the
        // second axis into cos/sin, the real/imag parts split the first.
        auto qat = [&](int k1, int k2) {
            const int i = (k1 % M + M) % M, j = (k2 % M + M) % M;
            return w * detail::neg1pow(k1 + k2) * q[static_cast<size_t>(i) * M + j];
        };
        for (int k1 = 0; k1 <= b; ++k1)
            for (int k2 = 0; k2 <= b; ++k2) {
                const detail::cplx qp = qat(k1, k2);  // e^{-i(k1 x + k2 y)}
                const detail::cplx qm = qat(k1, -k2); // e^{-i(k1 x - k2 y)}
                double cc, cs, sc, ss;
                if (k2 == 0) {
                    cc = qp.real();
                    sc = -qp.imag();
                    cs = ss = 0.0;
                } else {
                    cc = 0.5 * (qp + qm).real();
                    cs = -0.5 * (qp - qm).imag();
                    sc = -0.5 * (qp + qm).imag();
                    ss = -0.5 * (qp - qm).real();
                }
                const double nk = basis_normalisation({k1, k2}, g);
                out.at({k1, k2}) = nk * cc;
                if (k2 > 0) out.at({k1, -k2}) = nk * cs;
                if (k1 > 0) out.at({-k1, k2}) = nk * sc;
                if (k1 > 0 && k2 > 0) out.at({-k1, -k2}) = nk * ss;
            }
    }
    return out;
}

// Inverse transform: f(x) = sum_k f~(k) w_k(x) over the resolved band.
inline NodalField inverse_transform(const SpectralField& s)
{
    const TorusGrid& g = s.grid;
    const int M = g.M, b = g.band();
    std::vector<detail::cplx> X(static_cast<size_t>(g.nodes()), detail::cplx(0.0, 0.0));

    if (g.d == 1) {
        // amplitude a_k cos + b_k sin -> X_k = (M/2)(-1)^k (a_k - i b_k), X_{M-k} = conj
        for (int k = 0; k <= b; ++k) {
            const double nk = basis_normalisation({k, 0}, g);
            const double a = nk * s.at({k, 0});
            const double bb = k > 0 ? nk * s.at({-k, 0}) : 0.0;
            if (k == 0) {
                X[0] += detail::cplx(M * a, 0.0);
            } else {
                const detail::cplx v = 0.5 * M * detail::neg1pow(k) * detail::cplx(a, -bb);
                X[k] += v;
                X[M - k] += std::conj(v);
            }
        }
        detail::fft_pow2(X, +1);
    } else {
        // Build the complex spectrum C(m1,m2) of f = sum A_m e^{i 2pi m.j/M}:
        // each real mode contributes to the four sign combinations.
        auto add = [&](int m1, int m2, detail::cplx v) {
            const int i = (m1 % M + M) % M, j = (m2 % M + M) % M;
            X[static_cast<size_t>(i) * M + j] += v;
        };
        const detail::cplx I(0.0, 1.0);
        for (int k1 = 0; k1 <= b; ++k1)
            for (int k2 = 0; k2 <= b; ++k2) {
                const double nk = basis_normalisation({k1, k2}, g);
                const double cc = nk * s.at({k1, k2});
                const double cs = k2 > 0 ? nk * s.at({k1, -k2}) : 0.0;
                const double sc = k1 > 0 ? nk * s.at({-k1, k2}) : 0.0;
                const double ss = (k1 > 0 && k2 > 0) ? nk * s.at({-k1, -k2}) : 0.0;
                const double ph = detail::neg1pow(k1 + k2);
                // f_x factor: cos -> (e+ + e-)/2, sin -> (e+ - e-)/(2i)
                // accumulate coefficient of e^{i(s1 k1 x + s2 k2 y)}
                for (int s1 = -1; s1 <= 1; s1 += 2)
                    for (int s2 = -1; s2 <= 1; s2 += 2) {
                        if (k1 == 0 && s1 < 0) continue;
                        if (k2 == 0 && s2 < 0) continue;
                        const double hx = (k1 == 0) ? 1.0 : 0.5;
                        const double hy = (k2 == 0) ? 1.0 : 0.5;
                        detail::cplx amp = hx * hy * detail::cplx(cc, 0.0);
                        if (k2 > 0) amp += hx * hy * (-I) * static_cast<double>(s2) * cs;
                        if (k1 > 0) amp += hx * hy * (-I) * static_cast<double>(s1) * sc;
                        if (k1 > 0 && k2 > 0) amp += hx * hy * (-1.0) * static_cast<double>(s1 * s2) * ss;
                        add(s1 * k1, s2 * k2, static_cast<double>(M) * static_cast<double>(M) * ph * amp);
                    }
            }
        detail::fft2_pow2(X, M, +1);
    }

    NodalField f(g);
    const double inv = 1.0 / g.nodes();
    for (size_t i = 0; i < f.size(); ++i) f[i] = X[i].real() * inv;
    return f;
}

// Dealiased nodal product: both factors are transformed to a 2M grid,
// multiplied there and truncated back. Quadratic nonlinearities are then
// alias-free on the retained band.
inline NodalField dealiased_product(const NodalField& a, const NodalField& b)
{
    assert(a.grid == b.grid);
    const TorusGrid& g = a.grid;
    const TorusGrid gp(g.d, g.L, 2 * g.M);
    auto pad = [&](const NodalField& f) {
        SpectralField s = cosine_transform(f);
        SpectralField sp(gp);
        s.for_each([&](FourierIndex k) { sp.at(k) = s.at(k); });
        return inverse_transform(sp);
    };
    NodalField ap = pad(a), bp = pad(b);
    for (size_t i = 0; i < ap.size(); ++i) ap[i] *= bp[i];
    SpectralField prod = cosine_transform(ap);
    SpectralField out(g);
    out.for_each([&](FourierIndex k) { out.at(k) = prod.at(k); });
    return inverse_transform(out);
}

} // namespace mckv
