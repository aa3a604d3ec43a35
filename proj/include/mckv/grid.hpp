#pragma once

// Periodic grid descriptor and nodal fields on the torus
// U = [-L/2, L/2)^d with uniform nodes x_i = -L/2 + i L/M.

#include <cassert>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "mckv/fft.hpp"

namespace mckv {

struct TorusGrid {
    int d = 1;        // dimension, 1 or 2
    double L = 2.0 * std::numbers::pi;
    int M = 256;      // points per axis, power of two, >= 8

    TorusGrid() = default;
    TorusGrid(int d_, double L_, int M_) : d(d_), L(L_), M(M_)
    {
        if (d != 1 && d != 2) throw std::invalid_argument("TorusGrid: d must be 1 or 2");
        if (!(L > 0.0)) throw std::invalid_argument("TorusGrid: L must be positive");
        if (M < 8 || !detail::is_pow2(M)) throw std::invalid_argument("TorusGrid: M must be a power of two >= 8");
    }

    int    nodes() const { return d == 1 ? M : M * M; }
    double node(int i) const { return -0.5 * L + i * (L / M); }
    // uniform quadrature weight (L/M)^d, exact trapezoid on the periodic grid
    double weight() const { return d == 1 ? L / M : (L / M) * (L / M); }
    // largest resolved |k_i|; the Nyquist mode is excluded
    int band() const { return M / 2 - 1; }

    bool operator==(const TorusGrid& o) const { return d == o.d && L == o.L && M == o.M; }
};

// Real nodal field; row-major (x-index major) in d=2.
struct NodalField {
    TorusGrid grid;
    std::vector<double> values;

    NodalField() = default;
    explicit NodalField(const TorusGrid& g, double fill = 0.0)
        : grid(g), values(static_cast<size_t>(g.nodes()), fill) {}

    double& operator[](size_t i) { return values[i]; }
    double  operator[](size_t i) const { return values[i]; }
    size_t  size() const { return values.size(); }

    double integral() const
    {
        double s = 0.0;
        for (double v : values) s += v;
        return s * grid.weight();
    }
    double min_value() const
    {
        double m = values.empty() ? 0.0 : values[0];
        for (double v : values) m = std::min(m, v);
        return m;
    }
    double max_value() const
    {
        double m = values.empty() ? 0.0 : values[0];
        for (double v : values) m = std::max(m, v);
        return m;
    }
    double l1_norm() const
    {
        double s = 0.0;
        for (double v : values) s += std::abs(v);
        return s * grid.weight();
    }
    double l2_norm() const
    {
        double s = 0.0;
        for (double v : values) s += v * v;
        return std::sqrt(s * grid.weight());
    }
    double sup_norm() const
    {
        double s = 0.0;
        for (double v : values) s = std::max(s, std::abs(v));
        return s;
    }
};

inline NodalField operator+(NodalField a, const NodalField& b)
{
    assert(a.grid == b.grid);
    for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}
inline NodalField operator-(NodalField a, const NodalField& b)
{
    assert(a.grid == b.grid);
    for (size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}
inline NodalField operator*(double c, NodalField a)
{
    for (size_t i = 0; i < a.size(); ++i) a[i] *= c;
    return a;
}

// Nonnegative nodal field integrating to 1: the state rho.
struct DensityField : NodalField {
    DensityField() = default;
    explicit DensityField(const TorusGrid& g) : NodalField(g, 1.0 / std::pow(g.L, g.d)) {}
    DensityField(const TorusGrid& g, std::vector<double> v) : NodalField()
    {
        grid = g;
        values = std::move(v);
        if (values.size() != static_cast<size_t>(g.nodes()))
            throw std::invalid_argument("DensityField: size mismatch");
    }

    void normalise()
    {
        double m = integral();
        if (!(m > 0.0)) throw std::runtime_error("DensityField: nonpositive mass");
        for (double& v : values) v /= m;
    }
};

inline DensityField uniform_state(const TorusGrid& g) { return DensityField(g); }

inline double uniform_value(const TorusGrid& g) { return 1.0 / std::pow(g.L, g.d); }

// Even-part projection: average with the index-reversed field. Exact on the
// grid since -x_i coincides with node (M - i) mod M.
inline NodalField even_projection(const NodalField& f)
{
    const int M = f.grid.M;
    NodalField out(f.grid);
    if (f.grid.d == 1) {
        for (int i = 0; i < M; ++i)
            out[i] = 0.5 * (f[i] + f[(M - i) % M]);
    } else {
        auto id = [M](int i, int j) { return static_cast<size_t>(i) * M + j; };
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j) {
                double s = f[id(i, j)] + f[id((M - i) % M, j)]
                         + f[id(i, (M - j) % M)] + f[id((M - i) % M, (M - j) % M)];
                out[id(i, j)] = 0.25 * s;
            }
    }
    return out;
}

// Cyclic shift by whole grid cells (translation by shift * L/M per axis).
inline NodalField translate_cells(const NodalField& f, int sx, int sy = 0)
{
    const int M = f.grid.M;
    NodalField out(f.grid);
    auto wrap = [M](int i) { return ((i % M) + M) % M; };
    if (f.grid.d == 1) {
        for (int i = 0; i < M; ++i) out[i] = f[wrap(i - sx)];
    } else {
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j)
                out[static_cast<size_t>(i) * M + j] = f[static_cast<size_t>(wrap(i - sx)) * M + wrap(j - sy)];
    }
    return out;
}

} // namespace mckv
