#pragma once

// Adaptive Gauss-Kronrod (G7,K15) on an interval, with optional split points
// for piecewise integrands. Used for coefficient tables of potentials without
// smooth closed-form transforms and as the cross-check oracle in tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace mckv {

namespace detail {

// K15 abscissae/weights on [-1,1]; G7 weights on the shared nodes.
inline constexpr double gk15_x[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898,  0.0,                0.207784955007898,
     0.405845151377397,  0.586087235467691,  0.741531185599394,
     0.864864423359769,  0.949107912342759,  0.991455371120813};
inline constexpr double gk15_wk[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
inline constexpr double gk15_wg[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

inline void gk15(const std::function<double(double)>& f, double a, double b,
                 double& value, double& error)
{
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    double k = 0.0, g = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double fx = f(c + h * gk15_x[i]);
        k += gk15_wk[i] * fx;
        if (i % 2 == 1) g += gk15_wg[i / 2] * fx;
    }
    value = k * h;
    error = std::abs((k - g) * h);
}

} // namespace detail

inline double integrate_adaptive(const std::function<double(double)>& f,
                                 double a, double b,
                                 double tol = 1e-10, int max_depth = 48)
{
    struct Seg { double a, b; int depth; };
    double v0, e0;
    detail::gk15(f, a, b, v0, e0);
    if (e0 <= tol) return v0;
    std::vector<Seg> stack{{a, b, 0}};
    double total = 0.0;
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        double v, e;
        detail::gk15(f, s.a, s.b, v, e);
        const double local_tol = tol * (s.b - s.a) / (b - a);
        if (e <= local_tol || s.depth >= max_depth) {
            total += v;
        } else {
            const double m = 0.5 * (s.a + s.b);
            stack.push_back({s.a, m, s.depth + 1});
            stack.push_back({m, s.b, s.depth + 1});
        }
    }
    return total;
}

// As above but the integrand is split at the given interior points first;
// kinks then sit on panel boundaries where GK converges fast.
inline double integrate_adaptive_split(const std::function<double(double)>& f,
                                       double a, double b,
                                       std::vector<double> splits,
                                       double tol = 1e-10)
{
    splits.erase(std::remove_if(splits.begin(), splits.end(),
                                [&](double s) { return !(s > a && s < b); }),
                 splits.end());
    std::sort(splits.begin(), splits.end());
    splits.insert(splits.begin(), a);
    splits.push_back(b);
    double total = 0.0;
    for (size_t i = 0; i + 1 < splits.size(); ++i)
        total += integrate_adaptive(f, splits[i], splits[i + 1],
                                    tol / static_cast<double>(splits.size()));
    return total;
}

} // namespace mckv
