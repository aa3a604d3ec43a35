#pragma once

// Scalar self-consistency analysis for the generalised Kuramoto model:
// modified Bessel ratios r_n = I_{n+1}/I_n by backward continued fraction
// (upward recurrence on I_n is unstable), the fixed point
// sqrt(2/L) beta kappa r_0(a) = a, and the concentration diagnostic for the
// closed-form states rho(x, a) = e^{a cos(2 pi k x/L)} / (L I_0(a)).

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "mckv/quadrature.hpp"

namespace mckv {

// r_n(a) = I_{n+1}(a)/I_n(a) via the continued fraction
// r_n = 1 / (2(n+1)/a + r_{n+1}), seeded deep and recursed down.
inline double bessel_ratio(int n, double a)
{
    if (n < 0 || a < 0.0) throw std::domain_error("bessel_ratio: need n >= 0, a >= 0");
    if (a == 0.0) return 0.0;
    int top = n + 40 + static_cast<int>(2.0 * a);
    double r = 0.0;
    for (int m = top; m >= n; --m)
        r = 1.0 / (2.0 * (m + 1) / a + r);
    return r;
}

// I_0 by its power series; fine for the desk-scale arguments used here.
inline double bessel_I0(double a)
{
    const double x = 0.25 * a * a;
    double term = 1.0, sum = 1.0;
    for (int m = 1; m < 1000; ++m) {
        term *= x / (static_cast<double>(m) * m);
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

inline double bessel_In(int n, double a)
{
    double v = bessel_I0(a);
    for (int m = 0; m < n; ++m) v *= bessel_ratio(m, a);
    return v;
}

struct BesselState {
    double a = 0.0;       // order parameter beta kappa rho~(k#)
    double kappa = 0.0;
    double ratio = 0.0;   // r_0(a)
    bool trivial_only = false;
};

// Unique positive root of M(a, kappa) = sqrt(2/L) beta kappa r_0(a) = a for
// kappa above kappa# = sqrt(2L)/beta; below there are no nonzero solutions.
inline BesselState solve_order_parameter(double kappa, double beta, double L,
                                         double tol = 1e-12)
{
    if (!(kappa > 0.0)) throw std::invalid_argument("solve_order_parameter: kappa > 0");
    BesselState st;
    st.kappa = kappa;
    const double c = std::sqrt(2.0 / L) * beta * kappa;
    if (c <= 2.0) { // kappa <= kappa#: M'(0) = c/2 <= 1, only the trivial root
        st.trivial_only = true;
        return st;
    }
    auto f = [c](double a) { return c * bessel_ratio(0, a) - a; };
    double lo = 0.0, hi = c; // r_0 < 1 so M(a) < c: root below c
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < tol) break;
    }
    // Newton polish
    double a = 0.5 * (lo + hi);
    for (int it = 0; it < 50; ++it) {
        const double r0 = bessel_ratio(0, a);
        const double r1 = bessel_ratio(1, a);
        // r_0' = 1 - r_0/a * (1 + ...) ; use I ratios: I_0' = I_1, I_1' = (I_0+I_2)/2
        const double d = c * (0.5 * (1.0 + r0 * r1) - r0 * r0) - 1.0;
        if (d == 0.0) break;
        const double step = (c * r0 - a) / d;
        a -= step;
        if (std::abs(step) < tol) break;
    }
    st.a = a;
    st.ratio = bessel_ratio(0, a);
    return st;
}

// rho(x, a) for W = -w_k.
inline double kuramoto_closed_form(double x, double a, int kmode, double L)
{
    return std::exp(a * std::cos(2.0 * std::numbers::pi * kmode * x / L)) / (L * bessel_I0(a));
}

struct ConcentrationPoint {
    double a = 0.0;
    std::vector<double> peak_masses; // mass within eps of each minimum of W
};

// Mass within distance eps of each of the k minima of W = -w_k; tends to 1/k
// per peak as a grows (Laplace principle).
inline std::vector<ConcentrationPoint> concentration_diagnostic(
    const std::vector<double>& a_values, int kmode, double L, double eps)
{
    std::vector<ConcentrationPoint> out;
    for (double a : a_values) {
        ConcentrationPoint p;
        p.a = a;
        for (int j = 0; j < kmode; ++j) {
            const double centre = j * L / kmode; // minima of -cos(2 pi k x / L)
            const double mass = integrate_adaptive(
                [&](double x) { return kuramoto_closed_form(x, a, kmode, L); },
                centre - eps, centre + eps, 1e-12);
            p.peak_masses.push_back(mass);
        }
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace mckv
