#pragma once

// The entropy-defect bound: for any density rho and mode k with n = n(k)
// nonzero entries,
//
//   H(rho|rho_inf) - C(n) (L^d/2) |rho~(k)|^2  >=  Gtil(y / lambda)  >= 0,
//
// where y = L^{d/2} 2^{n/2} |rho~(k)|, Gtil(z) = lambda z^2 / 2^{n+1} - log I_n(z),
// I_n(z) = sum_l z^{2l} ((2l)!)^{n-1} / ((l!)^{2n} 2^{2ln}), lambda(n) = 1/C(n),
// C(1) = C(2) = 1 and C(n) = (n/2)^n / (n-1)^{n-1} for n > 2.

#include "mckv/functionals.hpp"

namespace mckv {

inline double entdef_constant(int n)
{
    if (n < 1) throw std::domain_error("entdef_constant: n must be >= 1");
    if (n <= 2) return 1.0;
    return std::pow(0.5 * n, n) / std::pow(n - 1.0, n - 1.0);
}

inline double entdef_lambda(int n) { return 1.0 / entdef_constant(n); }

// I_n(z); terms accumulated through their ratio so factorials never overflow.
inline double entdef_In(int n, double z)
{
    if (n < 1) throw std::domain_error("entdef_In: n must be >= 1");
    const double z2 = z * z;
    double term = 1.0, sum = 1.0;
    for (int l = 0; l < 4000; ++l) {
        // t_{l+1}/t_l = z^2 (2l+2)^{n-1} (2l+1)^{n-1} / ((l+1)^{2n} 4^n)
        double ratio = z2 / std::pow(4.0, n);
        ratio *= std::pow((2.0 * l + 2.0) * (2.0 * l + 1.0), n - 1);
        ratio /= std::pow(l + 1.0, 2.0 * n);
        term *= ratio;
        sum += term;
        if (term < 1e-16 * sum) break;
    }
    return sum;
}

// Gtil(z) = lambda z^2 / 2^{n+1} - log I_n(z)
inline double entdef_Gtil(int n, double z)
{
    return entdef_lambda(n) * z * z / std::pow(2.0, n + 1) - std::log(entdef_In(n, z));
}

// G as a function of the mode amplitude y = |rho~(k)|
inline double entdef_G(int n, double y, double L, int d)
{
    const double z = std::pow(L, 0.5 * d) * std::pow(2.0, 0.5 * n) * std::abs(y);
    return entdef_Gtil(n, z / entdef_lambda(n));
}

// The Fenchel-dual lower bound on the relative entropy for an arbitrary
// tilt b:  H(rho|rho_inf) >= b |rho~(k)|^2 - log int exp(b rho~(k) w_k) drho_inf.
// The defect bound above is the optimised instance b = lambda^{-1} L^d.
inline double entdef_dual_bound(const DensityField& rho, const FourierIndex& k, double b)
{
    const TorusGrid& g = rho.grid;
    const double amp = cosine_transform(rho).at(k);
    const NodalField wk = basis_eval(k, g);
    const double u = uniform_value(g);
    double mgf = 0.0;
    for (size_t i = 0; i < wk.size(); ++i) mgf += std::exp(b * amp * wk[i]) * u;
    mgf *= g.weight();
    return b * amp * amp - std::log(mgf);
}

struct EntdefCheck {
    double lhs = 0.0;  // H - C(n) (L^d/2) |rho~(k)|^2
    double rhs = 0.0;  // G(|rho~(k)|)
    bool satisfied = false;
};

inline EntdefCheck entdef_bound_check(const DensityField& rho, const FourierIndex& k,
                                      double slack = 1e-12)
{
    const TorusGrid& g = rho.grid;
    const int n = k.nonzero_count(g.d);
    if (n == 0) throw std::domain_error("entdef_bound_check: k must be nonzero");
    const SpectralField s = cosine_transform(rho);
    const double amp = std::abs(s.at(k));
    const double Ld = std::pow(g.L, g.d);
    EntdefCheck out;
    out.lhs = relative_entropy(rho) - entdef_constant(n) * 0.5 * Ld * amp * amp;
    out.rhs = entdef_G(n, amp, g.L, g.d);
    out.satisfied = (out.lhs - out.rhs >= -slack) && (out.rhs >= -slack);
    return out;
}

} // namespace mckv
