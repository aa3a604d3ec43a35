#pragma once

// Scalar functionals of a density: entropy S, interaction energy E, free
// energy F = S/beta + (kappa/2) E, relative entropy H(rho|rho_inf), entropy
// dissipation J, Euler-Lagrange residual, and the convexity threshold.
// Nonpositive nodal values make the entropy +inf; consumers treat that as an
// extended-value sentinel, matching minimisation over positive densities.

#include <limits>

#include "mckv/potentials.hpp"

namespace mckv {

struct FunctionalReport {
    double S = 0.0;            // entropy  int rho log rho
    double E = 0.0;            // interaction energy E(rho, rho)
    double F = 0.0;            // free energy at (kappa, beta)
    double H = 0.0;            // relative entropy vs uniform
    double J = 0.0;            // entropy dissipation
    double EL_residual = 0.0;  // sup deviation of beta^-1 log rho + kappa W*rho
    bool finite = true;
};

inline double entropy(const DensityField& rho)
{
    double s = 0.0;
    for (double v : rho.values) {
        if (v < 0.0) return std::numeric_limits<double>::infinity();
        if (v > 0.0) s += v * std::log(v);
    }
    return s * rho.grid.weight();
}

inline double interaction_energy(const Potential& W, const NodalField& g)
{
    return bilinear_form(W, g, g);
}

inline double free_energy(const DensityField& rho, const Potential& W,
                          double kappa, double beta)
{
    const double s = entropy(rho);
    if (!std::isfinite(s)) return std::numeric_limits<double>::infinity();
    return s / beta + 0.5 * kappa * interaction_energy(W, rho);
}

inline double relative_entropy(const DensityField& rho)
{
    const double s = entropy(rho);
    if (!std::isfinite(s)) return s;
    return s - std::log(uniform_value(rho.grid));
}

// spectral gradient components of a nodal field
inline std::vector<NodalField> spectral_gradient(const NodalField& f)
{
    const TorusGrid& g = f.grid;
    SpectralField s = cosine_transform(f);
    std::vector<NodalField> out;
    for (int axis = 0; axis < g.d; ++axis) {
        SpectralField ds(g);
        s.for_each([&](FourierIndex m) {
            const int k = axis == 0 ? m.k1 : m.k2;
            if (k == 0) return;
            // d/dx cos_k = -om sin_k, d/dx sin_k = om cos_k (om = 2 pi k / L)
            const double om = 2.0 * std::numbers::pi * std::abs(k) / g.L;
            FourierIndex flipped = m;
            (axis == 0 ? flipped.k1 : flipped.k2) = -k;
            if (k > 0)
                ds.at(flipped) += -om * s.at(m);
            else
                ds.at(flipped) += om * s.at(m);
        });
        out.push_back(inverse_transform(ds));
    }
    return out;
}

// Fisher information int |grad log rho|^2 rho, with a floor under the log
// so near-zero regions of non-converged iterates stay finite.
inline double fisher_information(const DensityField& rho, double floor = 1e-30)
{
    NodalField logr(rho.grid);
    for (size_t i = 0; i < rho.size(); ++i)
        logr[i] = std::log(std::max(rho[i], floor));
    auto grad = spectral_gradient(logr);
    double s = 0.0;
    for (size_t i = 0; i < rho.size(); ++i) {
        double g2 = 0.0;
        for (const auto& gc : grad) g2 += gc[i] * gc[i];
        s += g2 * rho[i];
    }
    return s * rho.grid.weight();
}

// Entropy dissipation J = int |beta^-1 grad log rho + kappa grad(W*rho)|^2 rho,
// normalised so that dF/dt = -J along the flow.
inline double dissipation(const DensityField& rho, const Potential& W,
                          double kappa, double beta, double floor = 1e-30)
{
    NodalField logr(rho.grid);
    for (size_t i = 0; i < rho.size(); ++i)
        logr[i] = std::log(std::max(rho[i], floor));
    auto grad_log = spectral_gradient(logr);
    auto grad_conv = spectral_gradient(convolve(W, rho));
    double s = 0.0;
    for (size_t i = 0; i < rho.size(); ++i) {
        double g2 = 0.0;
        for (int c = 0; c < rho.grid.d; ++c) {
            const double t = grad_log[c][i] / beta + kappa * grad_conv[c][i];
            g2 += t * t;
        }
        s += g2 * rho[i];
    }
    return s * rho.grid.weight();
}

// sup_x | beta^-1 log rho + kappa W*rho - cbar |, cbar the rho-weighted mean;
// vanishes exactly at stationary states.
inline double el_residual(const DensityField& rho, const Potential& W,
                          double kappa, double beta)
{
    NodalField mu(rho.grid);
    const NodalField conv = convolve(W, rho);
    for (size_t i = 0; i < rho.size(); ++i) {
        if (rho[i] <= 0.0) return std::numeric_limits<double>::infinity();
        mu[i] = std::log(rho[i]) / beta + kappa * conv[i];
    }
    double cbar = 0.0;
    for (size_t i = 0; i < rho.size(); ++i) cbar += mu[i] * rho[i];
    cbar *= rho.grid.weight();
    double sup = 0.0;
    for (size_t i = 0; i < rho.size(); ++i) sup = std::max(sup, std::abs(mu[i] - cbar));
    return sup;
}

// kappa_con = 1 / (beta ||(W_u)_-||_inf); +inf for H-stable potentials,
// unavailable when the potential has no nodal reconstruction (Keller-Segel).
inline std::optional<double> kappa_con(const Potential& W, double beta)
{
    if (W.is_h_stable()) return std::numeric_limits<double>::infinity();
    const SupNorms n = sup_norms(W);
    if (!n.wu_neg_sup) return std::nullopt;
    if (*n.wu_neg_sup == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / (beta * *n.wu_neg_sup);
}

inline FunctionalReport functional_report(const DensityField& rho, const Potential& W,
                                          double kappa, double beta)
{
    FunctionalReport r;
    r.S = entropy(rho);
    r.finite = std::isfinite(r.S);
    r.E = interaction_energy(W, rho);
    r.F = r.finite ? r.S / beta + 0.5 * kappa * r.E : std::numeric_limits<double>::infinity();
    r.H = r.finite ? r.S - std::log(uniform_value(rho.grid)) : r.S;
    if (r.finite) {
        r.J = dissipation(rho, W, kappa, beta);
        r.EL_residual = el_residual(rho, W, kappa, beta);
    } else {
        r.J = r.EL_residual = std::numeric_limits<double>::infinity();
    }
    return r;
}

} // namespace mckv
