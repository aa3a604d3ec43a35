#pragma once

// Time evolution of d rho/dt = beta^-1 Lap rho + kappa div(rho grad W*rho):
// diffusion integrated exactly in coefficient space, transport explicit with
// dealiased products, mode 0 untouched (exact mass conservation). Steps that
// push nodal values below -1e-10 are rejected and retried at half the step.

#include "mckv/functionals.hpp"

namespace mckv {

struct TrajectorySnapshot {
    double t = 0.0;
    double mass = 0.0;
    double min_value = 0.0;
    double F = 0.0;
    double H = 0.0;
    double J = 0.0;
    double l2_distance = 0.0; // from the uniform state
};

struct Trajectory {
    std::vector<TrajectorySnapshot> diagnostics;
    std::vector<double> snapshot_times;
    std::vector<DensityField> states;
    DensityField final_state;
    bool aborted = false;       // positivity guard exhausted
    bool steady_state = false;  // early termination on ||drho|| < steady_tol
    double time_reached = 0.0;
};

struct EvolveConfig {
    double dt = 0.0;              // 0: stability-scaled default
    double snapshot_interval = 0.0; // 0: diagnostics only at start/end
    bool store_states = false;
    double steady_tol = 1e-10;    // on ||rho(t+1) - rho(t)||_2 per unit time
    int max_halvings = 10;
};

inline double default_dt(const TorusGrid& g, const Potential& W, double kappa, double beta)
{
    const SupNorms n = sup_norms(W);
    const double gw = n.grad_sup.value_or(1.0);
    return 0.1 * (g.L / g.M) / (1.0 / beta + kappa * gw);
}

namespace detail {

// transport term kappa div(rho grad(W*rho)) in signed coefficient space
inline SpectralField transport_term(const DensityField& rho, const Potential& W,
                                    double kappa)
{
    const TorusGrid& g = rho.grid;
    const NodalField conv = convolve(W, rho);
    SpectralField flux_div(g);
    std::vector<NodalField> grad_conv = spectral_gradient(conv);
    for (int axis = 0; axis < g.d; ++axis) {
        NodalField flux = dealiased_product(rho, grad_conv[axis]);
        SpectralField fs = cosine_transform(flux);
        fs.for_each([&](FourierIndex m) {
            const int k = axis == 0 ? m.k1 : m.k2;
            if (k == 0) return;
            const double om = 2.0 * std::numbers::pi * std::abs(k) / g.L;
            FourierIndex flipped = m;
            (axis == 0 ? flipped.k1 : flipped.k2) = -k;
            if (k > 0)
                flux_div.at(flipped) += -om * fs.at(m);
            else
                flux_div.at(flipped) += om * fs.at(m);
        });
    }
    for (double& c : flux_div.coef) c *= kappa;
    flux_div.at({0, 0}) = 0.0; // divergence has exact zero mean
    return flux_div;
}

inline double mode_k2(const FourierIndex& m)
{
    return static_cast<double>(m.k1) * m.k1 + static_cast<double>(m.k2) * m.k2;
}

} // namespace detail

inline Trajectory evolve(const DensityField& rho0, const Potential& W,
                         double kappa, double beta, double T,
                         EvolveConfig cfg = {})
{
    const TorusGrid& g = rho0.grid;
    if (!W.covers(g)) throw std::invalid_argument("evolve: potential does not cover grid");
    if (cfg.dt <= 0.0) cfg.dt = default_dt(g, W, kappa, beta);

    Trajectory tr;
    DensityField rho = rho0;
    double t = 0.0;
    double dt = cfg.dt;

    auto snap = [&](double tt, const DensityField& r) {
        TrajectorySnapshot s;
        s.t = tt;
        s.mass = r.integral();
        s.min_value = r.min_value();
        FunctionalReport fr = functional_report(r, W, kappa, beta);
        s.F = fr.F;
        s.H = fr.H;
        s.J = fr.J;
        NodalField diff = r - uniform_state(g);
        s.l2_distance = diff.l2_norm();
        tr.diagnostics.push_back(s);
        if (cfg.store_states) {
            tr.snapshot_times.push_back(tt);
            tr.states.push_back(r);
        }
    };
    snap(0.0, rho);
    double next_snapshot = cfg.snapshot_interval > 0.0 ? cfg.snapshot_interval
                                                       : std::numeric_limits<double>::infinity();

    const double om2 = std::pow(2.0 * std::numbers::pi / g.L, 2);
    while (t < T) {
        const double step = std::min(dt, T - t);
        SpectralField s = cosine_transform(rho);
        SpectralField n = detail::transport_term(rho, W, kappa);
        SpectralField out(g);
        out.for_each([&](FourierIndex m) {
            const double x = om2 * detail::mode_k2(m) * step / beta;
            const double damp = std::exp(-x);
            // phi1 weight makes discrete fixed points exact stationary states
            const double phi1 = x > 1e-12 ? -std::expm1(-x) / x : 1.0 - 0.5 * x;
            out.at(m) = damp * s.at(m) + step * phi1 * n.at(m);
        });
        out.at({0, 0}) = s.at({0, 0}); // mode 0 untouched
        NodalField cand = inverse_transform(out);

        if (cand.min_value() < -1e-10) {
            if (cfg.max_halvings-- <= 0) {
                tr.aborted = true;
                break;
            }
            dt *= 0.5;
            continue;
        }
        double dn = 0.0;
        for (size_t i = 0; i < cand.size(); ++i) {
            const double dv = cand[i] - rho[i];
            dn += dv * dv;
        }
        dn = std::sqrt(dn * g.weight());
        rho.values = std::move(cand.values);
        t += step;
        if (t >= next_snapshot - 1e-12 * T) {
            snap(t, rho);
            next_snapshot += cfg.snapshot_interval;
        }
        if (dn < cfg.steady_tol * step) {
            tr.steady_state = true;
            break;
        }
    }
    if (tr.diagnostics.empty() || tr.diagnostics.back().t != t) snap(t, rho);
    tr.final_state = std::move(rho);
    tr.time_reached = t;
    return tr;
}

struct DecayReport {
    bool in_hypothesis = false;   // one of the two subcritical conditions holds
    bool l2_condition = false;    // kappa < 2 pi / (3 beta L ||grad W||_inf)
    bool entropy_condition = false; // H-stable or kappa < 2 pi^2/(beta L^2 ||Lap W||_inf)
    double theoretical_rate = 0.0; // 4 pi^2/(beta L^2) - 2 kappa ||Lap W_u||_inf
    double fitted_rate = 0.0;      // least-squares slope of -log H(t) on the tail
    bool rate_ok = false;          // fitted >= theoretical - 5 percent slack
};

// Fit log H(t) over the trajectory tail and compare with the subcritical
// relative-entropy decay rate.
inline DecayReport decay_report(const Trajectory& tr, const Potential& W,
                                double kappa, double beta)
{
    DecayReport rep;
    const SupNorms n = sup_norms(W);
    const double L = W.L;
    if (n.grad_sup)
        rep.l2_condition = kappa < 2.0 * std::numbers::pi / (3.0 * beta * L * *n.grad_sup);
    if (W.is_h_stable())
        rep.entropy_condition = true;
    else if (n.lap_sup)
        rep.entropy_condition =
            kappa < 2.0 * std::numbers::pi * std::numbers::pi / (beta * L * L * *n.lap_sup);
    rep.in_hypothesis = rep.l2_condition || rep.entropy_condition;

    const double lap_u = n.lap_u_sup.value_or(0.0);
    rep.theoretical_rate = 4.0 * std::numbers::pi * std::numbers::pi / (beta * L * L)
                           - 2.0 * kappa * lap_u;

    // least squares on log H over the usable tail
    std::vector<std::pair<double, double>> pts;
    for (const auto& s : tr.diagnostics)
        if (s.H > 1e-13 && s.t > 0.0) pts.push_back({s.t, std::log(s.H)});
    if (pts.size() >= 3) {
        const size_t start = pts.size() / 3; // drop the transient
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int m = 0;
        for (size_t i = start; i < pts.size(); ++i) {
            sx += pts[i].first;
            sy += pts[i].second;
            sxx += pts[i].first * pts[i].first;
            sxy += pts[i].first * pts[i].second;
            ++m;
        }
        const double det = m * sxx - sx * sx;
        if (det > 0.0) rep.fitted_rate = -(m * sxy - sx * sy) / det;
    }
    if (rep.in_hypothesis)
        rep.rate_ok = rep.fitted_rate >= rep.theoretical_rate - 0.05 * std::abs(rep.theoretical_rate);
    return rep;
}

} // namespace mckv
