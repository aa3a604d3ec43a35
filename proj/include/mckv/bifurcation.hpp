#pragma once

// Linear stability about the uniform state, enumeration of local bifurcation
// points (1D modes and 2D permutation classes), amplitude-parameterised
// branch continuation, and the quadratic branch-shape fit.

#include <algorithm>
#include <random>

#include "mckv/stationary.hpp"

namespace mckv {

struct EigenvalueEntry {
    FourierIndex k;
    double lambda = 0.0;
};

struct SpectrumReport {
    std::vector<EigenvalueEntry> eigenvalues;
    double kappa_sharp = std::numeric_limits<double>::infinity();
    FourierIndex k_sharp;
    bool k_sharp_unique = false;
    bool h_stable = false;
};

// lambda_k = -(2 pi |k|/L)^2 (beta^-1 + kappa L^{-d/2} W~(k)/Theta(k)), k != 0.
inline double stability_eigenvalue(const Potential& W, const FourierIndex& k,
                                   double kappa, double beta)
{
    const double k2 = static_cast<double>(k.k1) * k.k1 + static_cast<double>(k.k2) * k.k2;
    const double q = std::pow(2.0 * std::numbers::pi / W.L, 2) * k2;
    const double what = W.coeff(k) / theta_factor(k, W.d);
    return -q / beta - kappa * std::pow(W.L, -0.5 * W.d) * q * what;
}

inline SpectrumReport spectrum(const Potential& W, double kappa, double beta,
                               int kmax_report = 32, double eps_deg = 1e-9)
{
    SpectrumReport rep;
    rep.h_stable = W.is_h_stable();
    const int kr = std::min(kmax_report, W.kmax);
    auto visit = [&](FourierIndex k) {
        if (k.is_zero(W.d)) return;
        rep.eigenvalues.push_back({k, stability_eigenvalue(W, k, kappa, beta)});
    };
    if (W.d == 1)
        for (int k = 1; k <= kr; ++k) visit({k, 0});
    else
        for (int k1 = 0; k1 <= kr; ++k1)
            for (int k2 = 0; k2 <= kr; ++k2) visit({k1, k2});

    if (!rep.h_stable) {
        const DominantMode dm = dominant_mode(W, eps_deg);
        rep.k_sharp = dm.k;
        rep.k_sharp_unique = (dm.multiplicity == 1);
        rep.kappa_sharp = -std::pow(W.L, 0.5 * W.d) / (beta * dm.normalised_value);
    }
    return rep;
}

struct BifurcationPoint {
    FourierIndex k;       // class representative (sorted descending in d=2)
    double kappa = 0.0;   // -L^{d/2} Theta(k)/(beta W~(k))
    int multiplicity = 1; // card{[k'] : W~/Theta matches} at eps_deg
    bool simple = false;
    bool odd_multiplicity = false; // bifurcation by the odd-multiplicity remark
};

// All k (or permutation classes [k] in d=2) with W~(k) < 0 up to kmax, with
// multiplicities of the normalised coefficient at relative tolerance eps_deg.
inline std::vector<BifurcationPoint> enumerate_bifurcations(const Potential& W, double beta,
                                                            int kmax, double eps_deg = 1e-9)
{
    kmax = std::min(kmax, W.kmax);
    std::vector<std::pair<FourierIndex, double>> classes; // rep -> W~/Theta
    if (W.d == 1) {
        for (int k = 1; k <= kmax; ++k)
            classes.push_back({{k, 0}, W.coeff({k, 0}) / theta_factor({k, 0}, 1)});
    } else {
        for (int k1 = 0; k1 <= kmax; ++k1)
            for (int k2 = 0; k2 <= k1; ++k2) { // class rep k1 >= k2
                if (k1 == 0 && k2 == 0) continue;
                classes.push_back({{k1, k2}, W.coeff({k1, k2}) / theta_factor({k1, k2}, 2)});
            }
    }
    std::vector<BifurcationPoint> pts;
    for (auto& [k, v] : classes) {
        if (!(v < 0.0)) continue;
        BifurcationPoint p;
        p.k = k;
        p.kappa = -std::pow(W.L, 0.5 * W.d) * theta_factor(k, W.d) / (beta * W.coeff(k));
        p.multiplicity = 0;
        for (auto& [k2, v2] : classes)
            if (std::abs(v2 - v) <= eps_deg * std::abs(v)) ++p.multiplicity;
        p.simple = (p.multiplicity == 1);
        p.odd_multiplicity = (p.multiplicity % 2 == 1) && !p.simple;
        pts.push_back(p);
    }
    std::sort(pts.begin(), pts.end(),
              [](const BifurcationPoint& a, const BifurcationPoint& b) { return a.kappa < b.kappa; });
    return pts;
}

// r(z) = d_{1,4}(z) - d_{3,4}(z); certifies uniqueness up to permutation of
// two-square representations (r = 1 for z = p^{2n}).
inline long long two_square_count(long long z)
{
    if (z < 1) throw std::domain_error("two_square_count: z >= 1");
    long long d1 = 0, d3 = 0;
    for (long long q = 1; q * q <= z; ++q) {
        if (z % q) continue;
        for (long long dd : {q, z / q}) {
            if (dd % 4 == 1) ++d1;
            if (dd % 4 == 3) ++d3;
        }
        if (q == z / q) { // perfect square: undo the double count
            if (q % 4 == 1) --d1;
            if (q % 4 == 3) --d3;
        }
    }
    return d1 - d3;
}

struct BranchPointSample {
    double s = 0.0;      // amplitude rho~(k*)
    double kappa = 0.0;
    double l1_distance = 0.0;
    StationaryState state;
};

struct Branch {
    BifurcationPoint origin;
    std::vector<BranchPointSample> points; // ordered by s
    double curvature_fit = 0.0;            // kappa''(0) from the quadratic fit
    bool truncated = false;
};

namespace detail {

// Solve for (rho, kappa) with the dominant-mode amplitude pinned to s:
// alternate T-iterations with a scalar secant choosing kappa so that
// (T_kappa rho)~(k*) = s. Handles folds since kappa floats freely.
inline bool pinned_amplitude_solve(const Potential& W, double beta, FourierIndex kstar,
                                   double s, DensityField& rho, double& kappa,
                                   double tol, int max_iter)
{
    const TorusGrid& g = rho.grid;
    auto amp_of = [&](const DensityField& r) { return cosine_transform(r).at(kstar); };

    for (int it = 0; it < max_iter; ++it) {
        // scalar solve: kappa such that the image amplitude matches s.
        // warm secant first, bisection fallback when it strays.
        auto h = [&](double kap) { return amp_of(gibbs_map(rho, W, kap, beta)) - s; };
        double k0 = kappa, f0 = h(k0);
        bool pinned = false;
        if (std::abs(f0) > 1e-15) {
            double k1 = k0 * 1.0009765625, f1 = h(k1);
            for (int n = 0; n < 30; ++n) {
                if (f1 == f0) break;
                double k2 = k1 - f1 * (k1 - k0) / (f1 - f0);
                if (!(k2 > 0.05 * kappa) || !(k2 < 20.0 * kappa)) break;
                k0 = k1;
                f0 = f1;
                k1 = k2;
                f1 = h(k1);
                if (std::abs(f1) < 1e-14 * (std::abs(s) + 1e-12)) {
                    pinned = true;
                    break;
                }
            }
            if (pinned || std::abs(f1) < 1e-12 * (std::abs(s) + 1e-9)) {
                kappa = k1;
                pinned = true;
            }
        } else {
            pinned = true;
        }
        if (!pinned) {
            double k_lo = 0.5 * kappa, k_hi = 2.0 * kappa;
            double f_lo = h(k_lo), f_hi = h(k_hi);
            int widen = 0;
            while (f_lo * f_hi > 0.0 && widen++ < 40) {
                k_lo *= 0.8;
                k_hi *= 1.25;
                f_lo = h(k_lo);
                f_hi = h(k_hi);
            }
            if (f_lo * f_hi > 0.0) return false;
            for (int b = 0; b < 80; ++b) {
                const double mid = 0.5 * (k_lo + k_hi);
                const double fm = h(mid);
                if (f_lo * fm <= 0.0) {
                    k_hi = mid;
                    f_hi = fm;
                } else {
                    k_lo = mid;
                    f_lo = fm;
                }
                if (k_hi - k_lo < 1e-15 * k_hi) break;
            }
            kappa = 0.5 * (k_lo + k_hi);
        }

        DensityField trho = gibbs_map(rho, W, kappa, beta);
        double rn = 0.0;
        for (size_t i = 0; i < rho.size(); ++i) {
            const double dv = trho[i] - rho[i];
            rn += dv * dv;
        }
        rn = std::sqrt(rn * g.weight());
        rho = std::move(trho);
        if (rn <= tol) return true;
    }
    return false;
}

// Invert the dominant-mode branch at a fixed kappa: find s with kappa(s) =
// kappa_target on a geometric amplitude grid, then bisect. Robust arbitrarily
// close to the onset where plain fixed-point iteration stalls.
struct BranchInversion {
    bool found = false;
    double s = 0.0;
    StationaryState state;
};

inline BranchInversion invert_branch_at(const Potential& W, double beta,
                                        const FourierIndex& kstar, const TorusGrid& g,
                                        double kappa_target, double tol = 1e-11)
{
    BranchInversion out;
    const double u = uniform_value(g);
    const NodalField wk = basis_eval(kstar, g);
    const double s_cap = 0.85 * basis_normalisation(kstar, g);

    DensityField rho(g);
    double kap = kappa_target;
    bool warm = false;
    auto kappa_of = [&](double s) -> std::optional<double> {
        if (!warm) {
            for (size_t i = 0; i < rho.size(); ++i)
                rho[i] = std::max(1e-12 * u, u + s * wk[i]);
            rho.normalise();
            kap = kappa_target;
        }
        double k_io = kap;
        if (!pinned_amplitude_solve(W, beta, kstar, s, rho, k_io, tol, 600)) {
            warm = false;
            return std::nullopt;
        }
        kap = k_io;
        warm = true;
        return k_io;
    };

    double s_lo = 0.0, s_hi = 0.0, f_lo = 0.0;
    double prev_s = 0.0, prev_kv = 0.0;
    bool have_prev = false, have_bracket = false;
    for (double s = 1e-5 * s_cap; s <= s_cap; s *= 2.5) {
        auto k = kappa_of(s);
        if (!k) {
            have_prev = false;
            continue;
        }
        if (have_prev && (prev_kv - kappa_target) * (*k - kappa_target) <= 0.0) {
            s_lo = prev_s;
            s_hi = s;
            f_lo = prev_kv - kappa_target;
            have_bracket = true;
            break;
        }
        prev_s = s;
        prev_kv = *k;
        have_prev = true;
    }
    if (!have_bracket) return out;

    for (int b = 0; b < 60 && s_hi - s_lo > 1e-15; ++b) {
        const double sm = 0.5 * (s_lo + s_hi);
        auto k = kappa_of(sm);
        if (!k) return out;
        const double fm = *k - kappa_target;
        if (std::abs(fm) < 1e-12 * kappa_target) {
            s_lo = s_hi = sm;
            break;
        }
        if (f_lo * fm > 0.0) {
            s_lo = sm;
            f_lo = fm;
        } else {
            s_hi = sm;
        }
    }
    const double s_final = 0.5 * (s_lo + s_hi);
    auto k = kappa_of(s_final);
    if (!k || std::abs(*k - kappa_target) > 1e-9 * kappa_target) return out;
    if (rho.min_value() <= 0.0) return out;
    out.found = true;
    out.s = s_final;
    out.state.rho = rho;
    out.state.kappa = kappa_target;
    out.state.beta = beta;
    out.state.converged = true;
    out.state.report = functional_report(rho, W, kappa_target, beta);
    out.state.mode_profile = cosine_transform(rho);
    out.state.residual = out.state.report.EL_residual;
    return out;
}

} // namespace detail

// Continuation of a simple branch in the amplitude s = rho~(k*); each
// accepted point is a converged stationary state at its kappa(s).
inline Branch continue_branch(const BifurcationPoint& origin, const Potential& W,
                              double beta, const TorusGrid& g,
                              double s_max, double ds, double tol = 1e-11)
{
    if (!origin.simple) throw std::invalid_argument("continue_branch: origin must be simple");
    Branch br;
    br.origin = origin;
    const DensityField base = uniform_state(g);
    const double u = uniform_value(g);

    for (int dir : {+1, -1}) {
        DensityField rho = base;
        double kappa = origin.kappa;
        const NodalField wk = basis_eval(origin.k, g);
        int nsteps = static_cast<int>(std::floor(s_max / ds + 0.5));
        for (int n = 1; n <= nsteps; ++n) {
            const double s = dir * n * ds;
            DensityField seed = rho;
            if (n == 1) {
                for (size_t i = 0; i < seed.size(); ++i)
                    seed[i] = std::max(u * 1e-12, u + s * wk[i]);
                seed.normalise();
            }
            DensityField work = seed;
            double kap = kappa;
            if (!detail::pinned_amplitude_solve(W, beta, origin.k, s, work, kap, tol, 4000)) {
                br.truncated = true;
                break;
            }
            if (work.min_value() <= 0.0) {
                br.truncated = true;
                break;
            }
            BranchPointSample pt;
            pt.s = s;
            pt.kappa = kap;
            NodalField diff = work - base;
            pt.l1_distance = diff.l1_norm();
            pt.state.rho = work;
            pt.state.kappa = kap;
            pt.state.beta = beta;
            pt.state.converged = true;
            pt.state.report = functional_report(work, W, kap, beta);
            pt.state.mode_profile = cosine_transform(work);
            pt.state.residual = pt.state.report.EL_residual;
            br.points.push_back(std::move(pt));
            rho = work;
            kappa = kap;
        }
    }
    std::sort(br.points.begin(), br.points.end(),
              [](const BranchPointSample& a, const BranchPointSample& b) { return a.s < b.s; });

    // quadratic fit kappa(s) = k0 + c s^2 over |s| <= 0.05: kappa''(0) = 2c
    double sxx = 0.0, sx4 = 0.0, sy = 0.0, sxy = 0.0;
    int m = 0;
    for (const auto& p : br.points) {
        if (std::abs(p.s) > 0.05) continue;
        const double x = p.s * p.s;
        sxx += x;
        sx4 += x * x;
        sy += p.kappa;
        sxy += x * p.kappa;
        ++m;
    }
    if (m >= 3) {
        const double det = m * sx4 - sxx * sxx;
        if (det != 0.0) br.curvature_fit = 2.0 * (m * sxy - sxx * sy) / det;
    }
    return br;
}

struct UniquenessProbeReport {
    bool applicable = true;
    int seeds_tried = 0;
    int off_branch_states = 0;
    double max_off_branch_distance = 0.0;
};

// Random-seed solve near (rho_inf, kappa*); each converged nontrivial state
// is tested for branch membership by re-solving with its own dominant
// amplitude pinned (the continued branch evaluated exactly at that point).
inline UniquenessProbeReport local_uniqueness_probe(const BifurcationPoint& origin,
                                                    const Potential& W, double beta,
                                                    const TorusGrid& g, double radius,
                                                    int nseeds = 20, unsigned rng_seed = 7)
{
    UniquenessProbeReport rep;
    if (!origin.simple) {
        rep.applicable = false;
        return rep;
    }
    if (radius > 0.5 * origin.kappa) {
        rep.applicable = false; // out of the local neighbourhood this probe is for
        return rep;
    }
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const double u = uniform_value(g);
    SolveConfig cfg;
    cfg.tol = 1e-11;
    for (int t = 0; t < nseeds; ++t) {
        const double kap = origin.kappa + radius * uni(rng);
        DensityField seed(g);
        for (size_t i = 0; i < seed.size(); ++i) seed[i] = u;
        for (int k = 1; k <= 4 && k <= g.band(); ++k) {
            const double amp = 0.3 * uni(rng) / k;
            const NodalField wk = basis_eval({k, 0}, g);
            for (size_t i = 0; i < seed.size(); ++i)
                seed[i] = std::max(1e-12 * u, seed[i] + amp * u * std::pow(g.L, 0.5 * g.d) * wk[i]);
        }
        seed.normalise();
        ++rep.seeds_tried;
        StationaryState st = solve_stationary(seed, W, kap, beta, cfg);
        if (!st.converged) continue;
        NodalField diff = st.rho - uniform_state(g);
        if (diff.l2_norm() < 1e-8) continue; // trivial
        // on-branch check: re-solve with the amplitude pinned to the found
        // state's own dominant amplitude and compare state and kappa
        DensityField aligned = g.d == 1 ? align_phase(st.rho, origin.k.k1) : st.rho;
        const double s_found = std::abs(cosine_transform(aligned).at(origin.k));
        DensityField work = aligned;
        double kap_branch = origin.kappa;
        bool on_branch = false;
        if (detail::pinned_amplitude_solve(W, beta, origin.k, s_found, work, kap_branch,
                                           1e-11, 2000)) {
            NodalField d2 = work - aligned;
            on_branch = d2.l2_norm() < 1e-6 && std::abs(kap_branch - kap) < 1e-6 * origin.kappa;
        }
        if (!on_branch) {
            ++rep.off_branch_states;
            NodalField d2 = work - aligned;
            rep.max_off_branch_distance = std::max(rep.max_off_branch_distance, d2.l2_norm());
        }
    }
    return rep;
}

} // namespace mckv
