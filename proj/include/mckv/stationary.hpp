#pragma once

// Gibbs fixed-point map T rho = exp(-beta kappa W*rho)/Z and the damped,
// Anderson-accelerated self-consistent iteration for stationary states.
// Near a bifurcation the plain iteration stalls (the linearisation I - kappa T^
// is singular at kappa_*); Anderson mixing over the last few residuals
// restores fast convergence there.

#include <deque>

#include "mckv/functionals.hpp"

namespace mckv {

// T rho, computed with the exponent shifted by its max before exponentiation.
inline DensityField gibbs_map(const DensityField& rho, const Potential& W,
                              double kappa, double beta)
{
    const NodalField conv = convolve(W, rho);
    DensityField out(rho.grid);
    double mx = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < conv.size(); ++i)
        mx = std::max(mx, -beta * kappa * conv[i]);
    double z = 0.0;
    for (size_t i = 0; i < conv.size(); ++i) {
        out[i] = std::exp(-beta * kappa * conv[i] - mx);
        z += out[i];
    }
    z *= rho.grid.weight();
    for (size_t i = 0; i < out.size(); ++i) out[i] /= z;
    return out;
}

struct SolveConfig {
    double damping = 0.5;     // theta in (0, 1]
    int anderson_depth = 3;   // m >= 0; 0 is plain damped iteration
    int anderson_delay = 20;  // plain damped steps before mixing starts; keeps
                              // the quasi-Newton update from locking onto the
                              // unstable uniform fixed point
    double tol = 1e-10;       // on ||rho - T rho||_2
    int max_iter = 5000;
    bool symmetrize = true;   // project to the coordinate-wise even subspace
};

struct StationaryState {
    DensityField rho;
    double kappa = 0.0;
    double beta = 1.0;
    double residual = 0.0;      // ||rho - T rho||_2 at exit
    bool converged = false;
    int iterations = 0;
    FunctionalReport report;
    SpectralField mode_profile;
    std::vector<double> residual_history;
};

namespace detail {

// least squares min ||r0 - Dr c|| via normal equations with a small ridge
inline std::vector<double> anderson_coeffs(const std::vector<std::vector<double>>& dr,
                                           const std::vector<double>& r0)
{
    const int m = static_cast<int>(dr.size());
    std::vector<double> a(static_cast<size_t>(m) * m, 0.0), b(m, 0.0);
    for (int i = 0; i < m; ++i) {
        for (int j = i; j < m; ++j) {
            double s = 0.0;
            for (size_t t = 0; t < r0.size(); ++t) s += dr[i][t] * dr[j][t];
            a[i * m + j] = a[j * m + i] = s;
        }
        double s = 0.0;
        for (size_t t = 0; t < r0.size(); ++t) s += dr[i][t] * r0[t];
        b[i] = s;
    }
    double ridge = 0.0;
    for (int i = 0; i < m; ++i) ridge = std::max(ridge, a[i * m + i]);
    ridge = ridge * 1e-12 + 1e-300;
    for (int i = 0; i < m; ++i) a[i * m + i] += ridge;
    // Gaussian elimination with partial pivoting
    std::vector<int> piv(m);
    for (int i = 0; i < m; ++i) piv[i] = i;
    for (int col = 0; col < m; ++col) {
        int p = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(a[r * m + col]) > std::abs(a[p * m + col])) p = r;
        if (p != col) {
            for (int c = 0; c < m; ++c) std::swap(a[col * m + c], a[p * m + c]);
            std::swap(b[col], b[p]);
        }
        const double d = a[col * m + col];
        if (d == 0.0) return {};
        for (int r = col + 1; r < m; ++r) {
            const double f = a[r * m + col] / d;
            for (int c = col; c < m; ++c) a[r * m + c] -= f * a[col * m + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(m);
    for (int r = m - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < m; ++c) s -= a[r * m + c] * x[c];
        x[r] = s / a[r * m + r];
    }
    return x;
}

} // namespace detail

// Damped iteration rho <- (1-theta) rho + theta T rho with Anderson mixing
// over the last m residual differences. Non-convergence is reported in the
// returned state, not thrown; parameter scans must keep going.
inline StationaryState solve_stationary(const DensityField& seed, const Potential& W,
                                        double kappa, double beta,
                                        const SolveConfig& cfg = {})
{
    if (!(cfg.tol > 0.0) || cfg.damping <= 0.0 || cfg.damping > 1.0)
        throw std::invalid_argument("solve_stationary: bad config");

    DensityField rho = seed;
    if (cfg.symmetrize) {
        NodalField e = even_projection(rho);
        rho.values = std::move(e.values);
    }
    rho.normalise();

    StationaryState st;
    st.kappa = kappa;
    st.beta = beta;

    std::deque<std::vector<double>> hist_x, hist_r;
    const double wq = std::sqrt(rho.grid.weight());
    double peak_rn = 0.0;

    int it = 0;
    for (; it <= cfg.max_iter; ++it) {
        DensityField trho = gibbs_map(rho, W, kappa, beta);
        std::vector<double> r(rho.size());
        double rn = 0.0;
        for (size_t i = 0; i < rho.size(); ++i) {
            r[i] = trho[i] - rho[i];
            rn += r[i] * r[i];
        }
        rn = std::sqrt(rn) * wq;
        st.residual_history.push_back(rn);
        if (rn <= cfg.tol) {
            st.converged = true;
            st.residual = rn;
            break;
        }
        if (it == cfg.max_iter) {
            st.residual = rn;
            break;
        }
        // mixing made things much worse: restart the history
        if (st.residual_history.size() >= 2
            && rn > 10.0 * st.residual_history[st.residual_history.size() - 2]) {
            hist_x.clear();
            hist_r.clear();
        }

        peak_rn = std::max(peak_rn, rn);
        std::vector<double> next(rho.size());
        bool stepped = false;
        // mixing starts only once the damped iteration is contracting (past
        // the instability growth peak); quasi-Newton steps taken during the
        // escape from the uniform state lock back onto it
        const bool contracting = rn <= 0.75 * peak_rn;
        if (cfg.anderson_depth > 0 && it >= cfg.anderson_delay && contracting
            && static_cast<int>(hist_r.size()) >= 1) {
            const int m = static_cast<int>(hist_r.size());
            std::vector<std::vector<double>> dr(m, std::vector<double>(r.size()));
            for (int j = 0; j < m; ++j)
                for (size_t i = 0; i < r.size(); ++i)
                    dr[j][i] = r[i] - hist_r[j][i];
            auto c = detail::anderson_coeffs(dr, r);
            if (!c.empty()) {
                double csum = 0.0;
                for (double ci : c) csum += std::abs(ci);
                if (csum < 1e4) { // reject wildly extrapolated combinations
                    for (size_t i = 0; i < r.size(); ++i) {
                        double xi = rho[i] + cfg.damping * r[i];
                        for (int j = 0; j < m; ++j) {
                            const double gj = hist_x[j][i] + cfg.damping * hist_r[j][i];
                            const double gi = rho[i] + cfg.damping * r[i];
                            xi += c[j] * (gj - gi);
                        }
                        next[i] = xi;
                    }
                    stepped = true;
                }
            }
        }
        if (!stepped) {
            for (size_t i = 0; i < rho.size(); ++i)
                next[i] = rho[i] + cfg.damping * r[i];
        }

        hist_x.push_back(std::vector<double>(rho.values.begin(), rho.values.end()));
        hist_r.push_back(std::move(r));
        while (static_cast<int>(hist_x.size()) > cfg.anderson_depth) {
            hist_x.pop_front();
            hist_r.pop_front();
        }

        // keep the iterate a density: clip tiny negatives from mixing,
        // re-project and renormalise
        for (size_t i = 0; i < rho.size(); ++i)
            rho[i] = std::max(next[i], 1e-300);
        if (cfg.symmetrize) {
            NodalField e = even_projection(rho);
            rho.values = std::move(e.values);
        }
        rho.normalise();
    }

    st.iterations = it;
    st.rho = std::move(rho);
    st.report = functional_report(st.rho, W, kappa, beta);
    st.mode_profile = cosine_transform(st.rho);
    return st;
}

// Seeds rho_inf (1 + eps L^{d/2} w_k) for requested modes and signed
// amplitudes; positivity enforced at construction.
inline std::vector<DensityField> deflated_branch_seeds(const TorusGrid& g,
                                                       const std::vector<FourierIndex>& modes,
                                                       const std::vector<double>& amplitudes)
{
    std::vector<DensityField> seeds;
    const double u = uniform_value(g);
    for (const FourierIndex& k : modes) {
        const NodalField wk = basis_eval(k, g);
        const double scale = std::pow(g.L, 0.5 * g.d);
        for (double eps : amplitudes) {
            if (std::abs(eps) * scale * wk.sup_norm() >= 1.0)
                throw std::invalid_argument("deflated_branch_seeds: amplitude breaks positivity");
            DensityField s(g);
            for (size_t i = 0; i < s.size(); ++i)
                s[i] = u * (1.0 + eps * scale * wk[i]);
            seeds.push_back(std::move(s));
        }
    }
    return seeds;
}

// Sharply clustered seeds e^{c cos}-style for finding remote states that
// small perturbative seeds miss (discontinuous branches).
inline std::vector<DensityField> clustered_seeds(const TorusGrid& g,
                                                 std::vector<double> concentrations = {1.0, 4.0, 16.0})
{
    std::vector<DensityField> seeds;
    for (double c : concentrations) {
        DensityField s(g);
        if (g.d == 1) {
            for (int i = 0; i < g.M; ++i)
                s[i] = std::exp(c * std::cos(2.0 * std::numbers::pi * g.node(i) / g.L));
        } else {
            for (int i = 0; i < g.M; ++i)
                for (int j = 0; j < g.M; ++j)
                    s[static_cast<size_t>(i) * g.M + j] =
                        std::exp(c * (std::cos(2.0 * std::numbers::pi * g.node(i) / g.L)
                                      + std::cos(2.0 * std::numbers::pi * g.node(j) / g.L)));
        }
        s.normalise();
        seeds.push_back(std::move(s));
    }
    return seeds;
}

struct MinimiserSelection {
    const StationaryState* state = nullptr;
    bool degenerate_tie = false; // translation families etc.
};

inline MinimiserSelection select_minimiser(const std::vector<StationaryState>& states,
                                           double tie_tol = 1e-10)
{
    if (states.empty()) throw std::invalid_argument("select_minimiser: empty list");
    MinimiserSelection sel;
    for (const auto& s : states) {
        if (!s.converged) continue;
        if (!sel.state || s.report.F < sel.state->report.F) sel.state = &s;
    }
    if (!sel.state) throw std::runtime_error("select_minimiser: no converged state");
    for (const auto& s : states) {
        if (&s == sel.state || !s.converged) continue;
        if (std::abs(s.report.F - sel.state->report.F) <= tie_tol) sel.degenerate_tie = true;
    }
    return sel;
}

// Translate a d=1 field so the dominant mode's sin-component vanishes and the
// cos-component is nonnegative (spectral shift, exact for any offset).
inline DensityField align_phase(const DensityField& rho, int kmode)
{
    const TorusGrid& g = rho.grid;
    if (g.d != 1) throw std::invalid_argument("align_phase: d = 1 only");
    SpectralField s = cosine_transform(rho);
    const double c = s.at({kmode, 0}), sn = s.at({-kmode, 0});
    if (c * c + sn * sn == 0.0) return rho;
    const double phase = std::atan2(sn, c); // rho ~ A cos(k 2pi x/L - phase)
    SpectralField out(g);
    for (int k = 1; k <= g.band(); ++k) {
        const double th = phase * k / kmode;
        const double ck = s.at({k, 0}), sk = s.at({-k, 0});
        out.at({k, 0}) = ck * std::cos(th) + sk * std::sin(th);
        out.at({-k, 0}) = -ck * std::sin(th) + sk * std::cos(th);
    }
    out.at({0, 0}) = s.at({0, 0});
    NodalField f = inverse_transform(out);
    DensityField r(g);
    r.values = std::move(f.values);
    return r;
}

// L2 distance after the best whole-cell translation (d=1).
inline double aligned_l2_distance(const NodalField& a, const NodalField& b)
{
    assert(a.grid == b.grid && a.grid.d == 1);
    const int M = a.grid.M;
    double best = std::numeric_limits<double>::infinity();
    for (int sft = 0; sft < M; ++sft) {
        double s = 0.0;
        for (int i = 0; i < M; ++i) {
            const double dv = a[(i + sft) % M] - b[i];
            s += dv * dv;
        }
        best = std::min(best, s);
    }
    return std::sqrt(best * a.grid.weight());
}

} // namespace mckv
