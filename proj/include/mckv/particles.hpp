#pragma once

// Interacting-particle simulator: Euler-Maruyama for
// dX_i = -(kappa/N) sum_j grad W(X_i - X_j) dt + sqrt(2/beta) dB_i
// with periodic wrap. Pure k-mode kernels use the order-parameter reduction
// (the pair sum collapses to two global trig sums); everything else runs the
// generic O(N^2) pair loop on the closed-form gradient. Deterministic given
// the seed: fixed summation order throughout.

#include <random>

#include "mckv/grid.hpp"
#include "mckv/potentials.hpp"

namespace mckv {

struct ParticleEnsemble {
    int N = 0;
    double L = 1.0;
    double kappa = 0.0;
    double beta = 1.0;
    std::uint64_t seed = 0;
    double t = 0.0;
    std::vector<double> positions; // wrapped into [-L/2, L/2)
};

inline double wrap_position(double x, double L)
{
    x = std::fmod(x + 0.5 * L, L);
    if (x < 0.0) x += L;
    return x - 0.5 * L;
}

inline ParticleEnsemble init_particles(int N, double L, double kappa, double beta,
                                       std::uint64_t seed)
{
    if (N < 2) throw std::invalid_argument("init_particles: N >= 2");
    ParticleEnsemble e;
    e.N = N;
    e.L = L;
    e.kappa = kappa;
    e.beta = beta;
    e.seed = seed;
    e.positions.resize(N);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-0.5 * L, 0.5 * L);
    for (double& x : e.positions) x = uni(rng);
    return e;
}

namespace detail {

// W = c w_k has grad W(x) = -c N (2 pi k/L) sin(2 pi k x/L); the mean drift
// reduces to sin/cos order-parameter sums.
struct PureModeKernel {
    bool pure = false;
    int kmode = 0;
    double coeff = 0.0;
};

inline PureModeKernel pure_mode_kernel(const Potential& W)
{
    PureModeKernel pk;
    if (W.d != 1) return pk;
    int nonzero = 0;
    for (int k = 1; k <= W.kmax; ++k)
        if (W.coeffs[k] != 0.0) {
            ++nonzero;
            pk.kmode = k;
            pk.coeff = W.coeffs[k];
        }
    pk.pure = (nonzero == 1 && W.coeffs[0] == 0.0);
    return pk;
}

} // namespace detail

// One Euler-Maruyama step; rng must be the ensemble's own stream.
inline void particle_step(ParticleEnsemble& e, const Potential& W, double dt,
                          std::mt19937_64& rng)
{
    const int N = e.N;
    const double noise = std::sqrt(2.0 * dt / e.beta);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> drift(N, 0.0);

    const detail::PureModeKernel pk = detail::pure_mode_kernel(W);
    if (pk.pure) {
        const double om = 2.0 * std::numbers::pi * pk.kmode / e.L;
        const double amp = pk.coeff * std::sqrt(2.0 / e.L) * om; // grad W = -amp sin(om x)
        double csum = 0.0, ssum = 0.0;
        for (int j = 0; j < N; ++j) {
            csum += std::cos(om * e.positions[j]);
            ssum += std::sin(om * e.positions[j]);
        }
        for (int i = 0; i < N; ++i) {
            const double si = std::sin(om * e.positions[i]);
            const double ci = std::cos(om * e.positions[i]);
            // (1/N) sum_j sin(om(x_i - x_j)) = si * csum/N - ci * ssum/N
            const double pair = (si * csum - ci * ssum) / N;
            drift[i] = e.kappa * amp * pair; // -(kappa/N) sum grad W = +kappa amp pair
        }
    } else {
        if (!W.grad_form)
            throw std::invalid_argument("particle_step: potential has no nodal gradient");
        for (int i = 0; i < N; ++i) {
            double s = 0.0;
            for (int j = 0; j < N; ++j) {
                if (j == i) continue;
                s += W.grad_form(wrap_position(e.positions[i] - e.positions[j], e.L));
            }
            drift[i] = -e.kappa * s / N;
        }
    }
    for (int i = 0; i < N; ++i) {
        const double dx = drift[i] * dt + noise * gauss(rng);
        e.positions[i] = wrap_position(e.positions[i] + dx, e.L);
    }
    e.t += dt;
}

inline void simulate_particles(ParticleEnsemble& e, const Potential& W,
                               double T, double dt, std::mt19937_64& rng)
{
    const long long steps = static_cast<long long>(std::ceil(T / dt - 1e-12));
    for (long long s = 0; s < steps; ++s)
        particle_step(e, W, std::min(dt, T - s * dt), rng);
}

// Run past a burn-in, then pool positions over equally spaced collection
// windows: the time-averaged empirical measure, with sampling noise reduced
// by the number of windows.
inline std::vector<double> pooled_positions(ParticleEnsemble& e, const Potential& W,
                                            double burn_in, int windows, double window_dt,
                                            double dt, std::mt19937_64& rng)
{
    simulate_particles(e, W, burn_in, dt, rng);
    std::vector<double> pool;
    pool.reserve(static_cast<size_t>(e.N) * windows);
    for (int w = 0; w < windows; ++w) {
        simulate_particles(e, W, window_dt, dt, rng);
        pool.insert(pool.end(), e.positions.begin(), e.positions.end());
    }
    return pool;
}

// Normalised histogram on the torus; integrates to 1 exactly.
inline DensityField empirical_density(const ParticleEnsemble& e, int bins, int grid_M = 0)
{
    if (grid_M == 0) grid_M = bins;
    if (grid_M % bins != 0)
        throw std::invalid_argument("empirical_density: bins must divide grid resolution");
    TorusGrid g(1, e.L, grid_M);
    std::vector<long long> counts(bins, 0);
    const double bw = e.L / bins;
    for (double x : e.positions) {
        int b = static_cast<int>(std::floor((x + 0.5 * e.L) / bw));
        if (b == bins) b = 0;
        ++counts[b];
    }
    DensityField rho(g);
    const int per = grid_M / bins;
    for (int b = 0; b < bins; ++b) {
        const double v = static_cast<double>(counts[b]) / (e.N * bw);
        for (int j = 0; j < per; ++j) rho[b * per + j] = v;
    }
    return rho;
}

} // namespace mckv
