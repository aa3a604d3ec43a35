#pragma once

// The interaction-potential catalog. A Potential is its cosine-coefficient
// table over k in N^d (coordinate-wise even kernels carry no sin modes);
// nodal values, derivatives and norms are derived from closed forms where
// they exist. Coefficients are the source of truth throughout.

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "mckv/grid.hpp"
#include "mckv/quadrature.hpp"
#include "mckv/spectral.hpp"

namespace mckv {

struct Potential {
    std::string name;
    double L = 2.0 * std::numbers::pi;
    int d = 1;
    int kmax = 0;                 // coefficients carried for 0 <= k_i <= kmax
    std::vector<double> coeffs;   // dense (kmax+1)^d table, W~(k)
    std::map<std::string, double> params;

    // closed forms (d = 1 potentials only); piecewise-analytic
    std::function<double(double)> closed_form;  // W(x)
    std::function<double(double)> grad_form;    // W'(x), classical part
    std::function<double(double)> lap_form;     // W''(x), classical part
    std::vector<double> kink_points;            // in [0, L/2]

    size_t idx(const FourierIndex& k) const
    {
        return d == 1 ? static_cast<size_t>(k.k1)
                      : static_cast<size_t>(k.k1) * (kmax + 1) + k.k2;
    }
    double coeff(const FourierIndex& k) const
    {
        const FourierIndex a = k.abs();
        if (a.k1 > kmax || (d == 2 && a.k2 > kmax)) return 0.0;
        return coeffs[idx(a)];
    }
    double& coeff_ref(const FourierIndex& k) { return coeffs[idx(k.abs())]; }

    bool covers(const TorusGrid& g) const
    {
        return g.d == d && g.L == L && g.band() <= kmax;
    }

    // visit every k in N^d up to kmax
    template <class F>
    void for_each_mode(F&& fn) const
    {
        if (d == 1) {
            for (int k = 0; k <= kmax; ++k) fn(FourierIndex{k, 0});
        } else {
            for (int k1 = 0; k1 <= kmax; ++k1)
                for (int k2 = 0; k2 <= kmax; ++k2) fn(FourierIndex{k1, k2});
        }
    }

    bool is_h_stable() const
    {
        bool ok = true;
        for_each_mode([&](FourierIndex k) {
            if (coeff(k) < 0.0) ok = false;
        });
        return ok;
    }

    static Potential from_coefficients(std::string name, double L, int d,
                                       std::vector<std::pair<FourierIndex, double>> table,
                                       int kmax)
    {
        Potential W;
        W.name = std::move(name);
        W.L = L;
        W.d = d;
        W.kmax = kmax;
        W.coeffs.assign(d == 1 ? kmax + 1 : (kmax + 1) * (kmax + 1), 0.0);
        for (auto& [k, v] : table) {
            if (k.k1 < 0 || k.k1 > kmax || (d == 2 && (k.k2 < 0 || k.k2 > kmax)))
                throw std::out_of_range("from_coefficients: mode outside table");
            W.coeffs[W.idx(k)] = v;
        }
        return W;
    }
};

// ---------------------------------------------------------------------------
// catalog

// W = -w_kmode. The single negative mode drives a continuous transition;
// kmode = 2 is the Maiers-Saupe liquid-crystal kernel.
inline Potential kuramoto(int kmode, double L = 2.0 * std::numbers::pi, int kmax = 512)
{
    if (kmode < 1) throw std::invalid_argument("kuramoto: kmode must be >= 1");
    if (kmode > kmax) throw std::invalid_argument("kuramoto: kmode outside table");
    Potential W;
    W.name = "kuramoto";
    W.L = L;
    W.d = 1;
    W.kmax = kmax;
    W.params = {{"kmode", static_cast<double>(kmode)}};
    W.coeffs.assign(kmax + 1, 0.0);
    W.coeffs[kmode] = -1.0;
    const double n = std::sqrt(2.0 / L);
    const double om = 2.0 * std::numbers::pi * kmode / L;
    W.closed_form = [n, om](double x) { return -n * std::cos(om * x); };
    W.grad_form = [n, om](double x) { return n * om * std::sin(om * x); };
    W.lap_form = [n, om](double x) { return n * om * om * std::cos(om * x); };
    return W;
}

// Hegselmann-Krause opinion kernel W(x) = -((|x|-R/2)_-)^2 / 2, supported on
// |x| < R/2; rescaled variant divides by R^3 so the mass survives R -> 0.
// Coefficients are the exact cosine transform of this form,
//   W~(k) = -sqrt(2/L) [ R/om^2 - 2 sin(pi k R/L)/om^3 ],  om = 2 pi k / L,
// and W~(0) = -R^3/(24 sqrt(L)).
inline Potential hegselmann_krause(double R, double L = 1.0, bool rescaled = false,
                                   int kmax = 512)
{
    if (!(R > 0.0) || R > L) throw std::invalid_argument("hegselmann_krause: need 0 < R <= L");
    Potential W;
    W.name = rescaled ? "hegselmann_krause_rescaled" : "hegselmann_krause";
    W.L = L;
    W.d = 1;
    W.kmax = kmax;
    W.params = {{"R", R}, {"rescaled", rescaled ? 1.0 : 0.0}};
    W.coeffs.assign(kmax + 1, 0.0);
    const double scale = rescaled ? 1.0 / (R * R * R) : 1.0;
    W.coeffs[0] = -scale * R * R * R / (24.0 * std::sqrt(L));
    for (int k = 1; k <= kmax; ++k) {
        const double om = 2.0 * std::numbers::pi * k / L;
        const double phi = std::numbers::pi * k * R / L;
        W.coeffs[k] = -scale * std::sqrt(2.0 / L)
                      * (R / (om * om) - 2.0 * std::sin(phi) / (om * om * om));
    }
    W.closed_form = [R, scale](double x) {
        const double t = std::abs(x) - 0.5 * R;
        return t < 0.0 ? -0.5 * scale * t * t : 0.0;
    };
    W.grad_form = [R, scale](double x) {
        const double t = std::abs(x) - 0.5 * R;
        if (t >= 0.0) return 0.0;
        return x >= 0.0 ? -scale * t : scale * t;
    };
    W.lap_form = [R, scale](double x) {
        return std::abs(x) < 0.5 * R ? -scale : 0.0;
    };
    W.kink_points = {0.0, 0.5 * R};
    return W;
}

namespace detail {

// 1/Gamma(x), zero at nonpositive integers; reflection for x < 0.5.
inline double rgamma(double x)
{
    if (x > 0.5) return 1.0 / std::tgamma(x);
    const double r = std::round(x);
    if (std::abs(x - r) < 1e-12 && r <= 0.0) return 0.0;
    return std::sin(std::numbers::pi * x) * std::tgamma(1.0 - x) / std::numbers::pi;
}

// cos(pi k / 2) evaluated exactly on integers
inline double cos_half_pi(int k)
{
    if (k & 1) return 0.0;
    return (k % 4 == 0) ? 1.0 : -1.0;
}

} // namespace detail

// Onsager family W_l(x) = |sin(2 pi x / L)|^l. The tabulated transform is
// pinned at L = pi and scales as sqrt(L/pi); odd-k coefficients vanish and
// for even l the table terminates at k = l.
inline Potential onsager(int ell, double L = std::numbers::pi, int kmax = 512)
{
    if (ell < 1) throw std::invalid_argument("onsager: ell must be >= 1");
    Potential W;
    W.name = "onsager";
    W.L = L;
    W.d = 1;
    W.kmax = kmax;
    W.params = {{"ell", static_cast<double>(ell)}};
    W.coeffs.assign(kmax + 1, 0.0);
    const double root_scale = std::sqrt(L / std::numbers::pi);
    W.coeffs[0] = root_scale * detail::rgamma(0.5 * ell + 1.0) * std::tgamma(0.5 * (ell + 1));
    for (int k = 1; k <= kmax; ++k) {
        W.coeffs[k] = root_scale * std::sqrt(std::numbers::pi)
                      * std::pow(2.0, 0.5 - ell) * detail::cos_half_pi(k)
                      * std::tgamma(ell + 1.0)
                      * detail::rgamma(0.5 * (-k + ell + 2))
                      * detail::rgamma(0.5 * (k + ell + 2));
    }
    const double om = 2.0 * std::numbers::pi / L;
    W.closed_form = [ell, om](double x) {
        return std::pow(std::abs(std::sin(om * x)), ell);
    };
    W.grad_form = [ell, om](double x) {
        const double s = std::sin(om * x), c = std::cos(om * x);
        if (s == 0.0) return 0.0;
        return ell * std::pow(std::abs(s), ell - 1) * (s > 0 ? 1.0 : -1.0) * om * c;
    };
    W.lap_form = [ell, om](double x) {
        const double s = std::sin(om * x), c = std::cos(om * x);
        if (s == 0.0) return 0.0;
        const double sg = s > 0 ? 1.0 : -1.0;
        double t = ell * (ell - 1) * std::pow(std::abs(s), ell - 2) * om * om * c * c;
        t += ell * std::pow(std::abs(s), ell - 1) * sg * (-om * om) * s;
        return t;
    };
    W.kink_points = {0.0, 0.5 * L};
    return W;
}

// Barre-Degond-Zatorska dynamical-network kernel: W = (|x|-ell)^2 - (R-ell)^2
// on |x| < R, zero outside. Coefficients by adaptive quadrature.
inline Potential bdz(double ell, double R, double L, int kmax = 512)
{
    if (!(ell > 0.0) || ell > R || R > 0.5 * L)
        throw std::invalid_argument("bdz: need 0 < ell <= R <= L/2");
    Potential W;
    W.name = "bdz";
    W.L = L;
    W.d = 1;
    W.kmax = kmax;
    W.params = {{"ell", ell}, {"R", R}};
    W.coeffs.assign(kmax + 1, 0.0);
    auto w = [ell, R](double x) {
        const double a = std::abs(x);
        return a < R ? (a - ell) * (a - ell) - (R - ell) * (R - ell) : 0.0;
    };
    for (int k = 0; k <= kmax; ++k) {
        const double om = 2.0 * std::numbers::pi * k / L;
        const double nk = (k == 0) ? 1.0 / std::sqrt(L) : std::sqrt(2.0 / L);
        W.coeffs[k] = 2.0 * nk * integrate_adaptive([&](double x) { return w(x) * std::cos(om * x); },
                                                    0.0, R, 1e-12);
    }
    W.closed_form = w;
    W.grad_form = [ell, R](double x) {
        const double a = std::abs(x);
        if (a >= R) return 0.0;
        return 2.0 * (a - ell) * (x >= 0.0 ? 1.0 : -1.0);
    };
    W.lap_form = [R](double x) { return std::abs(x) < R ? 2.0 : 0.0; };
    W.kink_points = {0.0, R};
    return W;
}

// Keller-Segel chemotactic kernel: the fundamental solution of -(-Lap)^s,
// represented spectrally only. Singular at 0; the truncation at kmax is part
// of the model, not an approximation the rest of the artifact hides.
inline Potential keller_segel(double s, double L, int d, int kmax)
{
    if (!(s > 0.5) || s > 1.0) throw std::invalid_argument("keller_segel: need s in (1/2, 1]");
    if (d != 1 && d != 2) throw std::invalid_argument("keller_segel: d must be 1 or 2");
    Potential W;
    W.name = "keller_segel";
    W.L = L;
    W.d = d;
    W.kmax = kmax;
    W.params = {{"s", s}};
    W.coeffs.assign(d == 1 ? kmax + 1 : (kmax + 1) * (kmax + 1), 0.0);
    const double pref = -std::pow(2.0 * std::numbers::pi / L, 2.0 * s);
    W.for_each_mode([&](FourierIndex k) {
        if (k.is_zero(d)) return;
        const double nk = theta_factor(k, d) / std::pow(L, 0.5 * d);
        const double k2 = static_cast<double>(k.k1) * k.k1 + static_cast<double>(k.k2) * k.k2;
        W.coeffs[W.idx(k)] = pref * nk / std::pow(k2, s);
    });
    return W;
}

// ---------------------------------------------------------------------------
// H-stability split, alpha-stabilisation, norms

struct HStabilitySplit {
    Potential stable;    // (W~(k))_+ modes
    Potential unstable;  // (W~(k))_- modes
};

inline HStabilitySplit h_split(const Potential& W)
{
    HStabilitySplit out{W, W};
    out.stable.name = W.name + "_stable";
    out.unstable.name = W.name + "_unstable";
    out.stable.closed_form = out.unstable.closed_form = nullptr;
    out.stable.grad_form = out.unstable.grad_form = nullptr;
    out.stable.lap_form = out.unstable.lap_form = nullptr;
    for (size_t i = 0; i < W.coeffs.size(); ++i) {
        out.stable.coeffs[i] = std::max(W.coeffs[i], 0.0);
        out.unstable.coeffs[i] = std::min(W.coeffs[i], 0.0);
    }
    return out;
}

// Dominant negative mode k# = argmin over k != 0 of W~(k)/Theta(k).
// Returns the minimiser and whether it is unique at relative tolerance eps.
struct DominantMode {
    FourierIndex k;
    double normalised_value = 0.0; // W~(k#)/Theta(k#)
    int multiplicity = 1;
};

inline DominantMode dominant_mode(const Potential& W, double eps_deg = 1e-9)
{
    DominantMode dm;
    double best = 0.0;
    bool found = false;
    W.for_each_mode([&](FourierIndex k) {
        if (k.is_zero(W.d)) return;
        const double v = W.coeff(k) / theta_factor(k, W.d);
        if (!found || v < best) {
            best = v;
            dm.k = k;
            found = true;
        }
    });
    if (!found || best >= 0.0)
        throw std::domain_error("dominant_mode: potential has no negative mode");
    dm.normalised_value = best;
    dm.multiplicity = 0;
    const double tol = eps_deg * std::abs(best);
    W.for_each_mode([&](FourierIndex k) {
        if (k.is_zero(W.d)) return;
        if (std::abs(W.coeff(k) / theta_factor(k, W.d) - best) <= tol) ++dm.multiplicity;
    });
    return dm;
}

// W_alpha = <W,w_k#> w_k# + alpha (W_u - <W,w_k#> w_k#) + W_s: every negative
// mode except the dominant one is scaled by alpha; W_s and W~(k#) are kept.
inline Potential alpha_stabilise(const Potential& W, double alpha)
{
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha_stabilise: alpha in [0,1]");
    const DominantMode dm = dominant_mode(W);
    if (dm.multiplicity != 1)
        throw std::domain_error("alpha_stabilise: dominant negative mode is degenerate");
    Potential out = W;
    out.name = W.name + "_alpha";
    out.params["alpha"] = alpha;
    if (alpha != 1.0) {
        out.closed_form = nullptr;
        out.grad_form = nullptr;
        out.lap_form = nullptr;
    }
    out.for_each_mode([&](FourierIndex k) {
        const double v = W.coeff(k);
        if (v < 0.0 && !(k == dm.k)) out.coeff_ref(k) = alpha * v;
    });
    return out;
}

struct SupNorms {
    std::optional<double> grad_sup;    // ||grad W||_inf
    std::optional<double> lap_sup;     // ||Lap W||_inf (classical part)
    std::optional<double> lap_u_sup;   // ||Lap W_u||_inf over the carried band
    std::optional<double> wu_neg_sup;  // ||(W_u)_-||_inf over the carried band
    std::optional<double> l1;          // ||W||_1
};

namespace detail {

// series evaluation of a coefficient table at a point (d = 1)
inline double series_eval_1d(const Potential& W, double x,
                             const std::function<double(int)>& mode_scale)
{
    double s = 0.0;
    for (int k = 0; k <= W.kmax; ++k) {
        const double c = W.coeffs[k];
        if (c == 0.0) continue;
        const double nk = (k == 0 ? 1.0 : std::numbers::sqrt2) / std::sqrt(W.L);
        s += c * mode_scale(k) * nk * std::cos(2.0 * std::numbers::pi * k * x / W.L);
    }
    return s;
}

} // namespace detail

// Sup norms by dense sampling (4x-oversampled against the default grid, with
// kink points added); band-limited series reconstruction for the W_u parts.
// Keller-Segel carries no nodal form, so everything reports unavailable.
inline SupNorms sup_norms(const Potential& W, int samples = 16384)
{
    SupNorms out;
    if (W.d != 1 || (!W.closed_form && W.name == "keller_segel")) return out;

    std::vector<double> xs(samples);
    for (int i = 0; i < samples; ++i) xs[i] = -0.5 * W.L + i * (W.L / samples);
    for (double kp : W.kink_points) {
        xs.push_back(kp);
        xs.push_back(-kp);
        xs.push_back(std::nextafter(kp, W.L));
        xs.push_back(std::nextafter(kp, -W.L));
    }

    if (W.grad_form) {
        double g = 0.0;
        for (double x : xs) g = std::max(g, std::abs(W.grad_form(x)));
        out.grad_sup = g;
    }
    if (W.lap_form) {
        double l = 0.0;
        for (double x : xs) l = std::max(l, std::abs(W.lap_form(x)));
        out.lap_sup = l;
    }
    if (W.closed_form) {
        out.l1 = integrate_adaptive_split(
            [&](double x) { return std::abs(W.closed_form(x)); },
            -0.5 * W.L, 0.5 * W.L, W.kink_points, 1e-10);
    }

    const Potential Wu = h_split(W).unstable;
    double neg = 0.0, lap = 0.0;
    const double om = 2.0 * std::numbers::pi / W.L;
    for (int i = 0; i < samples; ++i) {
        const double x = xs[i];
        const double v = detail::series_eval_1d(Wu, x, [](int) { return 1.0; });
        neg = std::max(neg, std::max(0.0, -v));
        const double lv = detail::series_eval_1d(
            Wu, x, [om](int k) { return -om * om * static_cast<double>(k) * k; });
        lap = std::max(lap, std::abs(lv));
    }
    out.wu_neg_sup = neg;
    out.lap_u_sup = lap;
    return out;
}

// ---------------------------------------------------------------------------
// convolution and the interaction bilinear form

// (W * g)(y) = sum_{k in N^d} W~(k) N_k^{-1} sum_{distinct sign flips} g~(sk) w_{sk}(y):
// a pointwise multiply in signed coefficient space by W~(|m|)/N_|m|.
inline SpectralField convolve_spectral(const Potential& W, const SpectralField& g)
{
    if (!W.covers(g.grid))
        throw std::invalid_argument("convolve: potential table does not cover the grid band");
    SpectralField out(g.grid);
    out.for_each([&](FourierIndex m) {
        const FourierIndex a = m.abs();
        const double c = W.coeff(a);
        if (c == 0.0) return;
        out.at(m) = c / basis_normalisation(a, g.grid) * g.at(m);
    });
    return out;
}

inline NodalField convolve(const Potential& W, const NodalField& g)
{
    return inverse_transform(convolve_spectral(W, cosine_transform(g)));
}

// Iint W(x-y) g(x) h(y) dx dy via the spectral sum; symmetric in g, h.
inline double bilinear_form(const Potential& W, const NodalField& g, const NodalField& h)
{
    if (!W.covers(g.grid))
        throw std::invalid_argument("bilinear_form: potential table does not cover the grid band");
    const SpectralField gs = cosine_transform(g);
    const SpectralField hs = (&g == &h) ? gs : cosine_transform(h);
    double total = 0.0;
    gs.for_each([&](FourierIndex m) {
        const FourierIndex a = m.abs();
        const double c = W.coeff(a);
        if (c == 0.0) return;
        total += c / basis_normalisation(a, g.grid) * gs.at(m) * hs.at(m);
    });
    return total;
}

inline double bilinear_form(const Potential& W, const NodalField& g)
{
    return bilinear_form(W, g, g);
}

} // namespace mckv
