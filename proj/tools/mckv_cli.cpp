// Command-line front end: potential inspection, stationary solves,
// bifurcation diagrams, transition scans, PDE dynamics and particle runs,
// emitting CSV/JSON for plotting. Exit codes: 0 success, 2 config error,
// 3 numerical failure.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "mckv/bessel.hpp"
#include "mckv/io.hpp"

namespace fs = std::filesystem;
using namespace mckv;

namespace {

struct ExperimentConfig {
    std::string potential;
    double L = 0.0;      // 0: potential-specific default
    int d = 1;
    double beta = 1.0;
    int M = 0;           // 0: 256 for d=1, 64 for d=2
    int kmax = 0;        // 0: derived from M
    double kappa = 0.0;
    double kappa_min = 0.0;
    double kappa_max = 0.0;
    std::uint64_t seed = 1;
    std::string outdir = "out";
    // potential parameters
    int kmode = 0;
    double R = 0.0;
    double ell_bdz = 0.0;
    int ell = 0;
    double s_exp = 0.0;
    double amplitude = 0.0;
    bool rescaled = false;
    double alpha = -1.0;
    // solver
    double tol = 1e-10;
    double damping = 0.5;
    int max_iter = 5000;
    // branch
    double smax = 0.05;
    double ds = 0.005;
    // scan
    double bracket_rel_tol = 1e-3;
    double jump_threshold = 1e-2;
    // dynamics / particles
    double T = 1.0;
    double dt = 0.0;
    double snapshot_interval = 0.0;
    int N = 10000;
    int bins = 64;
    double burn_in = -1.0;
    int windows = 1;
    // stationary seeding
    double seed_amplitude = 0.2;
    int seed_mode = 0;
};

const std::map<std::string, int> known_keys = {
    {"potential", 0}, {"L", 0}, {"d", 0}, {"beta", 0}, {"M", 0}, {"kmax", 0},
    {"kappa", 0}, {"kappa_min", 0}, {"kappa_max", 0}, {"seed", 0}, {"outdir", 0},
    {"kmode", 0}, {"R", 0}, {"ell_bdz", 0}, {"ell", 0}, {"s", 0}, {"amplitude", 0},
    {"rescaled", 0}, {"alpha", 0}, {"tol", 0}, {"damping", 0}, {"max_iter", 0},
    {"smax", 0}, {"ds", 0}, {"bracket_rel_tol", 0}, {"jump_threshold", 0},
    {"T", 0}, {"dt", 0}, {"snapshot_interval", 0}, {"N", 0}, {"bins", 0},
    {"burn_in", 0}, {"windows", 0}, {"seed_amplitude", 0}, {"seed_mode", 0}};

void load_config_file(const std::string& path, ExperimentConfig& c)
{
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open config file: " + path);
    json j = json::parse(f);
    for (auto& [key, val] : j.items()) {
        if (!known_keys.count(key)) throw std::invalid_argument("unknown config key: " + key);
        if (key == "potential") c.potential = val.get<std::string>();
        else if (key == "L") c.L = val.get<double>();
        else if (key == "d") c.d = val.get<int>();
        else if (key == "beta") c.beta = val.get<double>();
        else if (key == "M") c.M = val.get<int>();
        else if (key == "kmax") c.kmax = val.get<int>();
        else if (key == "kappa") c.kappa = val.get<double>();
        else if (key == "kappa_min") c.kappa_min = val.get<double>();
        else if (key == "kappa_max") c.kappa_max = val.get<double>();
        else if (key == "seed") c.seed = val.get<std::uint64_t>();
        else if (key == "outdir") c.outdir = val.get<std::string>();
        else if (key == "kmode") c.kmode = val.get<int>();
        else if (key == "R") c.R = val.get<double>();
        else if (key == "ell_bdz") c.ell_bdz = val.get<double>();
        else if (key == "ell") c.ell = val.get<int>();
        else if (key == "s") c.s_exp = val.get<double>();
        else if (key == "amplitude") c.amplitude = val.get<double>();
        else if (key == "rescaled") c.rescaled = val.get<bool>();
        else if (key == "alpha") c.alpha = val.get<double>();
        else if (key == "tol") c.tol = val.get<double>();
        else if (key == "damping") c.damping = val.get<double>();
        else if (key == "max_iter") c.max_iter = val.get<int>();
        else if (key == "smax") c.smax = val.get<double>();
        else if (key == "ds") c.ds = val.get<double>();
        else if (key == "bracket_rel_tol") c.bracket_rel_tol = val.get<double>();
        else if (key == "jump_threshold") c.jump_threshold = val.get<double>();
        else if (key == "T") c.T = val.get<double>();
        else if (key == "dt") c.dt = val.get<double>();
        else if (key == "snapshot_interval") c.snapshot_interval = val.get<double>();
        else if (key == "N") c.N = val.get<int>();
        else if (key == "bins") c.bins = val.get<int>();
        else if (key == "burn_in") c.burn_in = val.get<double>();
        else if (key == "windows") c.windows = val.get<int>();
        else if (key == "seed_amplitude") c.seed_amplitude = val.get<double>();
        else if (key == "seed_mode") c.seed_mode = val.get<int>();
    }
}

int default_M(const ExperimentConfig& c) { return c.d == 1 ? 256 : 64; }

Potential build_potential(ExperimentConfig& c)
{
    if (c.M == 0) c.M = default_M(c);
    const int band = c.M / 2 - 1;
    if (c.kmax == 0) c.kmax = std::max(band, 64);

    if (c.potential == "kuramoto") {
        if (c.kmode <= 0) throw std::invalid_argument("kuramoto requires --kmode >= 1");
        if (c.L == 0.0) c.L = 2.0 * std::numbers::pi;
        return kuramoto(c.kmode, c.L, c.kmax);
    }
    if (c.potential == "single_mode") {
        if (c.kmode <= 0) throw std::invalid_argument("single_mode requires --kmode >= 1");
        if (c.amplitude == 0.0) throw std::invalid_argument("single_mode requires --amplitude != 0");
        if (c.L == 0.0) c.L = 2.0 * std::numbers::pi;
        Potential W = kuramoto(c.kmode, c.L, c.kmax);
        W.name = "single_mode";
        W.coeffs[c.kmode] = c.amplitude;
        W.params["amplitude"] = c.amplitude;
        const double n = std::sqrt(2.0 / c.L), om = 2.0 * std::numbers::pi * c.kmode / c.L;
        const double a = c.amplitude;
        W.closed_form = [n, om, a](double x) { return a * n * std::cos(om * x); };
        W.grad_form = [n, om, a](double x) { return -a * n * om * std::sin(om * x); };
        W.lap_form = [n, om, a](double x) { return -a * n * om * om * std::cos(om * x); };
        return W;
    }
    if (c.potential == "hegselmann_krause") {
        if (c.R <= 0.0) throw std::invalid_argument("hegselmann_krause requires --R > 0");
        if (c.L == 0.0) c.L = 1.0;
        return hegselmann_krause(c.R, c.L, c.rescaled, c.kmax);
    }
    if (c.potential == "onsager") {
        if (c.ell <= 0) throw std::invalid_argument("onsager requires --ell >= 1");
        if (c.L == 0.0) c.L = std::numbers::pi;
        return onsager(c.ell, c.L, c.kmax);
    }
    if (c.potential == "bdz") {
        if (c.ell_bdz <= 0.0 || c.R <= 0.0)
            throw std::invalid_argument("bdz requires --ell-bdz > 0 and --R > 0");
        if (c.L == 0.0) c.L = 1.0;
        return bdz(c.ell_bdz, c.R, c.L, c.kmax);
    }
    if (c.potential == "keller_segel") {
        if (c.s_exp == 0.0) throw std::invalid_argument("keller_segel requires --s in (1/2, 1]");
        if (c.L == 0.0) c.L = 2.0 * std::numbers::pi;
        return keller_segel(c.s_exp, c.L, c.d, c.kmax);
    }
    throw std::invalid_argument("unknown potential: " + (c.potential.empty() ? "(none)" : c.potential));
}

Potential maybe_stabilise(const ExperimentConfig& c, Potential W)
{
    if (c.alpha >= 0.0) return alpha_stabilise(W, c.alpha);
    return W;
}

void ensure_outdir(const ExperimentConfig& c) { fs::create_directories(c.outdir); }

std::string opath(const ExperimentConfig& c, const std::string& name)
{
    return (fs::path(c.outdir) / name).string();
}

json sup_norms_json(const SupNorms& n)
{
    auto put = [](const std::optional<double>& v) {
        return v ? json(*v) : json("unavailable");
    };
    return json{{"grad_sup", put(n.grad_sup)},
                {"lap_sup", put(n.lap_sup)},
                {"lap_u_sup", put(n.lap_u_sup)},
                {"wu_neg_sup", put(n.wu_neg_sup)},
                {"l1", put(n.l1)}};
}

int cmd_potential(ExperimentConfig c)
{
    Potential W = maybe_stabilise(c, build_potential(c));
    ensure_outdir(c);
    save_text(opath(c, "potential.json"), to_json(W).dump(2) + "\n");

    json a;
    a["name"] = W.name;
    a["h_stable"] = W.is_h_stable();
    const HStabilitySplit split = h_split(W);
    int negatives = 0, positives = 0;
    W.for_each_mode([&](FourierIndex k) {
        if (split.unstable.coeff(k) < 0.0) ++negatives;
        if (split.stable.coeff(k) > 0.0) ++positives;
    });
    a["negative_modes"] = negatives;
    a["positive_modes"] = positives;
    a["sup_norms"] = sup_norms_json(sup_norms(W));
    const auto kc = kappa_con(W, c.beta);
    a["kappa_con"] = kc ? (std::isfinite(*kc) ? json(*kc) : json("inf")) : json("unavailable");
    SpectrumReport srep = spectrum(W, 0.0, c.beta);
    if (std::isfinite(srep.kappa_sharp)) {
        a["kappa_sharp"] = srep.kappa_sharp;
        json ks = json::array({srep.k_sharp.k1});
        if (W.d == 2) ks.push_back(srep.k_sharp.k2);
        a["k_sharp"] = ks;
        a["k_sharp_unique"] = srep.k_sharp_unique;
    } else {
        a["kappa_sharp"] = "inf";
    }
    a["bifurcation_points"] = to_json(enumerate_bifurcations(W, c.beta, std::min(W.kmax, 64)));
    save_text(opath(c, "potential_analysis.json"), a.dump(2) + "\n");
    std::cout << "wrote " << opath(c, "potential.json") << " and potential_analysis.json\n";
    return 0;
}

int cmd_stationary(ExperimentConfig c)
{
    Potential W = maybe_stabilise(c, build_potential(c));
    if (c.kappa <= 0.0) throw std::invalid_argument("stationary requires --kappa > 0");
    TorusGrid g(c.d, c.L, c.M);
    if (!W.covers(g)) throw std::invalid_argument("potential table does not cover the grid");
    SolveConfig scfg;
    scfg.tol = c.tol;
    scfg.damping = c.damping;
    scfg.max_iter = c.max_iter;

    std::vector<StationaryState> states;
    states.push_back(solve_stationary(uniform_state(g), W, c.kappa, c.beta, scfg));
    if (!W.is_h_stable()) {
        const int mode = c.seed_mode > 0 ? c.seed_mode : dominant_mode(W).k.k1;
        for (auto& seed : deflated_branch_seeds(g, {{mode, 0}}, {c.seed_amplitude}))
            states.push_back(solve_stationary(seed, W, c.kappa, c.beta, scfg));
        for (auto& seed : clustered_seeds(g))
            states.push_back(solve_stationary(seed, W, c.kappa, c.beta, scfg));
    }
    bool any = false;
    for (auto& st : states) any = any || st.converged;
    if (!any) {
        std::cerr << "no seed converged\n";
        return 3;
    }
    auto sel = select_minimiser(states);
    ensure_outdir(c);
    json j = to_json(*sel.state);
    j["degenerate_tie"] = sel.degenerate_tie;
    save_text(opath(c, "state.json"), j.dump(2) + "\n");
    std::ostringstream os;
    write_profile_csv(os, sel.state->rho);
    save_text(opath(c, "profile.csv"), os.str());
    std::cout << "kappa=" << full_precision(sel.state->kappa)
              << " F=" << full_precision(sel.state->report.F)
              << " residual=" << full_precision(sel.state->residual) << "\n";
    return 0;
}

int cmd_bifurcate(ExperimentConfig c)
{
    Potential W = maybe_stabilise(c, build_potential(c));
    if (c.kappa_min != 0.0 || c.kappa_max != 0.0) {
        if (!(c.kappa_max > c.kappa_min))
            throw std::invalid_argument("empty kappa range");
    }
    TorusGrid g(c.d, c.L, c.M);
    if (g.d != 1) throw std::invalid_argument("bifurcate: branch continuation is 1D");
    auto pts = enumerate_bifurcations(W, c.beta, std::min(W.kmax, g.band()));
    ensure_outdir(c);

    json summary = json::array();
    int branch_idx = 0;
    for (const auto& p : pts) {
        json e;
        e["k"] = p.k.k1;
        e["kappa"] = p.kappa;
        e["multiplicity"] = p.multiplicity;
        e["simple"] = p.simple;
        if ((c.kappa_min != 0.0 || c.kappa_max != 0.0)
            && (p.kappa < c.kappa_min || p.kappa > c.kappa_max)) {
            e["status"] = "outside-range";
            summary.push_back(e);
            continue;
        }
        if (!p.simple) {
            e["status"] = p.odd_multiplicity ? "enumerated-only (odd multiplicity)"
                                             : "enumerated-only";
            summary.push_back(e);
            continue;
        }
        Branch br = continue_branch(p, W, c.beta, g, c.smax, c.ds);
        const std::string fname = "branch_k" + std::to_string(p.k.k1) + ".csv";
        std::ostringstream os;
        write_branch_csv(os, br);
        save_text(opath(c, fname), os.str());
        e["status"] = br.truncated ? "truncated" : "continued";
        e["file"] = fname;
        e["curvature_fit"] = br.curvature_fit;
        e["points"] = br.points.size();
        summary.push_back(e);
        ++branch_idx;

        // pure single-mode kernels also get the scalar order-parameter curve
        if (detail::pure_mode_kernel(W).pure && p.k.k1 == dominant_mode(W).k.k1) {
            std::vector<std::array<double, 3>> rows;
            for (const auto& bp : br.points) {
                if (bp.s <= 0.0) continue;
                const double a = c.beta * bp.kappa * bp.s;
                const double l1 = integrate_adaptive(
                    [&](double x) {
                        return std::abs(kuramoto_closed_form(x, a, p.k.k1, W.L)
                                        - 1.0 / W.L);
                    },
                    -0.5 * W.L, 0.5 * W.L, 1e-10);
                rows.push_back({bp.kappa, a, l1});
            }
            std::ostringstream oo;
            write_order_parameter_csv(oo, rows);
            save_text(opath(c, "order_parameter.csv"), oo.str());
        }
    }
    save_text(opath(c, "bifurcation_summary.json"), summary.dump(2) + "\n");
    std::cout << "continued " << branch_idx << " branch(es), "
              << pts.size() << " bifurcation point(s)\n";
    return 0;
}

int cmd_transition(ExperimentConfig c)
{
    Potential W = maybe_stabilise(c, build_potential(c));
    TorusGrid g(c.d, c.L, c.M);
    if (g.d != 1) throw std::invalid_argument("transition: scan is 1D");
    ScanConfig scfg;
    scfg.kappa_min = c.kappa_min;
    scfg.kappa_max = c.kappa_max;
    scfg.bracket_rel_tol = c.bracket_rel_tol;
    scfg.jump_threshold = c.jump_threshold;
    scfg.solver.tol = c.tol;
    scfg.solver.damping = c.damping;
    scfg.solver.max_iter = c.max_iter;
    TransitionReport rep = scan_transition(W, c.beta, g, scfg);
    ensure_outdir(c);
    save_text(opath(c, "transition.json"), to_json(rep).dump(2) + "\n");
    std::ostringstream os;
    write_scan_csv(os, rep);
    save_text(opath(c, "scan.csv"), os.str());
    if (!rep.has_transition && W.is_h_stable())
        std::cout << "no transition (H-stable potential)\n";
    else
        std::cout << "kappa_c=" << full_precision(rep.kappa_c)
                  << " classification=" << to_string(rep.classification) << "\n";
    return 0;
}

int cmd_dynamics(ExperimentConfig c)
{
    Potential W = maybe_stabilise(c, build_potential(c));
    if (c.kappa <= 0.0) throw std::invalid_argument("dynamics requires --kappa > 0");
    TorusGrid g(c.d, c.L, c.M);
    DensityField rho0 = uniform_state(g);
    const double u = uniform_value(g);
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int k = 1; k <= 3 && k <= g.band(); ++k) {
        const double amp = 0.1 * uni(rng) / k;
        const NodalField wk = basis_eval({k, 0}, g);
        for (size_t i = 0; i < rho0.size(); ++i)
            rho0[i] = std::max(1e-10 * u, rho0[i] + amp * u * std::sqrt(g.L) * wk[i]);
    }
    rho0.normalise();
    EvolveConfig ecfg;
    ecfg.dt = c.dt;
    ecfg.snapshot_interval = c.snapshot_interval > 0.0 ? c.snapshot_interval : c.T / 100.0;
    Trajectory tr = evolve(rho0, W, c.kappa, c.beta, c.T, ecfg);
    ensure_outdir(c);
    std::ostringstream os;
    write_trajectory_csv(os, tr);
    save_text(opath(c, "trajectory.csv"), os.str());
    std::ostringstream op;
    write_profile_csv(op, tr.final_state);
    save_text(opath(c, "final_state.csv"), op.str());

    DecayReport rep = decay_report(tr, W, c.kappa, c.beta);
    json dj;
    dj["in_hypothesis"] = rep.in_hypothesis;
    dj["l2_condition"] = rep.l2_condition;
    dj["entropy_condition"] = rep.entropy_condition;
    dj["theoretical_rate"] = rep.theoretical_rate;
    dj["fitted_rate"] = rep.fitted_rate;
    dj["rate_ok"] = rep.rate_ok;
    dj["status"] = rep.in_hypothesis ? "subcritical" : "out-of-hypothesis";
    save_text(opath(c, "decay.json"), dj.dump(2) + "\n");

    if (tr.aborted) {
        std::cerr << "time step unstable after max halvings; partial trajectory written\n";
        return 3;
    }
    std::cout << "t=" << full_precision(tr.time_reached)
              << (tr.steady_state ? " (steady state reached)" : "") << "\n";
    return 0;
}

int cmd_particles(ExperimentConfig c)
{
    Potential W = maybe_stabilise(c, build_potential(c));
    if (c.kappa <= 0.0) throw std::invalid_argument("particles requires --kappa > 0");
    if (W.d != 1) throw std::invalid_argument("particles: 1D kernels only");
    detail::PureModeKernel pk = detail::pure_mode_kernel(W);
    if (!pk.pure && !W.grad_form)
        throw std::invalid_argument("potential has no nodal gradient (spectral-only kernel)");
    if (c.M == 0) c.M = default_M(c);
    ParticleEnsemble e = init_particles(c.N, W.L, c.kappa, c.beta, c.seed);
    std::mt19937_64 rng(c.seed + 1);
    const double dt = c.dt > 0.0 ? c.dt : 0.02;
    ensure_outdir(c);
    if (c.windows > 1) {
        const double burn = c.burn_in >= 0.0 ? c.burn_in : 0.5 * c.T;
        const double wdt = (c.T - burn) / c.windows;
        auto pool = pooled_positions(e, W, burn, c.windows, wdt, dt, rng);
        ParticleEnsemble pooled = e;
        pooled.N = static_cast<int>(pool.size());
        pooled.positions = std::move(pool);
        DensityField h = empirical_density(pooled, c.bins, c.M);
        std::ostringstream oh;
        write_profile_csv(oh, h);
        save_text(opath(c, "histogram.csv"), oh.str());
    } else {
        simulate_particles(e, W, c.T, dt, rng);
        DensityField h = empirical_density(e, c.bins, c.M);
        std::ostringstream oh;
        write_profile_csv(oh, h);
        save_text(opath(c, "histogram.csv"), oh.str());
    }
    std::ostringstream os;
    write_particles_csv(os, e);
    save_text(opath(c, "particles.csv"), os.str());
    std::cout << "N=" << e.N << " t=" << full_precision(e.t) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"numerical laboratory for mean-field dynamics on the torus"};
    app.require_subcommand(1);

    ExperimentConfig c;
    std::string config_path;

    auto add_common = [&](CLI::App* s) {
        s->add_option("--config", config_path, "JSON config file (flags override)");
        s->add_option("--name", c.potential, "potential name");
        s->add_option("--L", c.L, "torus side length");
        s->add_option("--d", c.d, "dimension (1 or 2)");
        s->add_option("--beta", c.beta, "inverse temperature");
        s->add_option("--M", c.M, "grid points per axis (power of two)");
        s->add_option("--kmax", c.kmax, "coefficient band of the potential");
        s->add_option("--kappa", c.kappa, "interaction strength");
        s->add_option("--kappa-min", c.kappa_min, "scan range lower end");
        s->add_option("--kappa-max", c.kappa_max, "scan range upper end");
        s->add_option("--seed", c.seed, "rng seed");
        s->add_option("--outdir", c.outdir, "output directory");
        s->add_option("--kmode", c.kmode, "mode index (kuramoto/single_mode)");
        s->add_option("--R", c.R, "interaction radius (hegselmann_krause, bdz)");
        s->add_option("--ell-bdz", c.ell_bdz, "spring rest length (bdz)");
        s->add_option("--ell", c.ell, "exponent (onsager)");
        s->add_option("--s", c.s_exp, "fractional exponent (keller_segel)");
        s->add_option("--amplitude", c.amplitude, "mode amplitude (single_mode)");
        s->add_flag("--rescaled", c.rescaled, "rescaled hegselmann_krause");
        s->add_option("--alpha", c.alpha, "alpha-stabilise the potential");
        s->add_option("--tol", c.tol, "solver residual tolerance");
        s->add_option("--damping", c.damping, "fixed-point damping");
        s->add_option("--max-iter", c.max_iter, "solver iteration cap");
        s->add_option("--smax", c.smax, "branch amplitude range");
        s->add_option("--ds", c.ds, "branch amplitude step");
        s->add_option("--bracket-rel-tol", c.bracket_rel_tol, "bisection bracket / kappa#");
        s->add_option("--jump-threshold", c.jump_threshold, "L1 jump classification threshold");
        s->add_option("--T", c.T, "time horizon");
        s->add_option("--dt", c.dt, "time step (0: stability default)");
        s->add_option("--snapshot-interval", c.snapshot_interval, "diagnostic interval");
        s->add_option("--N", c.N, "particle count");
        s->add_option("--bins", c.bins, "histogram bins");
        s->add_option("--burn-in", c.burn_in, "particle burn-in time");
        s->add_option("--windows", c.windows, "histogram pooling windows");
        s->add_option("--seed-amplitude", c.seed_amplitude, "stationary seed amplitude");
        s->add_option("--seed-mode", c.seed_mode, "stationary seed mode (0: dominant)");
    };

    CLI::App* sp = app.add_subcommand("potential", "coefficient table, norms, bifurcation points");
    CLI::App* ss = app.add_subcommand("stationary", "self-consistent stationary solve");
    CLI::App* sb = app.add_subcommand("bifurcate", "continue branches from the uniform state");
    CLI::App* st = app.add_subcommand("transition", "kappa-scan and classification");
    CLI::App* sd = app.add_subcommand("dynamics", "PDE evolution with diagnostics");
    CLI::App* sg = app.add_subcommand("particles", "interacting-particle simulation");
    for (CLI::App* s : {sp, ss, sb, st, sd, sg}) add_common(s);

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) {
            ExperimentConfig file_cfg;
            load_config_file(config_path, file_cfg);
            // flags override file values: re-parse flags on top of the file config
            ExperimentConfig merged = file_cfg;
            // CLI11 already wrote flag values into c; merge: file first, then
            // any flag the user passed (tracked via count) wins
            CLI::App* sub = app.get_subcommands().front();
            auto take = [&](const std::string& flag, auto member) {
                if (sub->count(flag) > 0) merged.*member = c.*member;
            };
            take("--name", &ExperimentConfig::potential);
            take("--L", &ExperimentConfig::L);
            take("--d", &ExperimentConfig::d);
            take("--beta", &ExperimentConfig::beta);
            take("--M", &ExperimentConfig::M);
            take("--kmax", &ExperimentConfig::kmax);
            take("--kappa", &ExperimentConfig::kappa);
            take("--kappa-min", &ExperimentConfig::kappa_min);
            take("--kappa-max", &ExperimentConfig::kappa_max);
            take("--seed", &ExperimentConfig::seed);
            take("--outdir", &ExperimentConfig::outdir);
            take("--kmode", &ExperimentConfig::kmode);
            take("--R", &ExperimentConfig::R);
            take("--ell-bdz", &ExperimentConfig::ell_bdz);
            take("--ell", &ExperimentConfig::ell);
            take("--s", &ExperimentConfig::s_exp);
            take("--amplitude", &ExperimentConfig::amplitude);
            take("--rescaled", &ExperimentConfig::rescaled);
            take("--alpha", &ExperimentConfig::alpha);
            take("--tol", &ExperimentConfig::tol);
            take("--damping", &ExperimentConfig::damping);
            take("--max-iter", &ExperimentConfig::max_iter);
            take("--smax", &ExperimentConfig::smax);
            take("--ds", &ExperimentConfig::ds);
            take("--bracket-rel-tol", &ExperimentConfig::bracket_rel_tol);
            take("--jump-threshold", &ExperimentConfig::jump_threshold);
            take("--T", &ExperimentConfig::T);
            take("--dt", &ExperimentConfig::dt);
            take("--snapshot-interval", &ExperimentConfig::snapshot_interval);
            take("--N", &ExperimentConfig::N);
            take("--bins", &ExperimentConfig::bins);
            take("--burn-in", &ExperimentConfig::burn_in);
            take("--windows", &ExperimentConfig::windows);
            take("--seed-amplitude", &ExperimentConfig::seed_amplitude);
            take("--seed-mode", &ExperimentConfig::seed_mode);
            c = merged;
        }

        if (sp->parsed()) return cmd_potential(c);
        if (ss->parsed()) return cmd_stationary(c);
        if (sb->parsed()) return cmd_bifurcate(c);
        if (st->parsed()) return cmd_transition(c);
        if (sd->parsed()) return cmd_dynamics(c);
        if (sg->parsed()) return cmd_particles(c);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
