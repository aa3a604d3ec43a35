#include <doctest.h>

#include "mckv/bessel.hpp"
#include "mckv/stationary.hpp"
#include "test_oracles.hpp"

using namespace mckv;

TEST_CASE("gibbs map basics")
{
    std::mt19937_64 rng(3);
    TorusGrid g(1, 2.0 * std::numbers::pi, 128);
    Potential W = kuramoto(1, g.L, g.band());
    DensityField u = uniform_state(g);

    // uniform state is a fixed point for every kappa
    for (double kap : {0.1, 1.0, 10.0}) {
        DensityField t = gibbs_map(u, W, kap, 1.0);
        NodalField d = t - u;
        CHECK(d.sup_norm() < 1e-13);
    }

    // output is strictly positive with unit mass for any input density
    for (int t = 0; t < 50; ++t) {
        DensityField rho = oracle::random_density(g, rng);
        DensityField out = gibbs_map(rho, W, 3.0, 1.2);
        CHECK(out.min_value() > 0.0);
        CHECK(out.integral() == doctest::Approx(1.0).epsilon(1e-13));
    }

    // translation equivariance for whole-cell shifts
    DensityField rho = oracle::random_density(g, rng);
    const int s = g.M / 4;
    DensityField shifted(g);
    shifted.values = translate_cells(rho, s).values;
    NodalField a = translate_cells(gibbs_map(rho, W, 2.0, 1.0), s);
    NodalField b = gibbs_map(shifted, W, 2.0, 1.0);
    for (size_t i = 0; i < a.size(); ++i)
        CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));

    // sup bound e^{beta kappa (||W_-||_inf + ||W||_1)}
    const SupNorms n = sup_norms(W);
    const double bound = std::exp(2.0 * (*n.wu_neg_sup + *n.l1));
    for (int t = 0; t < 10; ++t) {
        DensityField out = gibbs_map(oracle::random_density(g, rng), W, 2.0, 1.0);
        CHECK(out.max_value() <= bound);
    }
}

TEST_CASE("gibbs map handles large exponents")
{
    TorusGrid g(1, 2.0 * std::numbers::pi, 64);
    Potential W = kuramoto(1, g.L, g.band());
    DensityField u = uniform_state(g);
    NodalField w1 = basis_eval({1, 0}, g);
    DensityField rho = u;
    for (size_t i = 0; i < rho.size(); ++i)
        rho[i] = uniform_value(g) * (1.0 + 0.9 * std::sqrt(g.L) * w1[i] / w1.sup_norm() / std::sqrt(g.L));
    rho.normalise();
    DensityField out = gibbs_map(rho, W, 2000.0, 1.0); // would overflow unshifted
    CHECK(std::isfinite(out.max_value()));
    CHECK(out.integral() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("kuramoto closed form is a fixed point at the self-consistent amplitude")
{
    TorusGrid g(1, 2.0 * std::numbers::pi, 256);
    Potential W = kuramoto(1, g.L, g.band());
    const double beta = 1.0;
    const double ks = std::sqrt(2.0 * g.L) / beta;
    const double kappa = 1.5 * ks;
    BesselState bs = solve_order_parameter(kappa, beta, g.L);
    REQUIRE(!bs.trivial_only);
    DensityField rho(g);
    for (int i = 0; i < g.M; ++i)
        rho[i] = kuramoto_closed_form(g.node(i), bs.a, 1, g.L);
    rho.normalise();
    DensityField t = gibbs_map(rho, W, kappa, beta);
    NodalField d = t - rho;
    CHECK(d.l2_norm() < 1e-10);
}

TEST_CASE("solver: subcritical converges to uniform from random seeds")
{
    std::mt19937_64 rng(5);
    TorusGrid g(1, 2.0 * std::numbers::pi, 128);
    Potential W = kuramoto(1, g.L, g.band());
    const double kappa = 0.8 * std::sqrt(std::numbers::pi); // below kappa_con
    SolveConfig cfg;
    DensityField u = uniform_state(g);
    for (int t = 0; t < 50; ++t) {
        StationaryState st = solve_stationary(oracle::random_density(g, rng), W, kappa, 1.0, cfg);
        CHECK(st.converged);
        CHECK(st.residual < 1e-10);
        NodalField d = st.rho - u;
        CHECK(d.l2_norm() < 1e-8);
    }
}

TEST_CASE("solver: supercritical cluster state matches the Bessel solution")
{
    TorusGrid g(1, 2.0 * std::numbers::pi, 256);
    Potential W = kuramoto(1, g.L, g.band());
    const double beta = 1.0;
    const double ks = std::sqrt(2.0 * g.L) / beta;

    SolveConfig tight;
    tight.tol = 1e-12; // sup-norm EL residual scales like tol / min(rho)
    for (double factor : {1.1, 1.5, 2.0}) {
        const double kappa = factor * ks;
        auto seeds = deflated_branch_seeds(g, {{1, 0}}, {0.2});
        StationaryState st = solve_stationary(seeds[0], W, kappa, beta, tight);
        REQUIRE(st.converged);
        CHECK(st.rho.min_value() > 0.0);
        CHECK(st.mode_profile.at({1, 0}) > 0.0);

        BesselState bs = solve_order_parameter(kappa, beta, g.L);
        CHECK(std::abs(beta * kappa * st.mode_profile.at({1, 0}) - bs.a) < 1e-8);

        DensityField closed(g);
        for (int i = 0; i < g.M; ++i)
            closed[i] = kuramoto_closed_form(g.node(i), bs.a, 1, g.L);
        closed.normalise();
        CHECK(aligned_l2_distance(st.rho, closed) < 1e-6);

        // all characterisations hold at once
        CHECK(st.report.EL_residual < 1e-8);
        CHECK(st.report.J < 1e-8);
    }

    // re-solving from a converged state verifies instantly
    const double kappa = 1.5 * ks;
    auto seeds = deflated_branch_seeds(g, {{1, 0}}, {0.2});
    StationaryState st = solve_stationary(seeds[0], W, kappa, beta);
    StationaryState st2 = solve_stationary(st.rho, W, kappa, beta);
    CHECK(st2.converged);
    CHECK(st2.iterations == 0);
}

TEST_CASE("deflated seeds: signs give mutual translates; bad amplitude throws")
{
    TorusGrid g(1, 2.0 * std::numbers::pi, 128);
    Potential W = kuramoto(1, g.L, g.band());
    const double kappa = 1.5 * std::sqrt(2.0 * g.L);
    auto seeds = deflated_branch_seeds(g, {{1, 0}}, {0.2, -0.2});
    StationaryState a = solve_stationary(seeds[0], W, kappa, 1.0);
    StationaryState b = solve_stationary(seeds[1], W, kappa, 1.0);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK(a.mode_profile.at({1, 0}) > 0.0);
    CHECK(b.mode_profile.at({1, 0}) < 0.0);
    CHECK(aligned_l2_distance(a.rho, b.rho) < 1e-9);

    CHECK_THROWS_AS(deflated_branch_seeds(g, {{1, 0}}, {1.1}), std::invalid_argument);

    // eps = 0 is the trivial seed
    auto triv = deflated_branch_seeds(g, {{1, 0}}, {0.0});
    NodalField d = triv[0] - uniform_state(g);
    CHECK(d.sup_norm() == 0.0);
}

TEST_CASE("non-convergence is reported, not thrown")
{
    TorusGrid g(1, 2.0 * std::numbers::pi, 64);
    Potential W = kuramoto(1, g.L, g.band());
    SolveConfig cfg;
    cfg.max_iter = 2;
    cfg.anderson_depth = 0;
    auto seeds = deflated_branch_seeds(g, {{1, 0}}, {0.3});
    StationaryState st = solve_stationary(seeds[0], W, 1.5 * std::sqrt(2.0 * g.L), 1.0, cfg);
    CHECK(!st.converged);
    CHECK(st.residual > 0.0);
    CHECK(st.residual_history.size() >= 2);
}

TEST_CASE("select_minimiser picks the cluster above the transition")
{
    TorusGrid g(1, 2.0 * std::numbers::pi, 128);
    Potential W = kuramoto(1, g.L, g.band());
    const double kappa = 1.5 * std::sqrt(2.0 * g.L);
    std::vector<StationaryState> states;
    states.push_back(solve_stationary(uniform_state(g), W, kappa, 1.0));
    auto seeds = deflated_branch_seeds(g, {{1, 0}}, {0.2});
    states.push_back(solve_stationary(seeds[0], W, kappa, 1.0));
    auto sel = select_minimiser(states);
    CHECK(sel.state == &states[1]);
    CHECK(!sel.degenerate_tie);

    // single state
    std::vector<StationaryState> one;
    one.push_back(solve_stationary(uniform_state(g), W, kappa, 1.0));
    CHECK(select_minimiser(one).state == &one[0]);

    // translates tie within tolerance
    std::vector<StationaryState> pair;
    pair.push_back(solve_stationary(seeds[0], W, kappa, 1.0));
    pair.push_back(pair[0]);
    pair[1].rho.values = translate_cells(pair[1].rho, g.M / 2).values;
    pair[1].report = functional_report(pair[1].rho, W, kappa, 1.0);
    CHECK(select_minimiser(pair).degenerate_tie);

    CHECK_THROWS_AS(select_minimiser({}), std::invalid_argument);
}

TEST_CASE("phase alignment zeroes the dominant sin component")
{
    TorusGrid g(1, 2.0 * std::numbers::pi, 128);
    Potential W = kuramoto(1, g.L, g.band());
    const double kappa = 1.5 * std::sqrt(2.0 * g.L);
    auto seeds = deflated_branch_seeds(g, {{1, 0}}, {0.2});
    StationaryState st = solve_stationary(seeds[0], W, kappa, 1.0);
    DensityField shifted(g);
    shifted.values = translate_cells(st.rho, 13).values;
    DensityField aligned = align_phase(shifted, 1);
    SpectralField s = cosine_transform(aligned);
    CHECK(std::abs(s.at({-1, 0})) < 1e-10);
    CHECK(s.at({1, 0}) > 0.0);
    NodalField d = aligned - st.rho;
    CHECK(d.l2_norm() < 1e-9);
}
