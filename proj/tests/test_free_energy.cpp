#include <doctest.h>

#include "mckv/entropy_defect.hpp"
#include "test_oracles.hpp"

using namespace mckv;

TEST_CASE("free energy of the uniform state")
{
    TorusGrid g(1, 2.0 * std::numbers::pi, 128);
    Potential W = kuramoto(1, g.L, g.band());
    DensityField u = uniform_state(g);
    const double f = free_energy(u, W, 1.7, 1.0);
    CHECK(f == doctest::Approx(std::log(1.0 / (2.0 * std::numbers::pi))).epsilon(1e-12));
    // mean-zero interaction: value is kappa-independent at the uniform state
    CHECK(free_energy(u, W, 0.3, 1.0) == doctest::Approx(f).epsilon(1e-14));

    // nonpositive nodal value -> +inf sentinel
    DensityField bad = u;
    bad[0] = -1e-3;
    CHECK(std::isinf(free_energy(bad, W, 1.0, 1.0)));
}

TEST_CASE("free-energy gap identity on random densities")
{
    std::mt19937_64 rng(7);
    TorusGrid g(1, 2.0 * std::numbers::pi, 128);
    std::vector<Potential> cats = {kuramoto(1, g.L, g.band()),
                                   hegselmann_krause(2.0, g.L, false, g.band()),
                                   onsager(1, g.L, g.band()),
                                   keller_segel(0.75, g.L, 1, g.band())};
    const double beta = 0.8, kappa = 1.3;
    DensityField u = uniform_state(g);
    for (const Potential& W : cats) {
        const double f0 = free_energy(u, W, kappa, beta);
        for (int t = 0; t < 25; ++t) {
            DensityField rho = oracle::random_density(g, rng);
            const double gap = free_energy(rho, W, kappa, beta) - f0;
            NodalField diff = rho - u;
            const double pred = relative_entropy(rho) / beta
                                + 0.5 * kappa * bilinear_form(W, diff, diff);
            CHECK(gap == doctest::Approx(pred).epsilon(1e-10));
        }
    }
}

TEST_CASE("EL residual at and away from stationarity")
{
    TorusGrid g(1, 2.0 * std::numbers::pi, 128);
    Potential W = kuramoto(1, g.L, g.band());
    DensityField u = uniform_state(g);
    CHECK(el_residual(u, W, 2.0, 1.0) < 1e-12);

    // supercritical perturbation: strictly positive residual
    const double kappa = 1.5 * std::sqrt(4.0 * std::numbers::pi);
    NodalField w1 = basis_eval({1, 0}, g);
    DensityField rho = u;
    for (size_t i = 0; i < rho.size(); ++i)
        rho[i] = uniform_value(g) + 0.1 * uniform_value(g) * w1[i];
    rho.normalise();
    CHECK(el_residual(rho, W, kappa, 1.0) > 1e-3);
}

TEST_CASE("dissipation vanishes at stationary states and is nonnegative")
{
    std::mt19937_64 rng(17);
    TorusGrid g(1, 2.0 * std::numbers::pi, 128);
    Potential W = kuramoto(1, g.L, g.band());
    DensityField u = uniform_state(g);
    CHECK(dissipation(u, W, 1.0, 1.0) < 1e-12);

    Potential Hs = Potential::from_coefficients("hstable", g.L, 1, {{{2, 0}, 0.4}}, g.band());
    CHECK(dissipation(u, Hs, 3.0, 1.0) < 1e-12);

    for (int t = 0; t < 10; ++t) {
        DensityField rho = oracle::random_density(g, rng);
        CHECK(dissipation(rho, W, 1.2, 0.9) >= 0.0);
    }
}

TEST_CASE("CKP and log-Sobolev inequalities on random densities")
{
    std::mt19937_64 rng(29);
    TorusGrid g(1, 2.0 * std::numbers::pi, 128);
    DensityField u = uniform_state(g);
    for (int t = 0; t < 50; ++t) {
        DensityField rho = oracle::random_density(g, rng);
        const double H = relative_entropy(rho);
        NodalField diff = rho - u;
        CHECK(diff.l1_norm() <= std::sqrt(2.0 * H) + 1e-12);
        CHECK(H <= g.L * g.L / (4.0 * std::numbers::pi * std::numbers::pi)
                       * fisher_information(rho)
                   + 1e-10);
    }
}

TEST_CASE("kappa_con values")
{
    const double L = 2.0 * std::numbers::pi;
    Potential W = kuramoto(1, L, 64);
    auto kc = kappa_con(W, 1.0);
    REQUIRE(kc);
    CHECK(*kc == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-6));
    auto kc2 = kappa_con(W, 2.0);
    REQUIRE(kc2);
    CHECK(*kc2 == doctest::Approx(0.5 * *kc).epsilon(1e-9));

    Potential Hs = Potential::from_coefficients("hstable", L, 1, {{{1, 0}, 1.0}}, 16);
    auto kh = kappa_con(Hs, 1.0);
    REQUIRE(kh);
    CHECK(std::isinf(*kh));

    CHECK(!kappa_con(keller_segel(0.8, L, 1, 32), 1.0));
}

TEST_CASE("entropy-defect constants")
{
    CHECK(entdef_constant(1) == 1.0);
    CHECK(entdef_constant(2) == 1.0);
    CHECK(entdef_constant(3) == doctest::Approx(27.0 / 32.0).epsilon(1e-15));
    CHECK(entdef_constant(3) == 0.84375);
    for (int n = 3; n <= 10; ++n) CHECK(entdef_constant(n) < 1.0);
    CHECK_THROWS_AS(entdef_constant(0), std::domain_error);
    // lambda is the reciprocal
    for (int n = 1; n <= 8; ++n)
        CHECK(entdef_lambda(n) == doctest::Approx(1.0 / entdef_constant(n)).epsilon(1e-15));
}

TEST_CASE("entropy-defect series I_n")
{
    for (int n = 1; n <= 5; ++n) CHECK(entdef_In(n, 0.0) == 1.0);
    // I_1 = I_0 (modified Bessel); series oracle at z = 1
    double i0 = 0.0, term = 1.0;
    for (int m = 0; m < 30; ++m) {
        if (m > 0) term *= 0.25 / (static_cast<double>(m) * m);
        i0 += term;
    }
    CHECK(entdef_In(1, 1.0) == doctest::Approx(i0).epsilon(1e-14));
    CHECK(entdef_In(1, 1.0) == doctest::Approx(1.266066).epsilon(1e-6));
    // even in z
    for (int n = 1; n <= 4; ++n)
        for (double z : {0.3, 2.0, 11.0})
            CHECK(entdef_In(n, -z) == entdef_In(n, z));
    // large argument stays finite
    CHECK(std::isfinite(entdef_In(3, 50.0)));
}

TEST_CASE("G is zero at zero and strictly increasing")
{
    for (int n : {1, 2}) {
        CHECK(entdef_G(n, 0.0, 2.0 * std::numbers::pi, 1) == 0.0);
        double prev = -1e-300;
        for (int i = 1; i <= 100; ++i) {
            const double y = 5.0 * i / 100.0;
            const double gy = entdef_G(n, y, 2.0 * std::numbers::pi, 1);
            CHECK(gy > prev);
            prev = gy;
        }
    }
}

TEST_CASE("entropy-defect bound on random densities, n = 1 and n = 2")
{
    std::mt19937_64 rng(31);
    {
        TorusGrid g(1, 2.0 * std::numbers::pi, 64);
        for (int t = 0; t < 200; ++t) {
            auto chk = entdef_bound_check(oracle::random_density(g, rng), {1, 0});
            CHECK(chk.satisfied);
            CHECK(chk.lhs - chk.rhs >= -1e-12);
        }
    }
    {
        TorusGrid g(2, 1.0, 16);
        for (int t = 0; t < 50; ++t) {
            auto chk = entdef_bound_check(oracle::random_density(g, rng, 3), {1, 1});
            CHECK(chk.satisfied);
        }
    }
    // rho_inf: both sides vanish
    TorusGrid g(1, 1.0, 32);
    auto chk = entdef_bound_check(uniform_state(g), {1, 0});
    CHECK(std::abs(chk.lhs) < 1e-14);
    CHECK(std::abs(chk.rhs) < 1e-14);
}

TEST_CASE("dual entropy bound holds for arbitrary tilt b")
{
    std::mt19937_64 rng(37);
    TorusGrid g(1, 2.0 * std::numbers::pi, 64);
    for (int t = 0; t < 50; ++t) {
        DensityField rho = oracle::random_density(g, rng);
        const double H = relative_entropy(rho);
        for (double b : {-3.0, -0.5, 0.0, 0.7, 2.0, 8.0})
            CHECK(H >= entdef_dual_bound(rho, {1, 0}, b) - 1e-12);
        // the defect-lemma tilt b = lambda^{-1} L^d is an admissible instance
        CHECK(H >= entdef_dual_bound(rho, {2, 0}, entdef_lambda(1) * g.L) - 1e-12);
    }
}
