#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "qmart/evolution.hpp"
#include "qmart/finite_difference.hpp"
#include "qmart/kernels.hpp"
#include "test_helpers.hpp"

using namespace qmart;
using qmart::testing::gaussian_state;

namespace {

double l2_distance(const WaveFunction& a, const WaveFunction& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i) s += std::norm(a.values[i] - b.values[i]);
    return std::sqrt(s * a.grid.h);
}

/// Analytic spreading Gaussian packet under i dpsi/dt = -sigma^2/2 psi'':
/// psi0 = (2 pi s0^2)^{-1/4} exp(-x^2/(4 s0^2)).
cdouble spreading_packet(double x, double t, double s0, double sigma) {
    const cdouble z = 1.0 + cdouble(0.0, sigma * sigma * t / (2.0 * s0 * s0));
    const double pref = std::pow(2.0 * std::numbers::pi * s0 * s0, -0.25);
    return pref / std::sqrt(z) * std::exp(-x * x / (4.0 * s0 * s0 * z));
}

} // namespace

TEST_CASE("unitary mode conserves the flat norm to machine precision") {
    Grid g(-6.0, 6.0, 512);
    auto h = build_gaussian_hamiltonian(g, 0.2, PotentialSpec::constant(0.005));
    auto psi0 = qmart::testing::density_gaussian_state(g, 0.0, 0.5);
    std::vector<StepTrace> trace;
    EvolutionConfig cfg{0.001, 1000, EvolutionMode::unitary};
    evolve(psi0, h, cfg, nullptr, &trace);
    const double n0 = norm(psi0);
    for (const auto& t : trace) CHECK(std::abs(t.norm - n0) < 1e-10);
}

TEST_CASE("unitary K evolution conserves the eta norm") {
    Grid g(-6.0, 6.0, 512);
    auto m = exponential_metric(g);
    auto h = build_gaussian_hamiltonian(g, 0.2, PotentialSpec::constant(0.005));
    auto k = similarity_transform(h, m);
    auto psi0 = qmart::testing::density_gaussian_state(g, 0.0, 0.5);
    std::vector<StepTrace> trace;
    EvolutionConfig cfg{0.001, 1000, EvolutionMode::unitary};
    evolve(psi0, k, cfg, &m, &trace);
    const double n0 = norm_eta(psi0, m);
    for (const auto& t : trace) CHECK(std::abs(t.eta_norm - n0) < 1e-8 * n0);
}

TEST_CASE("diffusive mode reproduces the heat-kernel semigroup") {
    Grid g(-6.0, 6.0, 2048);
    const double sigma = 0.2, tau0 = 0.5, tau = 0.5;
    auto h = build_gaussian_hamiltonian(g, sigma, PotentialSpec::constant(0.0));
    auto psi0 = heat_kernel_state(g, tau0, sigma);
    EvolutionConfig cfg{0.005, 100, EvolutionMode::diffusive};
    auto psiT = evolve(psi0, h, cfg);
    auto exact = heat_kernel_state(g, tau0 + tau, sigma);
    CHECK(l2_distance(psiT, exact) < 1e-4);
}

TEST_CASE("diffusive mode: constant potential factors out as e^{-C tau}") {
    Grid g(-6.0, 6.0, 1024);
    const double sigma = 0.2, c = 0.4, tau = 0.5;
    auto psi0 = heat_kernel_state(g, 0.3, sigma);
    // exact in the continuum; Crank-Nicolson agrees to its O(dt^2) tolerance,
    // so the defect must be tiny and must shrink ~4x when dt is halved
    const double factor = std::exp(-c * tau);
    auto defect = [&](double dt, int n_steps) {
        EvolutionConfig cfg{dt, n_steps, EvolutionMode::diffusive};
        auto free_T = evolve(
            psi0, build_gaussian_hamiltonian(g, sigma, PotentialSpec::constant(0.0)), cfg);
        auto damp_T = evolve(
            psi0, build_gaussian_hamiltonian(g, sigma, PotentialSpec::constant(c)), cfg);
        double peak = 0.0, dev = 0.0;
        for (int i = 0; i < g.n; ++i) {
            peak = std::max(peak, std::abs(free_T.values[i].real()));
            dev = std::max(dev,
                           std::abs(damp_T.values[i].real() - free_T.values[i].real() * factor));
        }
        return dev / peak;
    };
    const double d1 = defect(0.005, 100);
    const double d2 = defect(0.0025, 200);
    CHECK(d1 < 1e-5);
    CHECK(d1 / d2 > 3.5);
    CHECK(d1 / d2 < 4.5);
}

TEST_CASE("diffusive mode with C=0 conserves total mass") {
    Grid g(-6.0, 6.0, 1024);
    auto h = build_gaussian_hamiltonian(g, 0.2, PotentialSpec::constant(0.0));
    auto psi0 = heat_kernel_state(g, 0.2, 0.2);
    EvolutionConfig cfg{0.01, 100, EvolutionMode::diffusive};
    auto psiT = evolve(psi0, h, cfg);
    const double m0 = trapezoid(g, psi0.real_part());
    const double mT = trapezoid(g, psiT.real_part());
    CHECK(std::abs(mT - m0) < 1e-8);
}

TEST_CASE("semigroup property at fixed dt") {
    Grid g(-6.0, 6.0, 512);
    auto h = build_gaussian_hamiltonian(g, 0.2, PotentialSpec::constant(0.01));
    auto psi0 = heat_kernel_state(g, 0.3, 0.2);
    EvolutionConfig half{0.01, 30, EvolutionMode::diffusive};
    EvolutionConfig full{0.01, 60, EvolutionMode::diffusive};
    auto two_halves = evolve(evolve(psi0, h, half), h, half);
    auto one_full = evolve(psi0, h, full);
    CHECK(l2_distance(two_halves, one_full) < 1e-8);

    EvolutionConfig uhalf{0.01, 30, EvolutionMode::unitary};
    EvolutionConfig ufull{0.01, 60, EvolutionMode::unitary};
    auto u2 = evolve(evolve(psi0, h, uhalf), h, uhalf);
    auto u1 = evolve(psi0, h, ufull);
    CHECK(l2_distance(u2, u1) < 1e-8);
}

TEST_CASE("halving dt reduces the time-stepping error ~4x") {
    Grid g(-6.0, 6.0, 4096);
    const double sigma = 0.2, tau0 = 0.25, tau = 1.0;
    auto h = build_gaussian_hamiltonian(g, sigma, PotentialSpec::constant(0.0));
    auto psi0 = heat_kernel_state(g, tau0, sigma);
    auto exact = heat_kernel_state(g, tau0 + tau, sigma);
    auto err = [&](int steps) {
        EvolutionConfig cfg{tau / steps, steps, EvolutionMode::diffusive};
        return l2_distance(evolve(psi0, h, cfg), exact);
    };
    const double e1 = err(8), e2 = err(16);
    const double order = std::log2(e1 / e2);
    CHECK(order > 1.8);
    CHECK(order < 2.2);
}

TEST_CASE("commuting diagram: K-diffusion equals rho^{-1} H-diffusion of rho psi0") {
    Grid g(-6.0, 6.0, 1024);
    const double sigma = 0.2;
    auto m = exponential_metric(g);
    auto h = build_gaussian_hamiltonian(g, sigma, PotentialSpec::constant(0.005));
    auto k = similarity_transform(h, m);
    auto psi0 = qmart::testing::density_gaussian_state(g, 0.0, 0.5);

    EvolutionConfig cfg{0.01, 50, EvolutionMode::diffusive};
    auto via_k = evolve(psi0, k, cfg);

    WaveFunction rho_psi = psi0;
    for (int i = 0; i < g.n; ++i) rho_psi.values[i] *= m.rho[i];
    auto via_h = evolve(rho_psi, h, cfg);
    for (int i = 0; i < g.n; ++i) via_h.values[i] /= m.rho[i];

    CHECK(l2_distance(via_k, via_h) < 1e-9);
}

TEST_CASE("free_kernel: modulus, value at the origin, argument checks") {
    CHECK_THROWS_AS(free_kernel(0.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(free_kernel(0.0, -1.0, 1.0), std::invalid_argument);
    const double sigma = 0.7, t = 1.3;
    const double mod = 1.0 / std::sqrt(2.0 * std::numbers::pi * sigma * sigma * t);
    for (double x : {-2.0, 0.0, 0.5, 3.0})
        CHECK(std::abs(free_kernel(x, t, sigma)) == doctest::Approx(mod).epsilon(1e-12));
    // (2 pi i)^{-1/2}: modulus (2 pi)^{-1/2}, phase -pi/4
    const cdouble k0 = free_kernel(0.0, 1.0, 1.0);
    CHECK(std::abs(k0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)));
    CHECK(std::arg(k0) == doctest::Approx(-std::numbers::pi / 4.0));
}

TEST_CASE("free_kernel convolution reproduces the spreading Gaussian packet") {
    const double sigma = 1.0, s0 = 1.0, t = 0.8;
    Grid g(-12.0, 12.0, 4001);
    // direct quadrature of K_t(x-y) psi0(y) dy against the analytic packet
    std::vector<cdouble> psi0(g.n);
    const double pref = std::pow(2.0 * std::numbers::pi * s0 * s0, -0.25);
    for (int i = 0; i < g.n; ++i) {
        const double y = g.node(i);
        psi0[i] = pref * std::exp(-y * y / (4.0 * s0 * s0));
    }
    for (double x : {0.0, 0.5, -1.0, 2.0}) {
        std::vector<cdouble> integrand(g.n);
        for (int i = 0; i < g.n; ++i)
            integrand[i] = free_kernel(x - g.node(i), t, sigma) * psi0[i];
        const cdouble conv = trapezoid(g, integrand);
        const cdouble exact = spreading_packet(x, t, s0, sigma);
        CHECK(std::abs(conv - exact) < 1e-6);
    }
}

TEST_CASE("heat_kernel: normalization, peak value, second moment") {
    CHECK_THROWS_AS(heat_kernel(0.0, 0.0, 1.0), std::invalid_argument);
    CHECK(heat_kernel(0.0, 1.0, 1.0) ==
          doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-12));

    const double sigma = 0.4, tau = 1.5;
    Grid g(-8.0, 8.0, 4001);
    auto k = heat_kernel_state(g, tau, sigma);
    CHECK(trapezoid(g, k.real_part()) == doctest::Approx(1.0).epsilon(1e-8));
    std::vector<double> x2k(g.n);
    for (int i = 0; i < g.n; ++i) x2k[i] = g.node(i) * g.node(i) * k.values[i].real();
    CHECK(trapezoid(g, x2k) == doctest::Approx(sigma * sigma * tau).epsilon(1e-8));
}

TEST_CASE("closed_form_solution: reduction, exponential-moment identity, PDE residual") {
    CHECK_THROWS_AS(closed_form_solution(0.0, -0.1, 1.0, 0.0), std::invalid_argument);
    CHECK(closed_form_solution(0.3, 0.7, 0.5, 0.0) ==
          doctest::Approx(heat_kernel(0.3, 0.7, 0.5)));

    const double sigma = 0.2, t = 1.0, c = 0.01;
    Grid g(-6.0, 6.0, 4001);
    std::vector<double> f(g.n);
    for (int i = 0; i < g.n; ++i)
        f[i] = std::exp(g.node(i) / 2.0) * closed_form_solution(g.node(i), t, sigma, c);
    const double expected = std::exp(sigma * sigma * t / 8.0) * std::exp(-c * t);
    CHECK(trapezoid(g, f) == doctest::Approx(expected).epsilon(1e-10));

    // discrete residual of dpsi/dtau = sigma^2/2 psi'' - c psi is bounded by
    // the O(h^2) discretization error and shrinks ~4x under refinement
    auto residual = [&](int n) {
        Grid gr(-3.0, 3.0, n);
        const double dtau = 1e-6;
        auto at = [&](double tt) {
            std::vector<double> v(gr.n);
            for (int i = 0; i < gr.n; ++i)
                v[i] = closed_form_solution(gr.node(i), tt, sigma, c);
            return v;
        };
        auto d2 = derivative_matrix(gr, 2);
        auto mid = at(t), lo = at(t - dtau), hi = at(t + dtau);
        auto lap = d2.apply(mid);
        double res = 0.0;
        for (int i = 1; i < gr.n - 1; ++i) {
            const double lhs = (hi[i] - lo[i]) / (2.0 * dtau);
            const double rhs = sigma * sigma / 2.0 * lap[i] - c * mid[i];
            res = std::max(res, std::abs(lhs - rhs));
        }
        return res;
    };
    const double r1 = residual(1201);
    const double r2 = residual(2401);
    CHECK(r1 < 5e-4);
    CHECK(r1 / r2 > 3.0);
    CHECK(r1 / r2 < 5.0);
}

TEST_CASE("evolve validates configuration and grids") {
    Grid g(-2.0, 2.0, 65);
    auto h = build_gaussian_hamiltonian(g, 0.2, PotentialSpec::constant(0.0));
    auto psi = heat_kernel_state(g, 0.1, 0.2);
    CHECK_THROWS_AS(evolve(psi, h, EvolutionConfig{0.0, 10, EvolutionMode::diffusive}),
                    std::invalid_argument);
    CHECK_THROWS_AS(evolve(psi, h, EvolutionConfig{0.01, 0, EvolutionMode::diffusive}),
                    std::invalid_argument);
    Grid other(-2.0, 2.0, 33);
    auto psi_other = heat_kernel_state(other, 0.1, 0.2);
    CHECK_THROWS_AS(evolve(psi_other, h, EvolutionConfig{}), std::invalid_argument);
}

TEST_CASE("evolve_with_snapshots returns endpoints plus interval states") {
    Grid g(-3.0, 3.0, 128);
    auto h = build_gaussian_hamiltonian(g, 0.2, PotentialSpec::constant(0.0));
    auto psi = heat_kernel_state(g, 0.2, 0.2);
    EvolutionConfig cfg{0.01, 10, EvolutionMode::unitary};
    auto snaps = evolve_with_snapshots(psi, h, cfg, 5);
    REQUIRE(snaps.size() == 3);
    CHECK(snaps[0].time == doctest::Approx(0.0));
    CHECK(snaps[1].time == doctest::Approx(0.05));
    CHECK(snaps[2].time == doctest::Approx(0.10));
}
