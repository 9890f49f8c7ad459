#include "doctest.h"

#include "spinkin/pauli_oracle.hpp"

#include <cmath>

using namespace spinkin;
using namespace spinkin::oracle;

namespace {

double variance(const SpinorField& s) {
    double m0 = 0, m1 = 0, m2 = 0;
    for (std::size_t i = 0; i < s.grid.n; ++i) {
        const double n = std::norm(s.up[i]) + std::norm(s.down[i]);
        const double x = s.grid.x(i);
        m0 += n;
        m1 += n * x;
        m2 += n * x * x;
    }
    return m2 / m0 - (m1 / m0) * (m1 / m0);
}

}  // namespace

TEST_CASE("init_state spin orientation") {
    const Grid1D g(128, 40.0);
    const PlasmaParams params;
    InitParams ip;
    ip.x0 = 20.0;
    SUBCASE("+z has empty down component") {
        const auto s = init_state("gaussian", ip, g, params);
        for (const auto& d : s.down) CHECK(std::abs(d) == 0.0);
        CHECK(s.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("+x splits equally") {
        ip.theta = pi / 2;
        const auto s = init_state("gaussian", ip, g, params);
        for (std::size_t i = 0; i < g.n; ++i) CHECK(std::abs(s.up[i] - s.down[i]) < 1e-15);
    }
    SUBCASE("general orientation") {
        ip.theta = 1.1;
        ip.phi = -0.4;
        const auto s = init_state("gaussian", ip, g, params);
        const Vec3 m = mean_sigma(s);
        const Vec3 want(std::sin(1.1) * std::cos(-0.4), std::sin(1.1) * std::sin(-0.4), std::cos(1.1));
        CHECK((m - want).norm() < 1e-12);
    }
    CHECK_THROWS_AS(init_state("lorentzian", ip, g, params), InvalidArgument);
}

TEST_CASE("plane wave velocity") {
    const Grid1D g(64, 10.0);
    const PlasmaParams params(1.0, 1.0, 0.5, 1.0, 1.0);
    InitParams ip;
    ip.p0 = two_pi * 0.5 * 3 / 10.0;
    ip.theta = 0.7;
    const auto s = init_state("plane_wave", ip, g, params);
    const auto o = spinor_observables(s, ExternalPotentials::none(g), params);
    for (std::size_t i = 0; i < g.n; ++i) {
        CHECK(o.v[i].x() == doctest::Approx(ip.p0).epsilon(1e-10));
        CHECK(o.s[i].norm() == doctest::Approx(0.25).epsilon(1e-12));
    }
    ip.p0 = 0.1234;
    CHECK_THROWS_AS(init_state("plane_wave", ip, g, params), InvalidArgument);
}

TEST_CASE("free gaussian spreading") {
    const Grid1D g(512, 80.0);
    const PlasmaParams params;
    InitParams ip;
    ip.x0 = 40.0;
    const auto s0 = init_state("gaussian", ip, g, params);
    const auto s = propagate(s0, ExternalPotentials::none(g), params, 0.01, 200);
    // width^2 = 2 <(x - <x>)^2>
    CHECK(2.0 * variance(s) == doctest::Approx(1.0 + 4.0).epsilon(1e-4));
    CHECK(s.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("uniform field precession") {
    const Grid1D g(64, 20.0);
    const PlasmaParams params(1.0, 1.0, 0.8, 1.0, 1.0);
    InitParams ip;
    ip.x0 = 10.0;
    ip.theta = pi / 2;
    const double B0 = 1.3;
    const auto pot = ExternalPotentials::direct(g, {}, Vec3Field(g.n, Vec3(0, 0, B0)));
    auto s = init_state("gaussian", ip, g, params);
    const double dt = 0.01;
    for (int k = 1; k <= 300; ++k) {
        s = step_pauli(s, pot, params, dt);
        if (k % 50 == 0) {
            const double t = k * dt;
            CHECK(mean_sigma(s).x() == doctest::Approx(std::cos(2 * params.mu_b() * B0 * t / params.hbar())).epsilon(1e-6));
        }
    }
}

TEST_CASE("constant scalar potential only changes the phase") {
    const Grid1D g(128, 30.0);
    const PlasmaParams params;
    InitParams ip;
    ip.x0 = 15.0;
    ip.p0 = 0.3;
    const auto s0 = init_state("gaussian", ip, g, params);
    const auto a = propagate(s0, ExternalPotentials::none(g), params, 0.01, 100);
    const auto b = propagate(s0, ExternalPotentials::from_vector_potential(g, std::vector<double>(g.n, 2.5), {}), params,
                             0.01, 100);
    for (std::size_t i = 0; i < g.n; ++i) CHECK(std::abs(std::norm(a.up[i]) - std::norm(b.up[i])) < 1e-13);
}

TEST_CASE("norm and energy conservation in a static potential") {
    const Grid1D g(128, 20.0);
    const PlasmaParams params;
    InitParams ip;
    ip.x0 = 10.0;
    ip.theta = 1.0;
    std::vector<double> phi(g.n);
    Vec3Field B(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        phi[i] = 0.3 * std::cos(two_pi * g.x(i) / 20.0);
        B[i] = Vec3(0.2, 0.0, 1.0 + 0.1 * std::sin(two_pi * g.x(i) / 20.0));
    }
    const auto pot = ExternalPotentials::direct(g, phi, B);
    auto s = init_state("gaussian", ip, g, params);
    const double e0 = energy(s, pot, params);
    s = propagate(s, pot, params, 1e-3, 10000);
    CHECK(std::abs(s.norm_squared() - 1.0) < 1e-10);
    CHECK(std::abs(energy(s, pot, params) - e0) / std::abs(e0) < 1e-8);
}

TEST_CASE("second-order time convergence") {
    const Grid1D g(32, 20.0);
    const PlasmaParams params;
    InitParams ip;
    ip.x0 = 10.0;
    ip.width = 2.0;
    ip.theta = 0.8;
    std::vector<double> phi(g.n);
    Vec3Field B(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        phi[i] = 0.5 * std::cos(two_pi * g.x(i) / 20.0);
        B[i] = Vec3(0.4 * std::cos(two_pi * g.x(i) / 20.0), 0.0, 1.0);
    }
    const auto pot = ExternalPotentials::direct(g, phi, B);
    const auto s0 = init_state("gaussian", ip, g, params);
    const double T = 1.0;
    const auto ref = propagate(s0, pot, params, 0.1 / 16 / 16, 16 * 160);
    auto err = [&](double dt) {
        const auto s = propagate(s0, pot, params, dt, static_cast<std::size_t>(std::lround(T / dt)));
        double e = 0;
        for (std::size_t i = 0; i < g.n; ++i) e = std::max(e, std::abs(s.up[i] - ref.up[i]) + std::abs(s.down[i] - ref.down[i]));
        return e;
    };
    const double e1 = err(0.1);
    const double e2 = err(0.05);
    const double e3 = err(0.025);
    const double slope = std::log2(e1 / e3) / 2.0;
    CHECK(e2 < e1);
    CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("step guards") {
    const Grid1D g(64, 1.0);
    const PlasmaParams params;
    const auto s = init_state("gaussian", InitParams{0.5, 0.1, 0, 0, 0, 0}, g, params);
    CHECK_THROWS_AS(step_pauli(s, ExternalPotentials::none(g), params, 1.0), StepRejected);
    CHECK_THROWS_AS(step_pauli(s, ExternalPotentials::none(g), params, -1e-5), InvalidArgument);
    std::array<std::vector<double>, 3> A{std::vector<double>(64), {}, {}};
    A[0][3] = 1.0;
    CHECK_THROWS_AS(step_pauli(s, ExternalPotentials::from_vector_potential(g, {}, A), params, 1e-6), InvalidArgument);
}

TEST_CASE("spin density magnitude and masking") {
    const Grid1D g(256, 40.0);
    const PlasmaParams params(1.0, 1.0, 0.6, 1.0, 1.0);
    InitParams ip;
    ip.x0 = 20.0;
    ip.theta = 2.0;
    ip.phi = 0.5;
    const auto s = init_state("gaussian", ip, g, params);
    const auto o = spinor_observables(s, ExternalPotentials::none(g), params);
    double mass = 0;
    for (std::size_t i = 0; i < g.n; ++i) {
        mass += o.n[i] * g.dx();
        if (o.valid[i]) CHECK(std::abs(o.s[i].norm() / 0.3 - 1.0) < 1e-10);
        else CHECK(o.s[i].norm() == 0.0);
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(o.masked_fraction() > 0.0);
}
