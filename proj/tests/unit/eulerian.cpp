#include "doctest.h"

#include "spinkin/eulerian.hpp"
#include "spinkin/particles.hpp"

#include <cmath>

using namespace spinkin;
using namespace spinkin::kinetic;

namespace {

double gauss(double v) { return std::exp(-0.5 * v * v) / std::sqrt(two_pi); }

double free_stream_error(std::size_t n) {
    const Grid1D g(n, two_pi);
    const auto vx = UniformAxis::symmetric(16, 2.0);
    const SphereQuadrature quad(2, 3);
    auto init = [](double x, const Vec3& v, const Vec3&) { return (1.0 + 0.5 * std::sin(x)) * gauss(v.x()); };
    auto f = ExtendedDistribution::from_function(g, vx, quad, init);
    EulerianSolver solver(quad, {Limiter::none, false});
    const auto flds = EulerianFields::uniform(g, Vec3::Zero(), Vec3::Zero());
    const double t_end = 1.0;
    const std::size_t steps = n / 2;
    const double dt = t_end / static_cast<double>(steps);
    for (std::size_t s = 0; s < steps; ++s) f = solver.step(f, flds, PlasmaParams(), dt);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < vx.n; ++a) {
            const double v = vx.at(a);
            // cell average of the exact solution
            const double x = g.x(i) - v * t_end;
            const double avg = (1.0 + 0.5 * std::sin(x) * std::sin(g.dx() / 2) / (g.dx() / 2)) * gauss(v);
            const double init_avg = 0.5 * std::sin(g.x(i)) * (std::sin(g.dx() / 2) / (g.dx() / 2) - 1.0) * gauss(v);
            err += std::abs(f.at(i, a, 0, 0) - avg + init_avg) * g.dx();
        }
    return err;
}

}  // namespace

TEST_CASE("free streaming converges at second order") {
    const double e1 = free_stream_error(32);
    const double e2 = free_stream_error(64);
    const double e3 = free_stream_error(128);
    const double p1 = std::log2(e1 / e2);
    const double p2 = std::log2(e2 / e3);
    CHECK(p1 > 1.8);
    CHECK(p2 > 1.8);
}

TEST_CASE("mass conservation and positivity with the limiter") {
    const Grid1D g(32, 10.0);
    const auto vx = UniformAxis::symmetric(32, 6.0);
    const SphereQuadrature quad(4, 7);
    auto f = ExtendedDistribution::from_function(g, vx, quad, [](double x, const Vec3& v, const Vec3& s) {
        return (1.0 + 0.9 * std::cos(two_pi * x / 10.0)) * gauss(v.x()) * (1.0 + 0.5 * s.z());
    });
    Vec3Field E(g.n), B(g.n, Vec3(0.1, 0.0, 0.5)), dB(g.n, Vec3::Zero());
    for (std::size_t i = 0; i < g.n; ++i) E[i] = Vec3(0.3 * std::sin(two_pi * g.x(i) / 10.0), 0, 0);
    const EulerianFields flds{E, B, dB};
    EulerianSolver solver(quad);
    const double m0 = f.total();
    for (int s = 0; s < 40; ++s) f = solver.step(f, flds, PlasmaParams(), 0.05);
    CHECK(f.all_finite());
    CHECK(std::abs(f.total() / m0 - 1.0) < 1e-9);
    double fmin = 0.0;
    for (double v : f.data()) fmin = std::min(fmin, v);
    CHECK(fmin > -1e-12);
}

TEST_CASE("rigid spin rotation about z") {
    const Grid1D g(2, 1.0);
    const auto vx = UniformAxis::symmetric(4, 1.0);
    const SphereQuadrature quad(8, 16);
    auto pattern = [](const Vec3& s) { return 1.0 + 0.3 * s.x() + 0.2 * s.x() * s.y() - 0.1 * s.y() * s.z(); };
    auto f = ExtendedDistribution::from_function(g, vx, quad, [&](double, const Vec3&, const Vec3& s) { return pattern(s); });
    const auto f0 = f;
    const PlasmaParams params;
    const auto flds = EulerianFields::uniform(g, Vec3::Zero(), Vec3(0, 0, 1.0));
    EulerianSolver solver(quad);
    const double w = 2.0 * params.mu_b() / params.hbar();
    const int steps = 40;
    const double dt = two_pi / w / steps;
    for (int s = 0; s < 10; ++s) f = solver.step(f, flds, params, dt);
    double err = 0.0;
    for (std::size_t j = 0; j < quad.size(); ++j) {
        const Vec3 back = rotate(quad.direction(j), Vec3(0, 0, 1), -w * 10 * dt);
        err = std::max(err, std::abs(f.at(1, 2, 0, j) - pattern(back)));
    }
    CHECK(err < 1e-12);
    for (int s = 10; s < steps; ++s) f = solver.step(f, flds, params, dt);
    double worst = 0.0;
    for (std::size_t k = 0; k < f.data().size(); ++k) worst = std::max(worst, std::abs(f.data()[k] - f0.data()[k]));
    CHECK(worst < 1e-11);
}

TEST_CASE("quantum term vanishes for spin independent f") {
    const Grid1D g(16, 6.0);
    const auto vx = UniformAxis::symmetric(24, 5.0);
    const SphereQuadrature quad(6, 11);
    auto f = ExtendedDistribution::from_function(g, vx, quad, [](double x, const Vec3& v, const Vec3&) {
        return (1.0 + 0.2 * std::sin(two_pi * x / 6.0)) * gauss(v.x() - 0.3);
    });
    Vec3Field B(g.n), dB(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        const double k = two_pi / 6.0;
        B[i] = Vec3(0.0, 0.2 * std::cos(k * g.x(i)), 1.0 + 0.3 * std::sin(k * g.x(i)));
        dB[i] = Vec3(0.0, -0.2 * k * std::sin(k * g.x(i)), 0.3 * k * std::cos(k * g.x(i)));
    }
    const EulerianFields flds{Vec3Field(g.n, Vec3::Zero()), B, dB};
    const PlasmaParams params(1.0, 1.0, 0.5, 1.0, 1.0);
    EulerianSolver off(quad, {Limiter::mc, false});
    EulerianSolver on(quad, {Limiter::mc, true});
    const auto a = off.step(f, flds, params, 0.02);
    const auto b = on.step(f, flds, params, 0.02);
    double d = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k) d = std::max(d, std::abs(a.data()[k] - b.data()[k]));
    CHECK(d < 1e-13);
}

TEST_CASE("quantum term on minus off is dt times the coupling term") {
    const Grid1D g(16, 6.0);
    const auto vx = UniformAxis::symmetric(48, 6.0);
    const SphereQuadrature quad(6, 11);
    const double k = two_pi / 6.0;
    const Vec3 c(0.3, -0.2, 0.4);
    auto X = [&](double x) { return 1.0 + 0.2 * std::sin(k * x); };
    auto f = ExtendedDistribution::from_function(g, vx, quad, [&](double x, const Vec3& v, const Vec3& s) {
        return X(x) * gauss(v.x()) * (1.0 + c.dot(s));
    });
    Vec3Field B(g.n), dB(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        B[i] = Vec3(0.1, 0.2 * std::cos(k * g.x(i)), 1.0 + 0.3 * std::sin(k * g.x(i)));
        dB[i] = Vec3(0.0, -0.2 * k * std::sin(k * g.x(i)), 0.3 * k * std::cos(k * g.x(i)));
    }
    const EulerianFields flds{Vec3Field(g.n, Vec3::Zero()), B, dB};
    const PlasmaParams params(1.0, 1.0, 0.5, 1.0, 1.0);
    EulerianSolver off(quad, {Limiter::none, false});
    EulerianSolver on(quad, {Limiter::none, true});

    // discrete term against (mu_B/m) X D_v V dB.(c - (c.s) s), D_v the central difference
    const auto q = on.quantum_term_rhs(f, flds, params);
    double qerr = 0.0, qmax = 0.0;
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t a = 0; a < vx.n; ++a)
            for (std::size_t j = 0; j < quad.size(); ++j) {
                const Vec3& s = quad.direction(j);
                const double v = vx.at(a);
                const double dv = vx.step;
                const double dV = (gauss(v + dv) - gauss(v - dv)) / (2.0 * dv);
                const double exact = params.mu_b() / params.mass() * X(g.x(i)) * dV *
                                     dB[i].dot(c - c.dot(s) * s);
                qerr = std::max(qerr, std::abs(q[f.index(i, a, 0, j)] - exact));
                qmax = std::max(qmax, std::abs(exact));
            }
    CHECK(qerr < 1e-6 * qmax);

    auto defect = [&](double dt) {
        const auto a = off.step(f, flds, params, dt);
        const auto b = on.step(f, flds, params, dt);
        double d = 0.0;
        for (std::size_t k2 = 0; k2 < q.size(); ++k2)
            d = std::max(d, std::abs(b.data()[k2] - a.data()[k2] - dt * q[k2]));
        return d;
    };
    const double d1 = defect(0.02);
    const double d2 = defect(0.01);
    const double d3 = defect(0.005);
    CHECK(d1 < 0.02 * 0.02 * 10 * qmax);
    CHECK(std::log2(d1 / d2) == doctest::Approx(2.0).epsilon(0.1));
    CHECK(std::log2(d2 / d3) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("cfl guards") {
    const Grid1D g(16, 1.0);
    const auto vx = UniformAxis::symmetric(8, 4.0);
    const SphereQuadrature quad(2, 3);
    const ExtendedDistribution f(g, vx, quad);
    EulerianSolver solver(quad);
    const auto none = EulerianFields::uniform(g, Vec3::Zero(), Vec3::Zero());
    CHECK_THROWS_AS(solver.step(f, none, PlasmaParams(), 0.02), StepRejected);
    CHECK_NOTHROW(solver.step(f, none, PlasmaParams(), 0.015));
    const auto strongE = EulerianFields::uniform(g, Vec3(200.0, 0, 0), Vec3::Zero());
    CHECK_THROWS_AS(solver.step(f, strongE, PlasmaParams(), 0.01), StepRejected);
    const auto strongB = EulerianFields::uniform(g, Vec3::Zero(), Vec3(0, 0, 100.0));
    CHECK_THROWS_AS(solver.step(f, strongB, PlasmaParams(), 0.01), StepRejected);
}

TEST_CASE("eulerian moments agree with particles") {
    const Grid1D g(32, 10.0);
    const double k = two_pi / 10.0;
    const auto vx = UniformAxis::symmetric(64, 6.0);
    const SphereQuadrature quad(2, 3);
    const double eps = 0.1;
    auto f = ExtendedDistribution::from_function(g, vx, quad, [&](double x, const Vec3& v, const Vec3&) {
        return (1.0 + eps * std::cos(k * x)) * gauss(v.x()) / (4.0 * pi);
    });
    Vec3Field E(g.n);
    for (std::size_t i = 0; i < g.n; ++i) E[i] = Vec3(0.05 * std::sin(k * g.x(i)), 0, 0);
    const EulerianFields flds{E, Vec3Field(g.n, Vec3::Zero()), Vec3Field(g.n, Vec3::Zero())};
    EulerianSolver solver(quad);
    const PlasmaParams params;

    LoadSpec spec;
    spec.count = 100000;
    spec.amplitude = eps;
    spec.v_thermal = 1.0;
    auto ens = load_particles(spec, g);
    auto fs = fields::FieldState::zeros(g);
    for (std::size_t i = 0; i < g.n; ++i) fs.ex[i] = 0.05 * std::sin(k * (g.x(i) + 0.5 * g.dx()));

    const double dt = 0.02;
    for (int s = 0; s < 100; ++s) {
        f = solver.step(f, flds, params, dt);
        push_particles(ens, fs, fields::ExternalField(), params, dt);
    }
    const auto src = deposit_sources(ens, g, params);
    const auto n_e = f.density();
    const auto j_e = f.flux();
    double dn = 0.0, dj = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        dn = std::max(dn, std::abs(-src.rho[i] - n_e[i]));
        dj = std::max(dj, std::abs(-src.j_free[i].x() - j_e[i].x()));
    }
    const double tol = 3.0 / std::sqrt(static_cast<double>(spec.count));
    CHECK(dn < tol);
    CHECK(dj < tol);
}
