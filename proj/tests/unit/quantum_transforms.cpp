#include "doctest.h"

#include "spinkin/pauli_oracle.hpp"
#include "spinkin/quantum_transforms.hpp"
#include "spinkin/spectral.hpp"

#include <cmath>
#include <random>

using namespace spinkin;
using namespace spinkin::transforms;

namespace {

WaveFunction1D gaussian(const Grid1D& g, double x0, double w, double p0, double hbar) {
    std::vector<cplx> psi(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        const double y = g.x(i) - x0;
        psi[i] = std::pow(pi * w * w, -0.25) * std::exp(-y * y / (2 * w * w)) * std::exp(cplx(0, p0 * g.x(i) / hbar));
    }
    return WaveFunction1D(g, psi).normalized();
}

}  // namespace

TEST_CASE("gaussian wigner function matches closed form") {
    const Grid1D g(256, 20.0);
    const auto params = PlasmaParams::with_hbar(1.0);
    const auto psi = gaussian(g, 10.0, 1.0, 0.0, 1.0);
    const auto f = wigner_transform(psi, params, conjugate_momentum_axis(g, 1.0));
    double err = 0.0;
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t k = 0; k < f.p.n; ++k) {
            const double x = g.x(i) - 10.0;
            const double p = f.p.at(k);
            err = std::max(err, std::abs(f.at(i, k) - std::exp(-x * x - p * p) / pi));
        }
    CHECK(err < 1e-6);
}

TEST_CASE("direct-sum path agrees with the fast path") {
    const Grid1D g(64, 16.0);
    const auto params = PlasmaParams::with_hbar(0.7);
    const auto psi = gaussian(g, 8.0, 1.2, 0.0, 0.7);
    const auto c = conjugate_momentum_axis(g, 0.7);
    const auto fast = wigner_transform(psi, params, c);
    const auto slow = cross_wigner(psi.psi, psi.psi, g, 0.7, UniformAxis{c.n, c.lo * (1 + 1e-9), c.step});
    double err = 0.0;
    for (std::size_t i = 0; i < fast.values.size(); ++i) err = std::max(err, std::abs(fast.values[i] - slow[i].real()));
    CHECK(err < 1e-8);
}

TEST_CASE("boosted gaussian peaks at p0") {
    const Grid1D g(128, 20.0);
    const double h = 1.0;
    const double p0 = two_pi * 5 / 20.0;
    const auto psi = gaussian(g, 10.0, 1.0, p0, h);
    const auto f = wigner_transform(psi, PlasmaParams::with_hbar(h), conjugate_momentum_axis(g, h));
    const double mean_p = expect_phase_space(f, [](double, double p) { return p; });
    CHECK(mean_p == doctest::Approx(p0).epsilon(1e-9));
}

TEST_CASE("marginals reproduce position and momentum densities") {
    const Grid1D g(128, 20.0);
    const double h = 1.0;
    const auto psi = gaussian(g, 7.0, 0.8, 0.0, h);
    const auto f = wigner_transform(psi, PlasmaParams::with_hbar(h), conjugate_momentum_axis(g, h));
    const auto mg = marginals(f);
    double ex = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) ex = std::max(ex, std::abs(mg.density_x[i] - std::norm(psi.psi[i])));
    CHECK(ex < 1e-12);
    const auto spec = spectral::fft(psi.psi);
    const double scale = g.dx() * g.dx() / (two_pi * h);
    double ep = 0.0;
    for (std::size_t k = 0; k < g.n; ++k) {
        const std::size_t j = (k + g.n / 2) % g.n;
        ep = std::max(ep, std::abs(mg.density_p[k] - std::norm(spec[j]) * scale));
    }
    CHECK(ep < 1e-12);
}

TEST_CASE("wigner transform rejects unnormalized input and bad axes") {
    const Grid1D g(32, 10.0);
    WaveFunction1D psi(g, std::vector<cplx>(32, 1.0));
    CHECK_THROWS_AS(wigner_transform(psi, PlasmaParams(), 32, 3.0), InvalidState);
    const auto ok = psi.normalized();
    CHECK_THROWS_AS(wigner_transform(ok, PlasmaParams(), 31, 3.0), InvalidArgument);
    CHECK_THROWS_AS(wigner_transform(ok, PlasmaParams(), 32, -1.0), InvalidArgument);
}

TEST_CASE("spin components of a polarized spinor") {
    const Grid1D g(64, 16.0);
    oracle::InitParams ip;
    ip.x0 = 8.0;
    ip.theta = pi / 2;
    const auto params = PlasmaParams::with_hbar(1.0);
    const auto s = oracle::init_state("gaussian", ip, g, params);
    const auto c = wigner_spin_components(s, params, conjugate_momentum_axis(g, 1.0));
    for (std::size_t i = 0; i < c[0].values.size(); ++i) {
        CHECK(std::abs(c[1].values[i] - c[0].values[i]) < 1e-12);
        CHECK(std::abs(c[2].values[i]) < 1e-12);
        CHECK(std::abs(c[3].values[i]) < 1e-12);
    }
}

TEST_CASE("spin Q-transform examples") {
    const SphereQuadrature quad(12, 24);
    SUBCASE("maximally mixed state is uniform") {
        const auto f = spin_q_transform(Mat2c(0.5 * Mat2c::Identity()), quad);
        for (double v : f.values) CHECK(v == doctest::Approx(1.0 / (4 * pi)).epsilon(1e-14));
    }
    SUBCASE("spin up is proportional to 1 + cos theta") {
        const auto rho = DensityMatrixSpin::from_bloch(Vec3(0, 0, 1));
        const auto f = spin_q_transform(rho, quad);
        for (std::size_t j = 0; j < quad.size(); ++j)
            CHECK(f.values[j] == doctest::Approx((1 + quad.direction(j).z()) / (4 * pi)).epsilon(1e-14));
        const auto m = spin_moments_and_reconstruct(f);
        CHECK(m.scalar == doctest::Approx(1.0).epsilon(1e-14));
        CHECK((m.vector - Vec3(0, 0, 1)).norm() < 1e-13);
    }
    SUBCASE("non-Hermitian input is rejected") {
        Mat2c r = 0.5 * Mat2c::Identity();
        r(0, 1) = 0.1;
        CHECK_THROWS_AS(spin_q_transform(r, quad), InvalidState);
    }
}

TEST_CASE("random density matrices round trip through the Q-transform") {
    const SphereQuadrature quad;
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 200; ++t) {
        Vec3 r(nd(rng), nd(rng), nd(rng));
        r *= std::uniform_real_distribution<double>(0, 1)(rng) / r.norm();
        const auto rho = DensityMatrixSpin::from_bloch(r);
        const auto f = spin_q_transform(rho, quad);
        for (double v : f.values) CHECK(v >= -1e-12);
        const auto m = spin_moments_and_reconstruct(f);
        CHECK((m.rho - rho.matrix()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("reconstruction rejects non-positive moments") {
    const SphereQuadrature quad(8, 16);
    SpinDistribution f{quad, std::vector<double>(quad.size())};
    for (std::size_t j = 0; j < quad.size(); ++j) f.values[j] = (1 + 2.0 * quad.direction(j).z()) / (4 * pi);
    CHECK_THROWS_AS(spin_moments_and_reconstruct(f), InvalidState);
}
