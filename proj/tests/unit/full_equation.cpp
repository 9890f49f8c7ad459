#include "doctest.h"

#include "spinkin/full_equation.hpp"

#include <cmath>

using namespace spinkin;
using namespace spinkin::kinetic;

namespace {

AnalyticDistribution textured() {
    AnalyticDistribution f;
    f.spatial = Profile::single_mode(0.3, 1.0, 0.2);
    f.drift = Vec3(0.2, -0.1, 0.05);
    f.v_thermal = 0.8;
    f.bloch = Vec3(0.2, -0.3, 0.5);
    return f;
}

PhaseSpaceSamples samples() {
    return PhaseSpaceSamples::tensor(Grid1D(12, two_pi), UniformAxis::symmetric(12, 3.0), 0.7, SphereQuadrature(3, 5));
}

}  // namespace

TEST_CASE("uniform fields give no quantum correction") {
    StaticPotentials pot;
    pot.V = Profile::uniform(0.4);
    pot.A = VectorProfile::uniform(Vec3(0.0, 0.3, -0.2));
    pot.B = VectorProfile::uniform(Vec3(0.1, 0.0, 1.0));
    const auto r = full_equation_residual_hbar2(textured(), pot, PlasmaParams(), {0.1, 0.2, 0.4}, samples());
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(r.rhs_norm[k] <= 1e-13);
        CHECK(r.lhs_difference[k] <= 1e-13);
    }
}

TEST_CASE("quadratic potential gives no quantum correction") {
    StaticPotentials pot;
    pot.V = Profile::polynomial({0.1, -0.4, 0.25}, 3.0);
    const auto r = full_equation_residual_hbar2(textured(), pot, PlasmaParams(), {0.05, 0.4}, samples());
    CHECK(r.rhs_norm[0] <= 1e-12);
    CHECK(r.rhs_norm[1] <= 1e-12);
}

TEST_CASE("quartic potential scales as hbar squared") {
    StaticPotentials pot;
    pot.V = Profile::polynomial({0.0, 0.0, 0.1, 0.05, 0.02}, 3.0);
    const auto r = full_equation_residual_hbar2(textured(), pot, PlasmaParams(), {0.05, 0.1, 0.2, 0.4}, samples());
    CHECK(r.slope() == doctest::Approx(2.0).epsilon(0.05));
    CHECK(r.rhs_norm[0] > 0.0);
}

TEST_CASE("sine bracket against finite differences") {
    const auto f = textured();
    StaticPotentials pot;
    pot.V = Profile::polynomial({0.0, 0.0, 0.1, 0.05, 0.02}, 3.0);
    const PlasmaParams params(1.0, 1.0, 0.3, 1.0, 1.0);
    const double x = 1.1;
    const Vec3 v(0.4, 0.2, -0.3);
    const Vec3 s = Vec3(1, 2, 2).normalized();
    const double h = 1e-2;
    auto V = [&](double y) { return pot.V(y); };
    const double v3 = (V(x + 2 * h) - 2 * V(x + h) + 2 * V(x - h) - V(x - 2 * h)) / (2 * h * h * h);
    auto g = [&](double vx) { return f(x, Vec3(vx, v.y(), v.z()), s); };
    const double g3 = (g(v.x() + 2 * h) - 2 * g(v.x() + h) + 2 * g(v.x() - h) - g(v.x() - 2 * h)) / (2 * h * h * h);
    const double expected = params.hbar() * params.hbar() / 24.0 * v3 * g3;
    CHECK(full_equation_rhs(f, pot, params, x, v, s) == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("full and semiclassical left sides coincide") {
    StaticPotentials pot;
    pot.V = Profile::single_mode(0.2, 2.0);
    pot.A.c[1] = Profile::single_mode(0.1, 1.0);
    pot.B.c[1] = Profile::single_mode(0.3, 1.0, 0.4);
    pot.B.c[2] = Profile::polynomial({1.0, 0.1}, 3.0);
    const auto r = full_equation_residual_hbar2(textured(), pot, PlasmaParams(), {0.1, 0.3}, samples());
    CHECK(r.lhs_difference[0] < 1e-14);
    CHECK(r.lhs_difference[1] < 1e-14);
    CHECK(r.rhs_norm[1] > r.rhs_norm[0]);
}

TEST_CASE("unsupported potentials are rejected") {
    StaticPotentials pot;
    pot.V = Profile::sampled(Grid1D(8, 1.0), std::vector<double>(8, 0.0));
    CHECK_THROWS_AS(full_equation_residual_hbar2(textured(), pot, PlasmaParams(), {0.1}, samples()), InvalidArgument);
    StaticPotentials pa;
    pa.A.c[0] = Profile::single_mode(0.1, 1.0);
    CHECK_THROWS_AS(full_equation_residual_hbar2(textured(), pa, PlasmaParams(), {0.1}, samples()), InvalidArgument);
}
