#include "doctest.h"

#include "spinkin/diagnostics.hpp"

#include <cmath>
#include <random>

using namespace spinkin;
using namespace spinkin::diagnostics;

namespace {

io::DiagnosticsSeries synth(double dt, double t_end, auto f) {
    io::DiagnosticsSeries s({"y"});
    const auto n = static_cast<std::size_t>(std::llround(t_end / dt));
    for (std::size_t i = 0; i <= n; ++i) s.append(dt * static_cast<double>(i), {f(dt * static_cast<double>(i))});
    return s;
}

}  // namespace

TEST_CASE("pure cosine") {
    const auto s = synth(0.01, 20.0, [](double t) { return std::cos(3.7 * t); });
    const auto fit = fit_frequency(s, "y");
    REQUIRE(fit.conclusive);
    CHECK(std::abs(fit.omega / 3.7 - 1.0) < 1e-6);
    CHECK(std::abs(fit.gamma) < 1e-6);
    CHECK(fit.peak_ratio > 10.0);
}

TEST_CASE("damped cosine") {
    const auto s = synth(0.01, 40.0, [](double t) { return std::exp(-0.05 * t) * std::cos(2.0 * t); });
    const auto fit = fit_frequency(s, "y");
    REQUIRE(fit.conclusive);
    CHECK(std::abs(fit.omega - 2.0) < 1e-4);
    CHECK(std::abs(fit.gamma - 0.05) < 1e-3);
}

TEST_CASE("offset, phase and noise") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise(0.0, 0.01);
    const auto s = synth(0.05, 60.0, [&](double t) { return 3.0 + 0.5 * std::sin(1.3 * t + 0.4) + noise(rng); });
    const auto fit = fit_frequency(s, "y");
    REQUIRE(fit.conclusive);
    CHECK(std::abs(fit.omega - 1.3) < 5 * fit.omega_uncertainty + 1e-6);
    CHECK(fit.omega_uncertainty > 0.0);
    CHECK(fit.omega_uncertainty < 1e-3);
}

TEST_CASE("inconclusive cases") {
    const auto flat = fit_frequency(synth(0.01, 10.0, [](double) { return 2.5; }), "y");
    CHECK(!flat.conclusive);
    CHECK(std::isnan(flat.omega));
    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise;
    const auto white = fit_frequency(synth(0.01, 10.0, [&](double) { return noise(rng); }), "y");
    CHECK(!white.conclusive);
    const auto short_run = fit_frequency(synth(0.01, 6.0, [](double t) { return std::cos(2.0 * t); }), "y");
    CHECK(!short_run.conclusive);
    CHECK(std::isnan(short_run.gamma));
}

TEST_CASE("slope and drift helpers") {
    CHECK(loglog_slope({1, 2, 4, 8}, {3, 12, 48, 192}) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS(loglog_slope({1, 2}, {1, 0}), InvalidArgument);
    CHECK(relative_drift({2.0, 2.1, 1.8}) == doctest::Approx(0.1));
}
