#include "spinkin/eulerian.hpp"
#include "spinkin/gauge.hpp"
#include "spinkin/particles.hpp"
#include "spinkin/pauli_oracle.hpp"
#include "spinkin/quantum_transforms.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace spinkin;

namespace {

kinetic::ParticleEnsemble ensemble(std::size_t n, const Grid1D& g) {
    kinetic::LoadSpec spec;
    spec.count = n;
    spec.v_thermal = 1.0;
    spec.spin_mode = "isotropic";
    return kinetic::load_particles(spec, g);
}

}  // namespace

static void BM_push(benchmark::State& st) {
    const Grid1D g(128, 4.0 * pi);
    auto ens = ensemble(static_cast<std::size_t>(st.range(0)), g);
    const auto fs = fields::FieldState::zeros(g);
    const auto ext = fields::ExternalField::gradient_b(1.0, 0.05, g.length);
    const PlasmaParams params;
    for (auto _ : st) {
        kinetic::push_particles(ens, fs, ext, params, 0.01);
        benchmark::DoNotOptimize(ens.x.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_push)->Arg(10000)->Arg(100000);

static void BM_deposit(benchmark::State& st) {
    const Grid1D g(128, 4.0 * pi);
    const auto ens = ensemble(static_cast<std::size_t>(st.range(0)), g);
    const PlasmaParams params;
    for (auto _ : st) benchmark::DoNotOptimize(kinetic::deposit_sources(ens, g, params));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_deposit)->Arg(10000)->Arg(100000);

static void BM_wigner(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const Grid1D g(n, 20.0);
    const PlasmaParams params;
    oracle::InitParams ip;
    ip.x0 = 10.0;
    const auto psi = oracle::init_state("gaussian", ip, g, params).component(0).normalized();
    const auto axis = transforms::conjugate_momentum_axis(g, params.hbar());
    for (auto _ : st) benchmark::DoNotOptimize(transforms::wigner_transform(psi, params, axis));
}
BENCHMARK(BM_wigner)->Arg(128)->Arg(256);

static void BM_gi_wigner(benchmark::State& st) {
    const Grid1D g(128, two_pi);
    const PlasmaParams params(1.0, 1.0, 0.4, 1.0, 1.0);
    oracle::InitParams ip;
    ip.x0 = 3.0;
    ip.width = 0.5;
    const gauge::GaugedState s{oracle::init_state("gaussian", ip, g, params), 0.0};
    const auto A = Profile::single_mode(0.3, 1.0);
    const auto v = UniformAxis::symmetric(32, 4.0);
    for (auto _ : st) benchmark::DoNotOptimize(gauge::gi_wigner_components(s, A, params, v));
}
BENCHMARK(BM_gi_wigner);

static void BM_eulerian_step(benchmark::State& st) {
    const Grid1D g(64, two_pi);
    const SphereQuadrature quad(4, 7);
    const auto f = kinetic::ExtendedDistribution::from_function(
        g, UniformAxis::symmetric(64, 5.0), quad, [](double x, const Vec3& v, const Vec3& s) {
            return (1.0 + 0.1 * std::cos(x)) * std::exp(-0.5 * v.x() * v.x()) * (1.0 + 0.3 * s.z());
        });
    const kinetic::EulerianSolver solver(quad, {kinetic::Limiter::mc, true});
    const auto flds = kinetic::EulerianFields::uniform(g, Vec3(0.1, 0, 0), Vec3(0, 0, 1.0));
    const PlasmaParams params;
    for (auto _ : st) benchmark::DoNotOptimize(solver.step(f, flds, params, 0.01));
}
BENCHMARK(BM_eulerian_step);
BENCHMARK_MAIN();
