#pragma once

#include "spinkin/common.hpp"
#include "spinkin/fields.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace spinkin::kinetic {

/// Macroparticles in (x, v, s_hat) stored as parallel arrays.
struct ParticleEnsemble {
    std::vector<double> x;
    std::vector<Vec3> v;
    std::vector<Vec3> s;  ///< unit spin direction, s = (hbar/2) s_hat
    std::vector<double> w;

    std::size_t size() const { return x.size(); }
    void push_back(double xi, const Vec3& vi, const Vec3& si, double wi);
    /// Throws InvalidState on a non-unit spin, non-positive weight or size mismatch.
    void validate(double spin_tol = 1e-12) const;
    double total_weight() const;
};

/// Counter-based generator: the value depends only on (seed, stream, counter).
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))) {}
    std::uint64_t bits(std::uint64_t counter) const { return mix(key_ + counter * 0x9e3779b97f4a7c15ULL); }
    /// Uniform in (0, 1).
    double uniform(std::uint64_t counter) const {
        return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
    }
    static std::uint64_t mix(std::uint64_t z);

private:
    std::uint64_t key_;
};

struct LoadSpec {
    std::size_t count = 0;
    double density = 1.0;  ///< mean number density; total weight = density * L
    double amplitude = 0.0;  ///< density perturbation n0 (1 + amplitude cos(k x))
    int mode = 1;
    Vec3 drift = Vec3::Zero();
    double v_thermal = 0.0;  ///< per-component Maxwellian spread
    /// "direction": all spins along spin_axis; "isotropic": Fibonacci directions;
    /// "q_function": samples of (1 + bloch.s_hat)/4 pi.
    std::string spin_mode = "direction";
    Vec3 spin_axis = Vec3(0, 0, 1);
    Vec3 bloch = Vec3::Zero();
    bool quiet = true;  ///< stratified positions and velocity quantiles; otherwise pseudo-random
    std::uint64_t seed = 1;
};

ParticleEnsemble load_particles(const LoadSpec& spec, const Grid1D& grid);

/// Inverse CDF for the polar cosine of (1 + a u)/2 on [-1, 1].
double q_function_cosine(double F, double a);

/// Unit direction j of n on a Fibonacci lattice.
Vec3 fibonacci_direction(std::size_t j, std::size_t n);

/// Fields at a particle: self-consistent (linear shape gather) plus external.
struct LocalFields {
    Vec3 E;
    Vec3 B;
    Vec3 dB;  ///< dB/dx
};

LocalFields gather(const fields::FieldState& fs, const fields::ExternalField& ext, double x);

/// Boris push with spin-force half kicks and exact spin rotation. Rejects dt e|B|max/m >= 0.5.
void push_particles(ParticleEnsemble& ens, const fields::FieldState& fs, const fields::ExternalField& ext,
                    const PlasmaParams& params, double dt);

struct Sources {
    std::vector<double> rho;  ///< charge density at nodes
    Vec3Field j_free;         ///< free current at nodes
    Vec3Field M;              ///< magnetization at nodes
    Vec3Field j_bound;        ///< curl M at nodes
};

/// Cloud-in-cell deposition. Work is split into fixed-size chunks merged in index order,
/// so the result does not depend on the thread count.
Sources deposit_sources(const ParticleEnsemble& ens, const Grid1D& grid, const PlasmaParams& params,
                        fields::CurlMethod method = fields::CurlMethod::spectral);

/// Charge density only.
std::vector<double> deposit_charge(const ParticleEnsemble& ens, const Grid1D& grid, const PlasmaParams& params);

/// J_x at half nodes satisfying (rho_new - rho_old)/dt + (J_{i+1/2} - J_{i-1/2})/dx = 0 exactly,
/// with the spatial mean set to mean_jx.
std::vector<double> charge_conserving_jx(const std::vector<double>& rho_old, const std::vector<double>& rho_new,
                                         double mean_jx, const Grid1D& grid, double dt);

struct ParticleDiagnostics {
    double total_charge;
    double kinetic_energy;
    double zeeman_energy_moment;  ///< 3 mu_B sum w s_hat.B
    double zeeman_energy_force;   ///< mu_B sum w s_hat.B
    double spin_norm_deviation;   ///< max ||s_hat| - 1|
    Vec3 momentum;
};

ParticleDiagnostics particle_diagnostics(const ParticleEnsemble& ens, const fields::FieldState& fs,
                                         const fields::ExternalField& ext, const PlasmaParams& params);

}  // namespace spinkin::kinetic
