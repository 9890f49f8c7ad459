#pragma once

#include "spinkin/common.hpp"
#include "spinkin/pauli_oracle.hpp"
#include "spinkin/states.hpp"

#include <functional>
#include <vector>

namespace spinkin::fluid {

struct FluidState {
    Grid1D grid;
    std::vector<double> n;
    std::vector<double> u;

    FluidState() = default;
    FluidState(Grid1D g, std::vector<double> n_, std::vector<double> u_);

    double mass() const;
};

struct FluidRhs {
    std::vector<double> dn;
    std::vector<double> du;
};

/// Potential recomputed from the current state at every stage (self-consistent runs).
using PotentialFn = std::function<std::vector<double>(const FluidState&)>;

/// Relative density floor; n < floor * max n anywhere rejects the evaluation.
inline constexpr double default_floor = 1e-10;

/// dn/dt = -d(nu)/dx; du/dt = -u du/dx + (e/m) dphi/dx + (hbar^2/2m^2) d/dx[(d^2 sqrt n/dx^2)/sqrt n]
FluidRhs fluid_rhs(const FluidState& state, const std::vector<double>& phi, const PlasmaParams& params,
                   double floor = default_floor);

/// Classical RK4 step with a static potential.
FluidState step_fluid(const FluidState& state, const std::vector<double>& phi, const PlasmaParams& params,
                      double dt, double floor = default_floor);
/// RK4 step with the potential re-evaluated at every stage.
FluidState step_fluid(const FluidState& state, const PotentialFn& phi, const PlasmaParams& params, double dt,
                      double floor = default_floor);

/// Bohm force per unit mass, (hbar^2/2m^2) d/dx[(d^2 sqrt n)/sqrt n].
std::vector<double> bohm_acceleration(const std::vector<double>& n, const Grid1D& grid, const PlasmaParams& params);

/// ds/dt = [(2 mu_B/hbar) B - (1/(m n)) d/dx(n ds/dx)] x s. Requires |s| = hbar/2 within 1e-10
/// where n >= floor * max n; other points are returned as zero.
Vec3Field spin_density_rhs(const Vec3Field& s, const std::vector<double>& n, const Vec3Field& B,
                           const Grid1D& grid, const PlasmaParams& params, double floor = default_floor);

/// Effective field Omega with ds/dt = Omega x s.
Vec3Field spin_effective_field(const Vec3Field& s, const std::vector<double>& n, const Vec3Field& B,
                               const Grid1D& grid, const PlasmaParams& params, double floor = default_floor);

/// Midpoint step rotating s exactly about the effective field; |s| is preserved to rounding.
Vec3Field step_spin_density(const Vec3Field& s, const std::vector<double>& n, const Vec3Field& B,
                            const Grid1D& grid, const PlasmaParams& params, double dt,
                            double floor = default_floor);

struct WavefunctionEnsemble {
    std::vector<SpinorField> members;
    std::vector<double> probabilities;

    WavefunctionEnsemble() = default;
    WavefunctionEnsemble(std::vector<SpinorField> m, std::vector<double> p);

    const Grid1D& grid() const { return members.front().grid; }
};

struct FluidMoments {
    std::vector<double> n;
    Vec3Field v;
    Vec3Field S;
    std::vector<double> p;
    Vec3Field K;  ///< x-row of n <w (x) S_dev>
    std::vector<double> sigma;        ///< sum_a (dS_a)^2
    std::vector<double> sigma_tilde;  ///< <sum_a (dS_dev_a)^2>
    std::vector<double> sigma_cross;  ///< 2 dS_a <dS_dev^a>
    Vec3Field mean_dev_gradient;      ///< <d S_dev>
    std::vector<double> second_moment;  ///< n <w_x w_x>

    /// x-component of the spin force density and its three terms.
    std::vector<double> f_spin;
    std::vector<double> f_spin_zeeman;
    std::vector<double> f_spin_gradient;
    std::vector<double> f_spin_cross;

    Vec3Field omega_spin;
    Vec3Field omega_mean;
    Vec3Field omega_mixed;
    Vec3Field omega_fluct;
    double masked_fraction = 0.0;

    /// sum P n_a (hbar^2/2m) dQ_a/dx with Q_a = d^2 sqrt(n_a)/sqrt(n_a)
    std::vector<double> quantum_force;
    /// (hbar^2 n/2m) d/dx Q[n]
    std::vector<double> quantum_force_closure;
};

FluidMoments ensemble_moments(const WavefunctionEnsemble& ens, const oracle::ExternalPotentials& pot,
                              const PlasmaParams& params);

struct ResidualSeries {
    std::vector<double> times;
    std::vector<std::vector<double>> continuity;
    std::vector<std::vector<double>> momentum;
    std::vector<Vec3Field> spin;

    double max_continuity() const;
    double max_momentum() const;
    double max_spin() const;
};

/// Residuals of the averaged continuity, momentum and spin equations at every interior
/// time level of a uniformly sampled trajectory (centered time differences).
ResidualSeries averaged_equation_residual(const std::vector<WavefunctionEnsemble>& trajectory, double cadence,
                                          const oracle::ExternalPotentials& pot, const PlasmaParams& params);

}  // namespace spinkin::fluid
