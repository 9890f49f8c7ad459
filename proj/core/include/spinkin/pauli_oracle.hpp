#pragma once

#include "spinkin/common.hpp"
#include "spinkin/states.hpp"

#include <array>
#include <string>
#include <vector>

namespace spinkin::oracle {

/// Prescribed fields on the grid. A_x must be uniform (Coulomb gauge).
/// In vector-potential mode B_y = -dA_z/dx and B_z = dA_y/dx; in direct mode B is given.
struct ExternalPotentials {
    Grid1D grid;
    std::vector<double> phi;
    std::array<std::vector<double>, 3> A;
    Vec3Field B;
    Vec3Field E;
    bool direct_b = false;

    static ExternalPotentials none(const Grid1D& grid);
    static ExternalPotentials from_vector_potential(const Grid1D& grid, std::vector<double> phi,
                                                    std::array<std::vector<double>, 3> A);
    static ExternalPotentials direct(const Grid1D& grid, std::vector<double> phi, Vec3Field B);

    bool coulomb_gauge(double tol = 1e-12) const;
    double uniform_ax() const { return A[0].empty() ? 0.0 : A[0][0]; }
};

struct InitParams {
    double x0 = 0.0;
    double width = 1.0;  ///< psi ~ exp(-(x-x0)^2 / (2 width^2))
    double p0 = 0.0;
    double theta = 0.0;  ///< spin orientation on the Bloch sphere
    double phi = 0.0;
    double separation = 0.0;  ///< superposition: packets at x0 -/+ separation/2 with momenta -/+ p0
};

/// family: "gaussian", "plane_wave" or "superposition".
SpinorField init_state(const std::string& family, const InitParams& p, const Grid1D& grid,
                       const PlasmaParams& params);

/// (cos theta/2, e^{i phi} sin theta/2)
std::array<cplx, 2> spin_orientation(double theta, double phi);

/// One Strang step: half local (potential + exact Zeeman rotation), full kinetic, half local.
SpinorField step_pauli(const SpinorField& state, const ExternalPotentials& pot, const PlasmaParams& params,
                       double dt);

/// n steps of size dt.
SpinorField propagate(SpinorField state, const ExternalPotentials& pot, const PlasmaParams& params, double dt,
                      std::size_t steps);

struct Observables {
    std::vector<double> n;
    Vec3Field v;
    Vec3Field s;
    std::vector<char> valid;  ///< 0 where n < 1e-12 max n; v and s are zeroed there
    double masked_fraction() const;
};

Observables spinor_observables(const SpinorField& state, const ExternalPotentials& pot,
                               const PlasmaParams& params);

/// <H> for static potentials.
double energy(const SpinorField& state, const ExternalPotentials& pot, const PlasmaParams& params);

/// <sigma> integrated over the domain.
Vec3 mean_sigma(const SpinorField& state);

}  // namespace spinkin::oracle
