#pragma once

#include "spinkin/common.hpp"
#include "spinkin/sphere.hpp"
#include "spinkin/states.hpp"

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace spinkin::transforms {

/// Real field on an N_x x N_p tensor grid; values are row-major in x.
struct PhaseSpaceField {
    Grid1D x;
    UniformAxis p;
    std::vector<double> values;

    PhaseSpaceField() = default;
    PhaseSpaceField(Grid1D xg, UniformAxis pa);
    PhaseSpaceField(Grid1D xg, UniformAxis pa, std::vector<double> v);

    double& at(std::size_t i, std::size_t k) { return values[i * p.n + k]; }
    double at(std::size_t i, std::size_t k) const { return values[i * p.n + k]; }
    bool same_grid(const PhaseSpaceField& o) const { return x == o.x && p == o.p; }
    bool all_finite() const;
};

/// f(s_hat) sampled on the nodes of a sphere quadrature.
struct SpinDistribution {
    SphereQuadrature quad;
    std::vector<double> values;
};

/// Momentum axis that is the discrete conjugate of the spatial grid:
/// n_x nodes spaced 2 pi hbar / L, covering [-pi hbar/dx, pi hbar/dx).
UniformAxis conjugate_momentum_axis(const Grid1D& grid, double hbar);

/// Cross-Wigner function (1/2 pi hbar) int dy e^{-ipy/hbar} a(x+y/2) b*(x-y/2) on the
/// momentum axis. The y-integral runs over one period using the band-limited
/// interpolant of a and b at half-grid points.
std::vector<cplx> cross_wigner(std::span<const cplx> a, std::span<const cplx> b, const Grid1D& grid,
                               double hbar, const UniformAxis& p_axis, double momentum_offset = 0.0);

/// Wigner function of a normalized wavefunction on the velocity grid p = m v,
/// v in [-v_max, v_max) with n_v nodes.
PhaseSpaceField wigner_transform(const WaveFunction1D& psi, const PlasmaParams& params,
                                 std::size_t n_v, double v_max);

/// Same transform on an explicit momentum axis.
PhaseSpaceField wigner_transform(const WaveFunction1D& psi, const PlasmaParams& params,
                                 const UniformAxis& p_axis);

/// 2x2 Wigner matrix of a spinor contracted to its scalar and Pauli components:
/// component 0 is Tr W, components 1..3 are Tr(sigma_a W).
std::array<PhaseSpaceField, 4> wigner_spin_components(const SpinorField& psi, const PlasmaParams& params,
                                                      const UniformAxis& p_axis);

struct Marginals {
    Grid1D x;
    UniformAxis p;
    std::vector<double> density_x;
    std::vector<double> density_p;
};

Marginals marginals(const PhaseSpaceField& f);

/// int int O f dx dp with O sampled on the same grid.
double expect_phase_space(const PhaseSpaceField& f, const PhaseSpaceField& symbol);
double expect_phase_space(const PhaseSpaceField& f, const std::function<double(double, double)>& symbol);

/// f(s) = Tr[(1 + s.sigma) rho] / 4 pi. Rejects non-Hermitian input.
SpinDistribution spin_q_transform(const Mat2c& rho, const SphereQuadrature& quad);
SpinDistribution spin_q_transform(const DensityMatrixSpin& rho, const SphereQuadrature& quad);

struct SpinMoments {
    double scalar;  ///< int f dOmega = <I>
    Vec3 vector;    ///< 3 int s f dOmega = <sigma>
    Mat2c rho;      ///< (scalar I + vector.sigma) / 2
};

/// Moments with the factor-3 rule and the reconstructed density matrix.
/// Throws InvalidState when the reconstruction is not positive beyond 1e-8.
SpinMoments spin_moments_and_reconstruct(const SpinDistribution& f);

}  // namespace spinkin::transforms
