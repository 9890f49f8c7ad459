#pragma once

#include "spinkin/common.hpp"

#include <vector>

namespace spinkin {

/// Complex amplitudes on a periodic grid.
struct WaveFunction1D {
    Grid1D grid;
    std::vector<cplx> psi;

    WaveFunction1D() = default;
    WaveFunction1D(Grid1D g, std::vector<cplx> values);

    /// sum |psi|^2 dx
    double norm_squared() const;
    /// Rescales to unit norm; throws InvalidState for the zero function.
    WaveFunction1D normalized() const;
    bool is_normalized(double tol = 1e-10) const;
};

/// Two-component spinor (up, down) on a shared periodic grid.
struct SpinorField {
    Grid1D grid;
    std::vector<cplx> up;
    std::vector<cplx> down;

    SpinorField() = default;
    SpinorField(Grid1D g, std::vector<cplx> u, std::vector<cplx> d);

    double norm_squared() const;
    SpinorField normalized() const;
    bool is_normalized(double tol = 1e-10) const;

    WaveFunction1D component(int which) const { return {grid, which == 0 ? up : down}; }
};

/// Validated 2x2 spin density matrix: Hermitian, unit trace, positive semidefinite.
class DensityMatrixSpin {
public:
    explicit DensityMatrixSpin(const Mat2c& rho);

    /// (I + r.sigma)/2; requires |r| <= 1.
    static DensityMatrixSpin from_bloch(const Vec3& bloch);

    const Mat2c& matrix() const { return rho_; }
    Vec3 bloch_vector() const;
    double min_eigenvalue() const;

private:
    Mat2c rho_;
};

/// Checks used by DensityMatrixSpin; exposed for callers that take raw matrices.
double hermiticity_defect(const Mat2c& m);
double min_eigenvalue_hermitian(const Mat2c& m);

}  // namespace spinkin
