#pragma once

#include "spinkin/common.hpp"
#include "spinkin/profiles.hpp"
#include "spinkin/sphere.hpp"

#include <vector>

namespace spinkin::kinetic {

/// Closed-form f(x, v, s_hat) = X(x) G(v) (1 + c.s_hat)/4 pi with G a drifting isotropic Maxwellian.
struct AnalyticDistribution {
    Profile spatial = Profile::uniform(1.0);
    Vec3 drift = Vec3::Zero();
    double v_thermal = 1.0;
    Vec3 bloch = Vec3::Zero();

    /// d^kx/dx^kx d^nx/dv_x^nx d^ny/dv_y^ny d^nz/dv_z^nz of X G.
    double spatial_velocity(double x, const Vec3& v, int kx, int nx, int ny = 0, int nz = 0) const;
    /// (1 + c.s_hat)/4 pi and its tangential gradient.
    double spin_factor(const Vec3& s) const;
    Vec3 spin_gradient(const Vec3& s) const;

    double operator()(double x, const Vec3& v, const Vec3& s) const {
        return spatial_velocity(x, v, 0, 0) * spin_factor(s);
    }
};

/// Static scalar and vector potentials and magnetic field in closed form. A_x must be uniform
/// (Coulomb gauge in 1D); sampled profiles are rejected.
struct StaticPotentials {
    Profile V = Profile::uniform(0.0);
    VectorProfile A;
    VectorProfile B;

    void validate() const;
};

struct PhaseSpaceSamples {
    std::vector<double> x;
    std::vector<Vec3> v;
    SphereQuadrature sphere{4, 7};

    /// Tensor grid: x on the grid nodes, v_x on the axis with v_y = v_z in {-w, 0, w}.
    static PhaseSpaceSamples tensor(const Grid1D& grid, const UniformAxis& vx, double w, const SphereQuadrature& s);
};

struct FullEquationResidual {
    std::vector<double> hbar;
    std::vector<double> rhs_norm;        ///< max |quantum right-hand side| at O(hbar^2)
    std::vector<double> lhs_difference;  ///< max |full-equation left side - semiclassical left side|

    /// Least-squares slope of log rhs_norm against log hbar; throws if any norm is zero.
    double slope() const;
};

/// Right-hand side of the full Wigner-Q evolution equation with its sine and cosine operator
/// brackets expanded through O(hbar^2), evaluated on the sample set, for every hbar in hbar_list.
FullEquationResidual full_equation_residual_hbar2(const AnalyticDistribution& f, const StaticPotentials& pot,
                                                  const PlasmaParams& params, const std::vector<double>& hbar_list,
                                                  const PhaseSpaceSamples& samples);

/// Point evaluation of the O(hbar^2) right-hand side.
double full_equation_rhs(const AnalyticDistribution& f, const StaticPotentials& pot, const PlasmaParams& params,
                         double x, const Vec3& v, const Vec3& s);

/// Non-time-derivative part of the left-hand side, full-equation form and semiclassical form.
double full_equation_lhs(const AnalyticDistribution& f, const StaticPotentials& pot, const PlasmaParams& params,
                         double x, const Vec3& v, const Vec3& s);
double semiclassical_lhs(const AnalyticDistribution& f, const StaticPotentials& pot, const PlasmaParams& params,
                         double x, const Vec3& v, const Vec3& s);

}  // namespace spinkin::kinetic
