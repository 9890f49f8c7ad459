#include "spinkin/states.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace spinkin {

WaveFunction1D::WaveFunction1D(Grid1D g, std::vector<cplx> values) : grid(g), psi(std::move(values)) {
    if (psi.size() != grid.n) throw InvalidArgument("WaveFunction1D: size does not match grid");
}

double WaveFunction1D::norm_squared() const {
    double s = 0.0;
    for (const auto& z : psi) s += std::norm(z);
    return s * grid.dx();
}

WaveFunction1D WaveFunction1D::normalized() const {
    const double n2 = norm_squared();
    if (!(n2 > 0) || !std::isfinite(n2)) throw InvalidState("WaveFunction1D: cannot normalize a zero state");
    WaveFunction1D out = *this;
    const double s = 1.0 / std::sqrt(n2);
    for (auto& z : out.psi) z *= s;
    return out;
}

bool WaveFunction1D::is_normalized(double tol) const { return std::abs(norm_squared() - 1.0) <= tol; }

SpinorField::SpinorField(Grid1D g, std::vector<cplx> u, std::vector<cplx> d)
    : grid(g), up(std::move(u)), down(std::move(d)) {
    if (up.size() != grid.n || down.size() != grid.n)
        throw InvalidArgument("SpinorField: component size does not match grid");
}

double SpinorField::norm_squared() const {
    double s = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) s += std::norm(up[i]) + std::norm(down[i]);
    return s * grid.dx();
}

SpinorField SpinorField::normalized() const {
    const double n2 = norm_squared();
    if (!(n2 > 0) || !std::isfinite(n2)) throw InvalidState("SpinorField: cannot normalize a zero state");
    SpinorField out = *this;
    const double s = 1.0 / std::sqrt(n2);
    for (auto& z : out.up) z *= s;
    for (auto& z : out.down) z *= s;
    return out;
}

bool SpinorField::is_normalized(double tol) const { return std::abs(norm_squared() - 1.0) <= tol; }

double hermiticity_defect(const Mat2c& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

double min_eigenvalue_hermitian(const Mat2c& m) {
    // eigenvalues of a Hermitian 2x2: (a+d)/2 -/+ sqrt(((a-d)/2)^2 + |b|^2)
    const double a = m(0, 0).real();
    const double d = m(1, 1).real();
    const double b = std::abs(0.5 * (m(0, 1) + std::conj(m(1, 0))));
    return 0.5 * (a + d) - std::hypot(0.5 * (a - d), b);
}

DensityMatrixSpin::DensityMatrixSpin(const Mat2c& rho) : rho_(rho) {
    if (hermiticity_defect(rho) >= 1e-14)
        throw InvalidState("DensityMatrixSpin: matrix is not Hermitian (defect " +
                           std::to_string(hermiticity_defect(rho)) + ")");
    if (std::abs(rho.trace() - 1.0) >= 1e-14)
        throw InvalidState("DensityMatrixSpin: trace differs from 1 by " +
                           std::to_string(std::abs(rho.trace() - 1.0)));
    if (min_eigenvalue_hermitian(rho) < -1e-12)
        throw InvalidState("DensityMatrixSpin: negative eigenvalue " +
                           std::to_string(min_eigenvalue_hermitian(rho)));
}

DensityMatrixSpin DensityMatrixSpin::from_bloch(const Vec3& r) {
    Mat2c m = Mat2c::Identity();
    for (int a = 0; a < 3; ++a) m += r[a] * pauli(a);
    return DensityMatrixSpin(0.5 * m);
}

Vec3 DensityMatrixSpin::bloch_vector() const {
    Vec3 r;
    for (int a = 0; a < 3; ++a) r[a] = (pauli(a) * rho_).trace().real();
    return r;
}

double DensityMatrixSpin::min_eigenvalue() const { return min_eigenvalue_hermitian(rho_); }

}  // namespace spinkin
