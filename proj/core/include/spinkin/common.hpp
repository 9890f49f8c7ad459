#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinkin {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat2c = Eigen::Matrix2cd;
using Vec3Field = std::vector<Vec3>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input that violates an operation's precondition (grid mismatch, bad sign, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A state that fails its own invariants (non-normalized, non-Hermitian, ...).
class InvalidState : public Error {
public:
    using Error::Error;
};

/// A time step refused by a stability or validity guard.
class StepRejected : public Error {
public:
    using Error::Error;
};

/// Normalized plasma parameters. mu_B and mu_0 are derived, never stored.
class PlasmaParams {
public:
    PlasmaParams() = default;
    PlasmaParams(double mass, double charge, double hbar, double eps0, double c);

    static PlasmaParams with_hbar(double hbar);

    double mass() const { return mass_; }
    double charge() const { return charge_; }
    double hbar() const { return hbar_; }
    double eps0() const { return eps0_; }
    double c() const { return c_; }
    double mu0() const { return 1.0 / (eps0_ * c_ * c_); }
    double mu_b() const { return charge_ * hbar_ / (2.0 * mass_); }

private:
    double mass_ = 1.0;
    double charge_ = 1.0;
    double hbar_ = 1.0;
    double eps0_ = 1.0;
    double c_ = 1.0;
};

inline PlasmaParams::PlasmaParams(double mass, double charge, double hbar, double eps0, double c)
    : mass_(mass), charge_(charge), hbar_(hbar), eps0_(eps0), c_(c) {
    if (!(mass > 0) || !(charge > 0) || !(hbar > 0) || !(eps0 > 0) || !(c > 0))
        throw InvalidArgument("PlasmaParams: all parameters must be strictly positive");
}

inline PlasmaParams PlasmaParams::with_hbar(double hbar) {
    return PlasmaParams(1.0, 1.0, hbar, 1.0, 1.0);
}

/// Uniform periodic grid on [0, L). Node i sits at x = i*dx.
struct Grid1D {
    std::size_t n = 0;
    double length = 0.0;

    Grid1D() = default;
    Grid1D(std::size_t n_, double length_) : n(n_), length(length_) {
        if (n_ < 2) throw InvalidArgument("Grid1D: need at least 2 points");
        if (!(length_ > 0)) throw InvalidArgument("Grid1D: length must be positive");
    }

    double dx() const { return length / static_cast<double>(n); }
    double x(std::size_t i) const { return static_cast<double>(i) * dx(); }
    std::vector<double> nodes() const;

    bool operator==(const Grid1D& o) const { return n == o.n && length == o.length; }
};

inline std::vector<double> Grid1D::nodes() const {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = x(i);
    return xs;
}

/// Uniform axis with n nodes starting at lo, spacing step.
struct UniformAxis {
    std::size_t n = 0;
    double lo = 0.0;
    double step = 0.0;

    /// n nodes on [-half_width, half_width) with spacing 2*half_width/n.
    static UniformAxis symmetric(std::size_t n, double half_width) {
        if (n < 2) throw InvalidArgument("UniformAxis: need at least 2 points");
        if (!(half_width > 0)) throw InvalidArgument("UniformAxis: half width must be positive");
        return {n, -half_width, 2.0 * half_width / static_cast<double>(n)};
    }

    double at(std::size_t k) const { return lo + static_cast<double>(k) * step; }
    double hi() const { return lo + static_cast<double>(n) * step; }

    bool operator==(const UniformAxis& o) const {
        return n == o.n && lo == o.lo && step == o.step;
    }
};

inline Mat2c pauli(int axis) {
    Mat2c s;
    switch (axis) {
    case 0: s << 0, 1, 1, 0; break;
    case 1: s << 0, cplx(0, -1), cplx(0, 1), 0; break;
    default: s << 1, 0, 0, -1; break;
    }
    return s;
}

/// Rotation of v about unit axis by angle (right-handed, Rodrigues).
inline Vec3 rotate(const Vec3& v, const Vec3& unit_axis, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return v * c + unit_axis.cross(v) * s + unit_axis * (unit_axis.dot(v) * (1.0 - c));
}

}  // namespace spinkin
