#pragma once

#include "spinkin/common.hpp"

#include <array>
#include <span>
#include <vector>

namespace spinkin {

/// Gauss-Legendre (in cos theta) x uniform-phi product quadrature on the unit sphere.
/// Node j = it * n_phi + ip.
class SphereQuadrature {
public:
    SphereQuadrature(std::size_t n_theta = 16, std::size_t n_phi = 32);

    std::size_t n_theta() const { return n_theta_; }
    std::size_t n_phi() const { return n_phi_; }
    std::size_t size() const { return dirs_.size(); }

    const Vec3& direction(std::size_t j) const { return dirs_[j]; }
    double weight(std::size_t j) const { return weights_[j]; }
    double theta(std::size_t j) const { return theta_[j / n_phi_]; }
    double phi(std::size_t j) const { return two_pi * static_cast<double>(j % n_phi_) / static_cast<double>(n_phi_); }

    const std::vector<Vec3>& directions() const { return dirs_; }
    const std::vector<double>& weights() const { return weights_; }

    double integrate(std::span<const double> f) const;
    /// Integral of s_hat * f over the sphere (no factor 3).
    Vec3 first_moment(std::span<const double> f) const;

    bool operator==(const SphereQuadrature& o) const {
        return n_theta_ == o.n_theta_ && n_phi_ == o.n_phi_;
    }

private:
    std::size_t n_theta_;
    std::size_t n_phi_;
    std::vector<double> theta_;
    std::vector<Vec3> dirs_;
    std::vector<double> weights_;
};

/// Orthonormal real spherical harmonics up to degree lmax, tied to a quadrature.
/// Projection is exact for functions band-limited to lmax.
class SphericalHarmonicBasis {
public:
    explicit SphericalHarmonicBasis(const SphereQuadrature& quad);

    std::size_t lmax() const { return lmax_; }
    std::size_t modes() const { return (lmax_ + 1) * (lmax_ + 1); }

    /// Rows = points, columns = modes.
    Eigen::MatrixXd evaluate(std::span<const Vec3> points) const;
    /// modes x nodes projection operator.
    const Eigen::MatrixXd& projector() const { return projector_; }

    /// nodes x nodes operators giving the Cartesian components of the tangential gradient.
    const std::array<Eigen::MatrixXd, 3>& gradient_operators() const { return gradient_; }

    /// nodes x nodes operator mapping f to f(R^{-1} s) where R rotates by angle about unit_axis.
    Eigen::MatrixXd rotation_operator(const Vec3& unit_axis, double angle) const;

private:
    SphereQuadrature quad_;
    std::size_t lmax_;
    Eigen::MatrixXd projector_;
    std::array<Eigen::MatrixXd, 3> gradient_;
};

}  // namespace spinkin
