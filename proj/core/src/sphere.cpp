#include "spinkin/sphere.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <memory>

namespace spinkin {

SphereQuadrature::SphereQuadrature(std::size_t n_theta, std::size_t n_phi)
    : n_theta_(n_theta), n_phi_(n_phi) {
    if (n_theta < 1 || n_phi < 1) throw InvalidArgument("SphereQuadrature: empty grid");
    std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)>
        table(gsl_integration_glfixed_table_alloc(n_theta), &gsl_integration_glfixed_table_free);
    const double w_phi = two_pi / static_cast<double>(n_phi);
    theta_.resize(n_theta);
    dirs_.reserve(n_theta * n_phi);
    weights_.reserve(n_theta * n_phi);
    for (std::size_t it = 0; it < n_theta; ++it) {
        double mu = 0.0;
        double w = 0.0;
        gsl_integration_glfixed_point(-1.0, 1.0, it, &mu, &w, table.get());
        theta_[it] = std::acos(mu);
        const double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
        for (std::size_t ip = 0; ip < n_phi; ++ip) {
            const double ph = two_pi * static_cast<double>(ip) / static_cast<double>(n_phi);
            dirs_.emplace_back(st * std::cos(ph), st * std::sin(ph), mu);
            weights_.push_back(w * w_phi);
        }
    }
}

double SphereQuadrature::integrate(std::span<const double> f) const {
    if (f.size() != size()) throw InvalidArgument("SphereQuadrature::integrate: size mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) s += weights_[j] * f[j];
    return s;
}

Vec3 SphereQuadrature::first_moment(std::span<const double> f) const {
    if (f.size() != size()) throw InvalidArgument("SphereQuadrature::first_moment: size mismatch");
    Vec3 s = Vec3::Zero();
    for (std::size_t j = 0; j < f.size(); ++j) s += weights_[j] * f[j] * dirs_[j];
    return s;
}

namespace {

// sqrt((2l+1)/(2l-1) * (l-m)/(l+m)): ratio of the normalizations of degree l and l-1.
double norm_ratio(int l, int m) {
    return std::sqrt((2.0 * l + 1.0) / (2.0 * l - 1.0) * (l - m) / static_cast<double>(l + m));
}

int mode_index(int l, int m) { return l * l + l + m; }

struct Angles {
    double theta;
    double phi;
};

Angles angles_of(const Vec3& p) {
    const double r = p.norm();
    const double z = std::clamp(p.z() / r, -1.0, 1.0);
    return {std::acos(z), std::atan2(p.y(), p.x())};
}

}  // namespace

SphericalHarmonicBasis::SphericalHarmonicBasis(const SphereQuadrature& quad) : quad_(quad) {
    lmax_ = std::min(quad.n_theta() - 1, (quad.n_phi() - 1) / 2);
    const auto y = evaluate(quad.directions());
    const auto nodes = static_cast<Eigen::Index>(quad.size());
    Eigen::VectorXd w(nodes);
    for (Eigen::Index j = 0; j < nodes; ++j) w(j) = quad.weight(static_cast<std::size_t>(j));
    projector_ = y.transpose() * w.asDiagonal();

    // d/dtheta and (1/sin theta) d/dphi of every mode at every node.
    const auto nm = static_cast<Eigen::Index>(modes());
    Eigen::MatrixXd d_theta = Eigen::MatrixXd::Zero(nodes, nm);
    Eigen::MatrixXd d_phi = Eigen::MatrixXd::Zero(nodes, nm);
    const int lmax = static_cast<int>(lmax_);
    for (Eigen::Index j = 0; j < nodes; ++j) {
        const auto js = static_cast<std::size_t>(j);
        const double th = quad.theta(js);
        const double ph = quad.phi(js);
        const double x = std::cos(th);
        const double st = std::sin(th);
        for (int l = 0; l <= lmax; ++l) {
            for (int m = 0; m <= l; ++m) {
                const double p = std::sph_legendre(l, m, th);
                const double p_lower = (l - 1 >= m) ? std::sph_legendre(l - 1, m, th) : 0.0;
                const double dp = (l * x * p - (l > m ? (l + m) * norm_ratio(l, m) * p_lower : 0.0)) / st;
                if (m == 0) {
                    d_theta(j, mode_index(l, 0)) = dp;
                } else {
                    const double r2 = std::sqrt(2.0);
                    d_theta(j, mode_index(l, m)) = r2 * dp * std::cos(m * ph);
                    d_theta(j, mode_index(l, -m)) = r2 * dp * std::sin(m * ph);
                    d_phi(j, mode_index(l, m)) = -r2 * m * p * std::sin(m * ph) / st;
                    d_phi(j, mode_index(l, -m)) = r2 * m * p * std::cos(m * ph) / st;
                }
            }
        }
    }
    for (int c = 0; c < 3; ++c) gradient_[c] = Eigen::MatrixXd::Zero(nodes, nm);
    for (Eigen::Index j = 0; j < nodes; ++j) {
        const auto js = static_cast<std::size_t>(j);
        const double th = quad.theta(js);
        const double ph = quad.phi(js);
        const Vec3 e_theta(std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th));
        const Vec3 e_phi(-std::sin(ph), std::cos(ph), 0.0);
        for (int c = 0; c < 3; ++c)
            gradient_[c].row(j) = e_theta[c] * d_theta.row(j) + e_phi[c] * d_phi.row(j);
    }
    for (auto& g : gradient_) g = (g * projector_).eval();
}

Eigen::MatrixXd SphericalHarmonicBasis::evaluate(std::span<const Vec3> points) const {
    const int lmax = static_cast<int>(lmax_);
    Eigen::MatrixXd y(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(modes()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto [th, ph] = angles_of(points[i]);
        const auto r = static_cast<Eigen::Index>(i);
        for (int l = 0; l <= lmax; ++l) {
            y(r, mode_index(l, 0)) = std::sph_legendre(l, 0, th);
            for (int m = 1; m <= l; ++m) {
                const double p = std::sqrt(2.0) * std::sph_legendre(l, m, th);
                y(r, mode_index(l, m)) = p * std::cos(m * ph);
                y(r, mode_index(l, -m)) = p * std::sin(m * ph);
            }
        }
    }
    return y;
}

Eigen::MatrixXd SphericalHarmonicBasis::rotation_operator(const Vec3& unit_axis, double angle) const {
    std::vector<Vec3> back(quad_.size());
    for (std::size_t j = 0; j < back.size(); ++j)
        back[j] = rotate(quad_.direction(j), unit_axis, -angle);
    return evaluate(back) * projector_;
}

}  // namespace spinkin
