#pragma once

#include "spinkin/common.hpp"
#include "spinkin/fields.hpp"
#include "spinkin/sphere.hpp"

#include <array>
#include <functional>
#include <map>
#include <mutex>
#include <vector>

namespace spinkin::kinetic {

/// f(x, v, s_hat) on N_x x N_vx x N_vy x N_sphere nodes. One velocity (v_x) or two (v_x, v_y).
/// Index ((i * n_vx + a) * n_vy + b) * n_s + j; n_vy = 1 in the 1V layout.
class ExtendedDistribution {
public:
    using InitFn = std::function<double(double x, const Vec3& v, const Vec3& s_hat)>;

    /// 1V layout.
    ExtendedDistribution(const Grid1D& grid, const UniformAxis& vx, const SphereQuadrature& quad);
    /// 2V layout.
    ExtendedDistribution(const Grid1D& grid, const UniformAxis& vx, const UniformAxis& vy, const SphereQuadrature& quad);

    static ExtendedDistribution from_function(const Grid1D& grid, const UniformAxis& vx, const SphereQuadrature& quad,
                                              const InitFn& fn);
    static ExtendedDistribution from_function(const Grid1D& grid, const UniformAxis& vx, const UniformAxis& vy,
                                              const SphereQuadrature& quad, const InitFn& fn);

    const Grid1D& grid() const { return grid_; }
    const UniformAxis& vx() const { return vx_; }
    const UniformAxis& vy() const { return vy_; }
    bool two_v() const { return two_v_; }
    const SphereQuadrature& quad() const { return quad_; }

    std::size_t n_vx() const { return vx_.n; }
    std::size_t n_vy() const { return two_v_ ? vy_.n : 1; }
    std::size_t n_s() const { return quad_.size(); }
    std::size_t index(std::size_t i, std::size_t a, std::size_t b, std::size_t j) const {
        return ((i * n_vx() + a) * n_vy() + b) * n_s() + j;
    }
    /// Velocity (cell centre) of (a, b); v_z is always 0.
    Vec3 velocity(std::size_t a, std::size_t b) const;
    /// Velocity-space cell volume.
    double dv() const { return vx_.step * (two_v_ ? vy_.step : 1.0); }

    std::vector<double>& data() { return f_; }
    const std::vector<double>& data() const { return f_; }
    double& at(std::size_t i, std::size_t a, std::size_t b, std::size_t j) { return f_[index(i, a, b, j)]; }
    double at(std::size_t i, std::size_t a, std::size_t b, std::size_t j) const { return f_[index(i, a, b, j)]; }

    /// int f dx dv dOmega
    double total() const;
    bool all_finite() const;

    /// int f dv dOmega
    std::vector<double> density() const;
    /// int v f dv dOmega
    Vec3Field flux() const;
    /// int s_hat f dv dOmega (no factor 3)
    Vec3Field spin_moment() const;

private:
    Grid1D grid_;
    UniformAxis vx_;
    UniformAxis vy_;
    bool two_v_;
    SphereQuadrature quad_;
    std::vector<double> f_;
};

/// Fields seen by the Eulerian solver, all at the nodes.
struct EulerianFields {
    Vec3Field E;
    Vec3Field B;
    Vec3Field dB;  ///< dB/dx

    static EulerianFields uniform(const Grid1D& grid, const Vec3& E, const Vec3& B);
    /// Self-consistent fields interpolated to the nodes plus the external part.
    static EulerianFields from(const fields::FieldState& fs, const fields::ExternalField& ext);
};

enum class Limiter { mc, none };

struct EulerianOptions {
    Limiter limiter = Limiter::mc;
    bool quantum_term = false;
};

/// Strang-split finite-volume solver: half x-advection, half v-advection, spin rotation,
/// half v-advection, half x-advection. The spin-gradient coupling term is evaluated once on the
/// incoming state and added as a frozen source in both v stages. Rotation operators are cached per (axis, angle).
class EulerianSolver {
public:
    explicit EulerianSolver(const SphereQuadrature& quad, EulerianOptions opts = {});

    const EulerianOptions& options() const { return opts_; }
    void set_quantum_term(bool on) { opts_.quantum_term = on; }
    const SphericalHarmonicBasis& basis() const { return basis_; }

    /// Throws StepRejected when v_max dt/dx > 1, a_max dt/dv > 1 or omega dt >= pi/4.
    ExtendedDistribution step(const ExtendedDistribution& f, const EulerianFields& flds, const PlasmaParams& params,
                              double dt) const;

    /// (mu_B/m) (dB/dx . grad_s) df/dv_x, the spin-gradient coupling term, by central differences in v_x.
    std::vector<double> quantum_term_rhs(const ExtendedDistribution& f, const EulerianFields& flds,
                                         const PlasmaParams& params) const;

    /// Largest CFL ratios (x, v, spin) for the given step.
    struct Cfl {
        double x;
        double v;
        double spin;
    };
    Cfl cfl(const ExtendedDistribution& f, const EulerianFields& flds, const PlasmaParams& params, double dt) const;

private:
    void advect_x(ExtendedDistribution& f, double dt) const;
    void advect_v(ExtendedDistribution& f, const EulerianFields& flds, const PlasmaParams& params,
                  const std::vector<double>& q, double dt) const;
    void rotate_spin(ExtendedDistribution& f, const EulerianFields& flds, const PlasmaParams& params, double dt) const;
    const Eigen::MatrixXd& rotation(const Vec3& axis, double angle) const;

    SphereQuadrature quad_;
    SphericalHarmonicBasis basis_;
    EulerianOptions opts_;
    mutable std::mutex cache_mutex_;
    mutable std::map<std::array<double, 4>, Eigen::MatrixXd> cache_;
};

}  // namespace spinkin::kinetic
