#include "spinkin/eulerian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace spinkin::kinetic {

namespace {

double mc_slope(double l, double c, double r) {
    const double dl = c - l;
    const double dr = r - c;
    if (dl * dr <= 0.0) return 0.0;
    const double s = dl > 0.0 ? 1.0 : -1.0;
    return s * std::min({2.0 * std::abs(dl), 2.0 * std::abs(dr), 0.5 * std::abs(dl + dr)});
}

// Conservative MUSCL update of one line for constant Courant number nu (|nu| <= 1).
// buf holds the line with two ghost cells on each side.
void advect_line(std::vector<double>& buf, std::vector<double>& slope, std::vector<double>& flux, std::size_t n,
                 double nu, Limiter lim) {
    for (std::size_t k = 1; k < n + 3; ++k) {
        slope[k] = lim == Limiter::mc ? mc_slope(buf[k - 1], buf[k], buf[k + 1]) : 0.5 * (buf[k + 1] - buf[k - 1]);
    }
    // flux[k] is the face between buffer cells k and k+1
    for (std::size_t k = 1; k < n + 2; ++k) {
        flux[k] = nu >= 0.0 ? nu * (buf[k] + 0.5 * (1.0 - nu) * slope[k])
                            : nu * (buf[k + 1] - 0.5 * (1.0 + nu) * slope[k + 1]);
    }
    for (std::size_t k = 2; k < n + 2; ++k) buf[k] -= flux[k] - flux[k - 1];
}

struct LineBuffers {
    std::vector<double> buf, slope, flux;
    explicit LineBuffers(std::size_t n) : buf(n + 4, 0.0), slope(n + 4, 0.0), flux(n + 4, 0.0) {}
};

// Advects the strided line starting at base by nu cells per step.
void advect_strided(std::vector<double>& f, std::size_t base, std::size_t stride, std::size_t n, double nu,
                    bool periodic, Limiter lim, LineBuffers& lb) {
    if (nu == 0.0) return;
    auto& b = lb.buf;
    for (std::size_t k = 0; k < n; ++k) b[k + 2] = f[base + k * stride];
    if (periodic) {
        b[0] = b[n];
        b[1] = b[n + 1];
        b[n + 2] = b[2];
        b[n + 3] = b[3];
    } else {
        b[0] = b[1] = b[n + 2] = b[n + 3] = 0.0;
    }
    advect_line(b, lb.slope, lb.flux, n, nu, lim);
    for (std::size_t k = 0; k < n; ++k) f[base + k * stride] = b[k + 2];
}

}  // namespace

ExtendedDistribution::ExtendedDistribution(const Grid1D& grid, const UniformAxis& vx, const SphereQuadrature& quad)
    : grid_(grid), vx_(vx), vy_{1, 0.0, 1.0}, two_v_(false), quad_(quad) {
    if (vx.n < 2) throw InvalidArgument("ExtendedDistribution: need at least 2 velocity cells");
    f_.assign(grid.n * vx.n * quad.size(), 0.0);
}

ExtendedDistribution::ExtendedDistribution(const Grid1D& grid, const UniformAxis& vx, const UniformAxis& vy,
                                           const SphereQuadrature& quad)
    : grid_(grid), vx_(vx), vy_(vy), two_v_(true), quad_(quad) {
    if (vx.n < 2 || vy.n < 2) throw InvalidArgument("ExtendedDistribution: need at least 2 velocity cells per axis");
    f_.assign(grid.n * vx.n * vy.n * quad.size(), 0.0);
}

namespace {

void fill(ExtendedDistribution& d, const ExtendedDistribution::InitFn& fn) {
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < d.grid().n; ++i)
        for (std::size_t a = 0; a < d.n_vx(); ++a)
            for (std::size_t b = 0; b < d.n_vy(); ++b)
                for (std::size_t j = 0; j < d.n_s(); ++j)
                    d.at(i, a, b, j) = fn(d.grid().x(i), d.velocity(a, b), d.quad().direction(j));
}

}  // namespace

ExtendedDistribution ExtendedDistribution::from_function(const Grid1D& grid, const UniformAxis& vx,
                                                         const SphereQuadrature& quad, const InitFn& fn) {
    ExtendedDistribution d(grid, vx, quad);
    fill(d, fn);
    return d;
}

ExtendedDistribution ExtendedDistribution::from_function(const Grid1D& grid, const UniformAxis& vx,
                                                         const UniformAxis& vy, const SphereQuadrature& quad,
                                                         const InitFn& fn) {
    ExtendedDistribution d(grid, vx, vy, quad);
    fill(d, fn);
    return d;
}

Vec3 ExtendedDistribution::velocity(std::size_t a, std::size_t b) const {
    return {vx_.at(a), two_v_ ? vy_.at(b) : 0.0, 0.0};
}

double ExtendedDistribution::total() const {
    double t = 0.0;
    for (double n : density()) t += n;
    return t * grid_.dx();
}

bool ExtendedDistribution::all_finite() const {
    return std::all_of(f_.begin(), f_.end(), [](double v) { return std::isfinite(v); });
}

std::vector<double> ExtendedDistribution::density() const {
    std::vector<double> n(grid_.n, 0.0);
    for (std::size_t i = 0; i < grid_.n; ++i) {
        double s = 0.0;
        for (std::size_t a = 0; a < n_vx(); ++a)
            for (std::size_t b = 0; b < n_vy(); ++b)
                for (std::size_t j = 0; j < n_s(); ++j) s += quad_.weight(j) * at(i, a, b, j);
        n[i] = s * dv();
    }
    return n;
}

Vec3Field ExtendedDistribution::flux() const {
    Vec3Field out(grid_.n, Vec3::Zero());
    for (std::size_t i = 0; i < grid_.n; ++i) {
        for (std::size_t a = 0; a < n_vx(); ++a)
            for (std::size_t b = 0; b < n_vy(); ++b) {
                double s = 0.0;
                for (std::size_t j = 0; j < n_s(); ++j) s += quad_.weight(j) * at(i, a, b, j);
                out[i] += s * velocity(a, b);
            }
        out[i] *= dv();
    }
    return out;
}

Vec3Field ExtendedDistribution::spin_moment() const {
    Vec3Field out(grid_.n, Vec3::Zero());
    for (std::size_t i = 0; i < grid_.n; ++i) {
        for (std::size_t a = 0; a < n_vx(); ++a)
            for (std::size_t b = 0; b < n_vy(); ++b)
                for (std::size_t j = 0; j < n_s(); ++j) out[i] += quad_.weight(j) * at(i, a, b, j) * quad_.direction(j);
        out[i] *= dv();
    }
    return out;
}

EulerianFields EulerianFields::uniform(const Grid1D& grid, const Vec3& E, const Vec3& B) {
    return {Vec3Field(grid.n, E), Vec3Field(grid.n, B), Vec3Field(grid.n, Vec3::Zero())};
}

EulerianFields EulerianFields::from(const fields::FieldState& fs, const fields::ExternalField& ext) {
    const Grid1D& g = fs.grid;
    EulerianFields out{fs.E_nodes(), fs.B_nodes(), Vec3Field(g.n, Vec3::Zero())};
    for (std::size_t i = 0; i < g.n; ++i) {
        const std::size_t im = (i + g.n - 1) % g.n;
        const double x = g.x(i);
        out.E[i] += ext.E(x);
        out.B[i] += ext.B(x);
        out.dB[i] = Vec3(0.0, (fs.by[i] - fs.by[im]) / g.dx(), (fs.bz[i] - fs.bz[im]) / g.dx()) + ext.dB(x);
    }
    return out;
}

EulerianSolver::EulerianSolver(const SphereQuadrature& quad, EulerianOptions opts)
    : quad_(quad), basis_(quad), opts_(opts) {}

EulerianSolver::Cfl EulerianSolver::cfl(const ExtendedDistribution& f, const EulerianFields& flds,
                                        const PlasmaParams& params, double dt) const {
    const auto& vx = f.vx();
    const double vmax = std::max(std::abs(vx.at(0)), std::abs(vx.at(vx.n - 1)));
    Cfl c{vmax * dt / f.grid().dx(), 0.0, 0.0};
    const double qm = params.charge() / params.mass();
    const double sm = params.mu_b() / params.mass();
    const double vy_max = f.two_v() ? std::max(std::abs(f.vy().at(0)), std::abs(f.vy().at(f.vy().n - 1))) : 0.0;
    for (std::size_t i = 0; i < f.grid().n; ++i) {
        const Vec3& E = flds.E[i];
        const Vec3& B = flds.B[i];
        const double ax = qm * (std::abs(E.x()) + vy_max * std::abs(B.z())) + sm * flds.dB[i].norm();
        c.v = std::max(c.v, ax * dt / vx.step);
        if (f.two_v()) {
            const double ay = qm * (std::abs(E.y()) + vmax * std::abs(B.z()));
            c.v = std::max(c.v, ay * dt / f.vy().step);
        }
        c.spin = std::max(c.spin, 2.0 * params.mu_b() * B.norm() * dt / params.hbar());
    }
    return c;
}

ExtendedDistribution EulerianSolver::step(const ExtendedDistribution& f, const EulerianFields& flds,
                                          const PlasmaParams& params, double dt) const {
    if (!(dt > 0)) throw InvalidArgument("eulerian step: dt must be positive");
    if (!(f.quad() == quad_)) throw InvalidArgument("eulerian step: sphere quadrature mismatch");
    const std::size_t n = f.grid().n;
    if (flds.E.size() != n || flds.B.size() != n || flds.dB.size() != n)
        throw InvalidArgument("eulerian step: field size mismatch");
    const Cfl c = cfl(f, flds, params, dt);
    if (c.x > 1.0) throw StepRejected("eulerian step: x-advection CFL " + std::to_string(c.x) + " exceeds 1");
    if (c.v > 1.0) throw StepRejected("eulerian step: v-advection CFL " + std::to_string(c.v) + " exceeds 1");
    if (c.spin >= pi / 4.0)
        throw StepRejected("eulerian step: spin rotation angle " + std::to_string(c.spin) + " is not below pi/4");

    if (cache_.size() > 4096) cache_.clear();
    std::vector<double> q;
    if (opts_.quantum_term) q = quantum_term_rhs(f, flds, params);
    ExtendedDistribution out = f;
    advect_x(out, 0.5 * dt);
    advect_v(out, flds, params, q, 0.5 * dt);
    rotate_spin(out, flds, params, dt);
    advect_v(out, flds, params, q, 0.5 * dt);
    advect_x(out, 0.5 * dt);
    return out;
}

void EulerianSolver::advect_x(ExtendedDistribution& f, double dt) const {
    const std::size_t n = f.grid().n;
    const std::size_t inner = f.n_vx() * f.n_vy() * f.n_s();
    const double dx = f.grid().dx();
    auto& data = f.data();
#pragma omp parallel
    {
        LineBuffers lb(n);
#pragma omp for schedule(static)
        for (std::size_t r = 0; r < inner; ++r) {
            const std::size_t a = r / (f.n_vy() * f.n_s());
            advect_strided(data, r, inner, n, f.vx().at(a) * dt / dx, true, opts_.limiter, lb);
        }
    }
}

void EulerianSolver::advect_v(ExtendedDistribution& f, const EulerianFields& flds, const PlasmaParams& params,
                              const std::vector<double>& q, double dt) const {
    if (!q.empty()) {
        auto& d = f.data();
        for (std::size_t k = 0; k < d.size(); ++k) d[k] += dt * q[k];
    }
    const std::size_t n = f.grid().n;
    const std::size_t nvx = f.n_vx();
    const std::size_t nvy = f.n_vy();
    const std::size_t ns = f.n_s();
    const double qm = params.charge() / params.mass();
    const double sm = params.mu_b() / params.mass();
    auto& data = f.data();

    auto sweep_x = [&]() {
#pragma omp parallel
        {
            LineBuffers lb(nvx);
#pragma omp for schedule(static)
            for (std::size_t r = 0; r < n * nvy * ns; ++r) {
                const std::size_t i = r / (nvy * ns);
                const std::size_t b = (r / ns) % nvy;
                const std::size_t j = r % ns;
                const double vy = f.two_v() ? f.vy().at(b) : 0.0;
                const double ax = -qm * (flds.E[i].x() + vy * flds.B[i].z()) - sm * quad_.direction(j).dot(flds.dB[i]);
                advect_strided(data, f.index(i, 0, b, j), nvy * ns, nvx, ax * dt / f.vx().step, false,
                               opts_.limiter, lb);
            }
        }
    };
    auto sweep_y = [&]() {
#pragma omp parallel
        {
            LineBuffers lb(nvy);
#pragma omp for schedule(static)
            for (std::size_t r = 0; r < n * nvx * ns; ++r) {
                const std::size_t i = r / (nvx * ns);
                const std::size_t a = (r / ns) % nvx;
                const std::size_t j = r % ns;
                const double ay = -qm * (flds.E[i].y() - f.vx().at(a) * flds.B[i].z());
                advect_strided(data, f.index(i, a, 0, j), ns, nvy, ay * dt / f.vy().step, false, opts_.limiter, lb);
            }
        }
    };
    if (f.two_v()) {
        sweep_x();
        sweep_y();
    } else {
        sweep_x();
    }
}

std::vector<double> EulerianSolver::quantum_term_rhs(const ExtendedDistribution& f, const EulerianFields& flds,
                                                     const PlasmaParams& params) const {
    const std::size_t n = f.grid().n;
    const std::size_t nvx = f.n_vx();
    const std::size_t nvy = f.n_vy();
    const std::size_t ns = f.n_s();
    const auto ns_i = static_cast<Eigen::Index>(ns);
    const double coef = params.mu_b() / params.mass() / (2.0 * f.vx().step);
    const auto& grad = basis_.gradient_operators();
    std::vector<double> out(f.data().size(), 0.0);
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3& db = flds.dB[i];
        if (db.isZero(0.0)) continue;
        const Eigen::MatrixXd D = db.x() * grad[0] + db.y() * grad[1] + db.z() * grad[2];
        const auto rows = static_cast<Eigen::Index>(nvx * nvy);
        Eigen::Map<const RowMat> F(f.data().data() + f.index(i, 0, 0, 0), rows, ns_i);
        const RowMat G = F * D.transpose();
        Eigen::Map<RowMat> Q(out.data() + f.index(i, 0, 0, 0), rows, ns_i);
        const auto blk = static_cast<Eigen::Index>(nvy);
        for (std::size_t a = 0; a < nvx; ++a) {
            for (std::size_t b = 0; b < nvy; ++b) {
                const auto r = static_cast<Eigen::Index>(a * nvy + b);
                Eigen::RowVectorXd d = Eigen::RowVectorXd::Zero(ns_i);
                if (a + 1 < nvx) d += G.row(r + blk);
                if (a > 0) d -= G.row(r - blk);
                Q.row(r) = coef * d;
            }
        }
    }
    return out;
}

const Eigen::MatrixXd& EulerianSolver::rotation(const Vec3& axis, double angle) const {
    const std::array<double, 4> key{axis.x(), axis.y(), axis.z(), angle};
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    Eigen::MatrixXd R = basis_.rotation_operator(axis, angle);
    std::lock_guard<std::mutex> lock(cache_mutex_);
    return cache_.emplace(key, std::move(R)).first->second;
}

void EulerianSolver::rotate_spin(ExtendedDistribution& f, const EulerianFields& flds, const PlasmaParams& params,
                                 double dt) const {
    const std::size_t n = f.grid().n;
    const auto rows = static_cast<Eigen::Index>(f.n_vx() * f.n_vy());
    const auto ns = static_cast<Eigen::Index>(f.n_s());
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const double rate = 2.0 * params.mu_b() / params.hbar();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        const double bn = flds.B[i].norm();
        if (bn == 0.0) continue;
        const Eigen::MatrixXd& R = rotation(flds.B[i] / bn, rate * bn * dt);
        Eigen::Map<RowMat> F(f.data().data() + f.index(i, 0, 0, 0), rows, ns);
        const RowMat out = F * R.transpose();
        F = out;
    }
}

}  // namespace spinkin::kinetic
