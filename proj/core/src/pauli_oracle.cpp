#include "spinkin/pauli_oracle.hpp"

#include "spinkin/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace spinkin::oracle {

namespace {

std::vector<double> or_zeros(std::vector<double> v, std::size_t n, const char* what) {
    if (v.empty()) return std::vector<double>(n, 0.0);
    if (v.size() != n) throw InvalidArgument(std::string("ExternalPotentials: ") + what + " size mismatch");
    return v;
}

void check_grid(const SpinorField& s, const ExternalPotentials& pot) {
    if (!(s.grid == pot.grid)) throw InvalidArgument("pauli: state and potentials live on different grids");
}

// exp(-i t (V + mu_B B.sigma)/hbar) applied at one node
void local_propagate(cplx& up, cplx& dn, double V, const Vec3& B, double mu_b, double hbar, double t) {
    const cplx ph = std::exp(cplx(0.0, -V * t / hbar));
    const double bmag = B.norm();
    if (bmag == 0.0) {
        up *= ph;
        dn *= ph;
        return;
    }
    const double th = mu_b * bmag * t / hbar;
    const Vec3 b = B / bmag;
    const double c = std::cos(th);
    const double s = std::sin(th);
    // cos th - i sin th (b.sigma)
    const cplx m00(c, -s * b.z());
    const cplx m11(c, s * b.z());
    const cplx m01 = cplx(0.0, -s) * cplx(b.x(), -b.y());
    const cplx m10 = cplx(0.0, -s) * cplx(b.x(), b.y());
    const cplx u = up;
    const cplx d = dn;
    up = ph * (m00 * u + m01 * d);
    dn = ph * (m10 * u + m11 * d);
}

std::vector<double> local_potential(const ExternalPotentials& pot, const PlasmaParams& params) {
    const double e = params.charge();
    const double m = params.mass();
    std::vector<double> V(pot.grid.n);
    for (std::size_t i = 0; i < V.size(); ++i)
        V[i] = -e * pot.phi[i] + e * e * (pot.A[1][i] * pot.A[1][i] + pot.A[2][i] * pot.A[2][i]) / (2.0 * m);
    return V;
}

}  // namespace

ExternalPotentials ExternalPotentials::none(const Grid1D& grid) {
    return from_vector_potential(grid, {}, {});
}

ExternalPotentials ExternalPotentials::from_vector_potential(const Grid1D& grid, std::vector<double> phi,
                                                             std::array<std::vector<double>, 3> A) {
    ExternalPotentials p;
    p.grid = grid;
    p.phi = or_zeros(std::move(phi), grid.n, "phi");
    for (std::size_t a = 0; a < 3; ++a) p.A[a] = or_zeros(std::move(A[a]), grid.n, "A");
    const auto day = spectral::derivative(p.A[1], grid);
    const auto daz = spectral::derivative(p.A[2], grid);
    const auto dphi = spectral::derivative(p.phi, grid);
    p.B.assign(grid.n, Vec3::Zero());
    p.E.assign(grid.n, Vec3::Zero());
    for (std::size_t i = 0; i < grid.n; ++i) {
        p.B[i] = Vec3(0.0, -daz[i], day[i]);
        p.E[i] = Vec3(-dphi[i], 0.0, 0.0);
    }
    return p;
}

ExternalPotentials ExternalPotentials::direct(const Grid1D& grid, std::vector<double> phi, Vec3Field B) {
    ExternalPotentials p = from_vector_potential(grid, std::move(phi), {});
    if (B.size() != grid.n) throw InvalidArgument("ExternalPotentials: B size mismatch");
    p.B = std::move(B);
    p.direct_b = true;
    return p;
}

bool ExternalPotentials::coulomb_gauge(double tol) const {
    if (A[0].empty()) return true;
    const auto [lo, hi] = std::minmax_element(A[0].begin(), A[0].end());
    return *hi - *lo <= tol * std::max(1.0, std::abs(*hi));
}

std::array<cplx, 2> spin_orientation(double theta, double phi) {
    return {cplx(std::cos(theta / 2.0), 0.0), std::exp(cplx(0.0, phi)) * std::sin(theta / 2.0)};
}

SpinorField init_state(const std::string& family, const InitParams& p, const Grid1D& grid,
                       const PlasmaParams& params) {
    const double hbar = params.hbar();
    const double L = grid.length;
    auto packet = [&](double x0, double p0) {
        if (!(p.width > 0)) throw InvalidArgument("init_state: width must be positive");
        std::vector<cplx> f(grid.n, 0.0);
        const double norm = std::pow(pi * p.width * p.width, -0.25);
        const int images = static_cast<int>(std::ceil(10.0 * p.width / L)) + 1;
        for (std::size_t i = 0; i < grid.n; ++i) {
            const double x = grid.x(i);
            for (int j = -images; j <= images; ++j) {
                const double y = x - x0 + j * L;
                f[i] += norm * std::exp(-y * y / (2.0 * p.width * p.width)) * std::exp(cplx(0.0, p0 * y / hbar));
            }
            f[i] *= std::exp(cplx(0.0, p0 * x0 / hbar));
        }
        return f;
    };

    std::vector<cplx> base;
    if (family == "gaussian") {
        base = packet(p.x0, p.p0);
    } else if (family == "plane_wave") {
        const double q = p.p0 * L / (two_pi * hbar);
        if (std::abs(q - std::round(q)) > 1e-9)
            throw InvalidArgument("init_state: plane-wave momentum is not commensurate with the box");
        base.resize(grid.n);
        for (std::size_t i = 0; i < grid.n; ++i) base[i] = std::exp(cplx(0.0, p.p0 * grid.x(i) / hbar));
    } else if (family == "superposition") {
        auto a = packet(p.x0 - p.separation / 2.0, -p.p0);
        const auto b = packet(p.x0 + p.separation / 2.0, p.p0);
        for (std::size_t i = 0; i < grid.n; ++i) a[i] += b[i];
        base = std::move(a);
    } else {
        throw InvalidArgument("init_state: unknown family '" + family + "'");
    }
    const auto chi = spin_orientation(p.theta, p.phi);
    std::vector<cplx> up(grid.n), dn(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        up[i] = chi[0] * base[i];
        dn[i] = chi[1] * base[i];
    }
    return SpinorField(grid, std::move(up), std::move(dn)).normalized();
}

SpinorField step_pauli(const SpinorField& state, const ExternalPotentials& pot, const PlasmaParams& params,
                       double dt) {
    if (!(dt > 0)) throw InvalidArgument("step_pauli: dt must be positive");
    check_grid(state, pot);
    if (!pot.coulomb_gauge()) throw InvalidArgument("step_pauli: A_x must be uniform (Coulomb gauge)");
    const double hbar = params.hbar();
    const double m = params.mass();
    const double e = params.charge();
    const double ax = pot.uniform_ax();
    const auto k = spectral::wavenumbers(state.grid);
    double max_phase = 0.0;
    for (double kk : k) {
        const double q = hbar * kk + e * ax;
        max_phase = std::max(max_phase, q * q * dt / (2.0 * m * hbar));
    }
    if (max_phase > pi)
        throw StepRejected("step_pauli: kinetic phase per step " + std::to_string(max_phase) +
                           " exceeds pi at the grid's maximum wavenumber");

    const auto V = local_potential(pot, params);
    const double mu_b = params.mu_b();
    SpinorField out = state;
    auto half_local = [&]() {
        for (std::size_t i = 0; i < out.grid.n; ++i)
            local_propagate(out.up[i], out.down[i], V[i], pot.B[i], mu_b, hbar, 0.5 * dt);
    };
    half_local();
    for (auto* comp : {&out.up, &out.down}) {
        auto spec = spectral::fft(*comp);
        for (std::size_t j = 0; j < spec.size(); ++j) {
            const double q = hbar * k[j] + e * ax;
            spec[j] *= std::exp(cplx(0.0, -q * q * dt / (2.0 * m * hbar)));
        }
        *comp = spectral::ifft(spec);
    }
    half_local();
    return out;
}

SpinorField propagate(SpinorField state, const ExternalPotentials& pot, const PlasmaParams& params, double dt,
                      std::size_t steps) {
    for (std::size_t s = 0; s < steps; ++s) state = step_pauli(state, pot, params, dt);
    return state;
}

double Observables::masked_fraction() const {
    if (valid.empty()) return 0.0;
    const auto bad = std::count(valid.begin(), valid.end(), 0);
    return static_cast<double>(bad) / static_cast<double>(valid.size());
}

Observables spinor_observables(const SpinorField& state, const ExternalPotentials& pot,
                               const PlasmaParams& params) {
    check_grid(state, pot);
    const std::size_t n = state.grid.n;
    const double hbar = params.hbar();
    const double m = params.mass();
    const double e = params.charge();
    const auto dup = spectral::derivative(std::span<const cplx>(state.up), state.grid);
    const auto ddn = spectral::derivative(std::span<const cplx>(state.down), state.grid);

    Observables o;
    o.n.resize(n);
    o.v.assign(n, Vec3::Zero());
    o.s.assign(n, Vec3::Zero());
    o.valid.assign(n, 1);
    for (std::size_t i = 0; i < n; ++i) o.n[i] = std::norm(state.up[i]) + std::norm(state.down[i]);
    const double floor = 1e-12 * *std::max_element(o.n.begin(), o.n.end());
    for (std::size_t i = 0; i < n; ++i) {
        const double ni = o.n[i];
        if (ni < floor) {
            o.valid[i] = 0;
            continue;
        }
        const cplx u = state.up[i];
        const cplx d = state.down[i];
        const double jx = (std::conj(u) * cplx(0.0, -hbar) * dup[i] + std::conj(d) * cplx(0.0, -hbar) * ddn[i]).real() +
                          e * pot.A[0][i] * ni;
        o.v[i] = Vec3(jx / (m * ni), e * pot.A[1][i] / m, e * pot.A[2][i] / m);
        const cplx ud = std::conj(u) * d;
        o.s[i] = 0.5 * hbar / ni * Vec3(2.0 * ud.real(), 2.0 * ud.imag(), std::norm(u) - std::norm(d));
    }
    return o;
}

double energy(const SpinorField& state, const ExternalPotentials& pot, const PlasmaParams& params) {
    check_grid(state, pot);
    const double hbar = params.hbar();
    const double m = params.mass();
    const double e = params.charge();
    const double ax = pot.uniform_ax();
    const auto k = spectral::wavenumbers(state.grid);
    const double dx = state.grid.dx();
    const auto nn = static_cast<double>(state.grid.n);
    double kin = 0.0;
    for (const auto* comp : {&state.up, &state.down}) {
        const auto spec = spectral::fft(*comp);
        for (std::size_t j = 0; j < spec.size(); ++j) {
            const double q = hbar * k[j] + e * ax;
            kin += std::norm(spec[j]) * q * q / (2.0 * m);
        }
    }
    kin *= dx / nn;
    const auto V = local_potential(pot, params);
    double loc = 0.0;
    for (std::size_t i = 0; i < state.grid.n; ++i) {
        const cplx u = state.up[i];
        const cplx d = state.down[i];
        const cplx ud = std::conj(u) * d;
        const Vec3 sig(2.0 * ud.real(), 2.0 * ud.imag(), std::norm(u) - std::norm(d));
        loc += V[i] * (std::norm(u) + std::norm(d)) + params.mu_b() * pot.B[i].dot(sig);
    }
    return kin + loc * dx;
}

Vec3 mean_sigma(const SpinorField& state) {
    Vec3 s = Vec3::Zero();
    for (std::size_t i = 0; i < state.grid.n; ++i) {
        const cplx ud = std::conj(state.up[i]) * state.down[i];
        s += Vec3(2.0 * ud.real(), 2.0 * ud.imag(), std::norm(state.up[i]) - std::norm(state.down[i]));
    }
    return s * state.grid.dx();
}

}  // namespace spinkin::oracle
