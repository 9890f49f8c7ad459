#include "spinkin/madelung_fluid.hpp"

#include "spinkin/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace spinkin::fluid {

namespace {

std::vector<double> d(const std::vector<double>& f, const Grid1D& g, int order = 1) {
    return spectral::derivative(std::span<const double>(f), g, order);
}

Vec3Field d(const Vec3Field& f, const Grid1D& g) {
    Vec3Field out(f.size(), Vec3::Zero());
    std::vector<double> c(f.size());
    for (int a = 0; a < 3; ++a) {
        for (std::size_t i = 0; i < f.size(); ++i) c[i] = f[i][a];
        const auto dc = d(c, g);
        for (std::size_t i = 0; i < f.size(); ++i) out[i][a] = dc[i];
    }
    return out;
}

// exp(-36 (|k|/k_max)^36) applied in Fourier space
void smooth_filter(std::vector<double>& f) {
    const std::size_t n = f.size();
    std::vector<cplx> z(f.begin(), f.end());
    auto spec = spectral::fft(z);
    for (std::size_t j = 0; j < n; ++j) {
        const double m = static_cast<double>(j <= n / 2 ? j : n - j);
        spec[j] *= std::exp(-36.0 * std::pow(m / (0.5 * static_cast<double>(n)), 36));
    }
    const auto back = spectral::ifft(spec);
    for (std::size_t j = 0; j < n; ++j) f[j] = back[j].real();
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

void check_floor(const std::vector<double>& n, double floor) {
    const double lim = floor * max_of(n);
    for (std::size_t i = 0; i < n.size(); ++i)
        if (!(n[i] >= lim) || n[i] <= 0.0)
            throw StepRejected("fluid: density " + std::to_string(n[i]) + " below floor at index " + std::to_string(i));
}

FluidState axpy(const FluidState& s, const FluidRhs& k, double h) {
    FluidState out = s;
    for (std::size_t i = 0; i < s.n.size(); ++i) {
        out.n[i] += h * k.dn[i];
        out.u[i] += h * k.du[i];
    }
    return out;
}

FluidState rk4(const FluidState& s, const PotentialFn& phi, const PlasmaParams& params, double dt, double floor) {
    if (!(dt > 0)) throw InvalidArgument("step_fluid: dt must be positive");
    const auto k1 = fluid_rhs(s, phi(s), params, floor);
    const auto s2 = axpy(s, k1, 0.5 * dt);
    const auto k2 = fluid_rhs(s2, phi(s2), params, floor);
    const auto s3 = axpy(s, k2, 0.5 * dt);
    const auto k3 = fluid_rhs(s3, phi(s3), params, floor);
    const auto s4 = axpy(s, k3, dt);
    const auto k4 = fluid_rhs(s4, phi(s4), params, floor);
    FluidState out = s;
    for (std::size_t i = 0; i < s.n.size(); ++i) {
        out.n[i] += dt / 6.0 * (k1.dn[i] + 2.0 * k2.dn[i] + 2.0 * k3.dn[i] + k4.dn[i]);
        out.u[i] += dt / 6.0 * (k1.du[i] + 2.0 * k2.du[i] + 2.0 * k3.du[i] + k4.du[i]);
    }
    return out;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

FluidState::FluidState(Grid1D g, std::vector<double> n_, std::vector<double> u_)
    : grid(g), n(std::move(n_)), u(std::move(u_)) {
    if (n.size() != grid.n || u.size() != grid.n) throw InvalidArgument("FluidState: size mismatch");
    for (double x : n)
        if (x < 0.0) throw InvalidState("FluidState: negative density");
}

double FluidState::mass() const { return spectral::integrate(n, grid); }

std::vector<double> bohm_acceleration(const std::vector<double>& n, const Grid1D& grid, const PlasmaParams& params) {
    std::vector<double> r(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) r[i] = std::sqrt(n[i]);
    const auto r2 = d(r, grid, 2);
    std::vector<double> q(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) q[i] = r2[i] / r[i];
    auto dq = d(q, grid);
    const double h = params.hbar();
    const double m = params.mass();
    for (auto& x : dq) x *= h * h / (2.0 * m * m);
    return dq;
}

FluidRhs fluid_rhs(const FluidState& s, const std::vector<double>& phi, const PlasmaParams& params, double floor) {
    if (phi.size() != s.grid.n) throw InvalidArgument("fluid_rhs: potential size mismatch");
    check_floor(s.n, floor);
    const std::size_t n = s.grid.n;
    std::vector<double> flux(n);
    for (std::size_t i = 0; i < n; ++i) flux[i] = s.n[i] * s.u[i];
    FluidRhs out;
    out.dn = d(flux, s.grid);
    for (auto& x : out.dn) x = -x;
    const auto du = d(s.u, s.grid);
    const auto dphi = d(phi, s.grid);
    const auto bohm = bohm_acceleration(s.n, s.grid, params);
    const double em = params.charge() / params.mass();
    out.du.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.du[i] = -s.u[i] * du[i] + em * dphi[i] + bohm[i];
    smooth_filter(out.dn);
    smooth_filter(out.du);
    return out;
}

FluidState step_fluid(const FluidState& state, const std::vector<double>& phi, const PlasmaParams& params,
                      double dt, double floor) {
    return rk4(state, [&phi](const FluidState&) { return phi; }, params, dt, floor);
}

FluidState step_fluid(const FluidState& state, const PotentialFn& phi, const PlasmaParams& params, double dt,
                      double floor) {
    return rk4(state, phi, params, dt, floor);
}

Vec3Field spin_effective_field(const Vec3Field& s, const std::vector<double>& n, const Vec3Field& B,
                               const Grid1D& grid, const PlasmaParams& params, double floor) {
    if (s.size() != grid.n || n.size() != grid.n || B.size() != grid.n)
        throw InvalidArgument("spin_density_rhs: size mismatch");
    const double half = params.hbar() / 2.0;
    const double lim = floor * max_of(n);
    for (std::size_t i = 0; i < grid.n; ++i)
        if (n[i] >= lim && std::abs(s[i].norm() - half) > 1e-10 * half)
            throw InvalidState("spin_density_rhs: |s| differs from hbar/2 at index " + std::to_string(i));
    const auto ds = d(s, grid);
    Vec3Field nds(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) nds[i] = n[i] * ds[i];
    const auto dnds = d(nds, grid);
    const double zeeman = 2.0 * params.mu_b() / params.hbar();
    Vec3Field out(grid.n, Vec3::Zero());
    for (std::size_t i = 0; i < grid.n; ++i) {
        if (n[i] < lim) continue;
        out[i] = zeeman * B[i] - dnds[i] / (params.mass() * n[i]);
    }
    return out;
}

Vec3Field spin_density_rhs(const Vec3Field& s, const std::vector<double>& n, const Vec3Field& B,
                           const Grid1D& grid, const PlasmaParams& params, double floor) {
    const auto om = spin_effective_field(s, n, B, grid, params, floor);
    Vec3Field out(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) out[i] = om[i].cross(s[i]);
    return out;
}

Vec3Field step_spin_density(const Vec3Field& s, const std::vector<double>& n, const Vec3Field& B,
                            const Grid1D& grid, const PlasmaParams& params, double dt, double floor) {
    auto rotate_all = [&](const Vec3Field& base, const Vec3Field& om, double h) {
        Vec3Field out = base;
        for (std::size_t i = 0; i < base.size(); ++i) {
            const double w = om[i].norm();
            if (w > 0.0) out[i] = rotate(base[i], om[i] / w, w * h);
        }
        return out;
    };
    const auto om0 = spin_effective_field(s, n, B, grid, params, floor);
    const auto mid = rotate_all(s, om0, 0.5 * dt);
    const auto om1 = spin_effective_field(mid, n, B, grid, params, floor);
    return rotate_all(s, om1, dt);
}

WavefunctionEnsemble::WavefunctionEnsemble(std::vector<SpinorField> m, std::vector<double> p)
    : members(std::move(m)), probabilities(std::move(p)) {
    if (members.empty() || members.size() != probabilities.size())
        throw InvalidArgument("WavefunctionEnsemble: need one probability per member");
    double sum = 0.0;
    for (double x : probabilities) {
        if (x < 0.0) throw InvalidArgument("WavefunctionEnsemble: negative probability");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw InvalidArgument("WavefunctionEnsemble: probabilities must sum to 1");
    for (const auto& mem : members) {
        if (!(mem.grid == members.front().grid)) throw InvalidArgument("WavefunctionEnsemble: members on mismatched grids");
        if (!mem.is_normalized(1e-10)) throw InvalidState("WavefunctionEnsemble: member not normalized");
    }
}

FluidMoments ensemble_moments(const WavefunctionEnsemble& ens, const oracle::ExternalPotentials& pot,
                              const PlasmaParams& params) {
    for (const auto& mem : ens.members)
        if (!(mem.grid == ens.grid())) throw InvalidArgument("ensemble_moments: members on mismatched grids");
    const Grid1D& g = ens.grid();
    const std::size_t N = g.n;
    const std::size_t M = ens.members.size();
    const double m = params.mass();
    const double h = params.hbar();

    std::vector<oracle::Observables> obs(M);
    std::vector<Vec3Field> ds(M);
    std::vector<std::vector<double>> qf(M);
#pragma omp parallel for schedule(static)
    for (std::size_t a = 0; a < M; ++a) {
        obs[a] = oracle::spinor_observables(ens.members[a], pot, params);
        ds[a] = d(obs[a].s, g);
        // n_a (hbar^2/2m) dQ_a
        std::vector<double> r(N);
        for (std::size_t i = 0; i < N; ++i) r[i] = std::sqrt(obs[a].n[i]);
        const auto r2 = d(r, g, 2);
        std::vector<double> q(N);
        for (std::size_t i = 0; i < N; ++i) q[i] = obs[a].valid[i] ? r2[i] / r[i] : 0.0;
        const auto dq = d(q, g);
        qf[a].resize(N);
        for (std::size_t i = 0; i < N; ++i) qf[a][i] = obs[a].n[i] * h * h / (2.0 * m) * dq[i];
    }

    FluidMoments fm;
    fm.n.assign(N, 0.0);
    fm.v.assign(N, Vec3::Zero());
    fm.S.assign(N, Vec3::Zero());
    fm.quantum_force.assign(N, 0.0);
    for (std::size_t a = 0; a < M; ++a) {
        const double P = ens.probabilities[a];
        for (std::size_t i = 0; i < N; ++i) {
            fm.n[i] += P * obs[a].n[i];
            fm.v[i] += P * obs[a].n[i] * obs[a].v[i];
            fm.S[i] += P * obs[a].n[i] * obs[a].s[i];
            fm.quantum_force[i] += P * qf[a][i];
        }
    }
    for (std::size_t i = 0; i < N; ++i) {
        if (fm.n[i] > 0.0) {
            fm.v[i] /= fm.n[i];
            fm.S[i] /= fm.n[i];
        }
    }

    const auto dS = d(fm.S, g);
    fm.p.assign(N, 0.0);
    fm.second_moment.assign(N, 0.0);
    fm.K.assign(N, Vec3::Zero());
    fm.sigma.assign(N, 0.0);
    fm.sigma_tilde.assign(N, 0.0);
    fm.mean_dev_gradient.assign(N, Vec3::Zero());
    Vec3Field fluct_sum(N, Vec3::Zero());
    std::size_t masked = 0;
    for (std::size_t a = 0; a < M; ++a) {
        const double P = ens.probabilities[a];
        Vec3Field nds(N);
        for (std::size_t i = 0; i < N; ++i) nds[i] = obs[a].n[i] * ds[a][i];
        const auto dnds = d(nds, g);
        for (std::size_t i = 0; i < N; ++i) {
            const double na = obs[a].n[i];
            if (!obs[a].valid[i]) {
                ++masked;
                continue;
            }
            const Vec3 w = obs[a].v[i] - fm.v[i];
            const Vec3 dev = obs[a].s[i] - fm.S[i];
            const Vec3 ddev = ds[a][i] - dS[i];
            fm.p[i] += m * P * na * w.squaredNorm();
            fm.second_moment[i] += P * na * w.x() * w.x();
            fm.K[i] += P * na * w.x() * dev;
            fm.sigma_tilde[i] += P * na * ddev.squaredNorm();
            fm.mean_dev_gradient[i] += P * na * ddev;
            fluct_sum[i] += P * dev.cross(dnds[i]);
        }
    }
    fm.masked_fraction = static_cast<double>(masked) / static_cast<double>(N * M);
    fm.sigma_cross.assign(N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        if (fm.n[i] > 0.0) {
            fm.sigma_tilde[i] /= fm.n[i];
            fm.mean_dev_gradient[i] /= fm.n[i];
        }
        fm.sigma[i] = dS[i].squaredNorm();
        fm.sigma_cross[i] = 2.0 * dS[i].dot(fm.mean_dev_gradient[i]);
    }

    // spin force, x-component
    const double zeeman = 2.0 * params.mu_b() / h;
    const auto dB = d(pot.B, g);
    std::vector<double> t2(N), t3(N);
    for (std::size_t i = 0; i < N; ++i) {
        t2[i] = fm.n[i] * (fm.sigma[i] + fm.sigma_tilde[i]);
        t3[i] = fm.n[i] * fm.sigma_cross[i];
    }
    const auto dt2 = d(t2, g);
    const auto dt3 = d(t3, g);
    fm.f_spin_zeeman.resize(N);
    fm.f_spin_gradient.resize(N);
    fm.f_spin_cross.resize(N);
    fm.f_spin.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        fm.f_spin_zeeman[i] = -zeeman * fm.n[i] * dB[i].dot(fm.S[i]);
        fm.f_spin_gradient[i] = -dt2[i] / m;
        fm.f_spin_cross[i] = -dt3[i] / m;
        fm.f_spin[i] = fm.f_spin_zeeman[i] + fm.f_spin_gradient[i] + fm.f_spin_cross[i];
    }

    Vec3Field ndS(N), ndev(N);
    for (std::size_t i = 0; i < N; ++i) {
        ndS[i] = fm.n[i] * dS[i];
        ndev[i] = fm.n[i] * fm.mean_dev_gradient[i];
    }
    const auto dndS = d(ndS, g);
    const auto dndev = d(ndev, g);
    fm.omega_mean.resize(N);
    fm.omega_mixed.resize(N);
    fm.omega_fluct.resize(N);
    fm.omega_spin.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        fm.omega_mean[i] = fm.S[i].cross(dndS[i]) / m;
        fm.omega_mixed[i] = fm.S[i].cross(dndev[i]) / m;
        fm.omega_fluct[i] = fluct_sum[i] / m;
        fm.omega_spin[i] = fm.omega_mean[i] + fm.omega_mixed[i] + fm.omega_fluct[i];
    }

    const auto bohm = bohm_acceleration(fm.n, g, params);
    fm.quantum_force_closure.resize(N);
    for (std::size_t i = 0; i < N; ++i) fm.quantum_force_closure[i] = m * fm.n[i] * bohm[i];
    return fm;
}

double ResidualSeries::max_continuity() const {
    double r = 0.0;
    for (const auto& v : continuity) r = std::max(r, max_abs(v));
    return r;
}

double ResidualSeries::max_momentum() const {
    double r = 0.0;
    for (const auto& v : momentum) r = std::max(r, max_abs(v));
    return r;
}

double ResidualSeries::max_spin() const {
    double r = 0.0;
    for (const auto& f : spin)
        for (const auto& v : f) r = std::max(r, v.cwiseAbs().maxCoeff());
    return r;
}

ResidualSeries averaged_equation_residual(const std::vector<WavefunctionEnsemble>& trajectory, double cadence,
                                          const oracle::ExternalPotentials& pot, const PlasmaParams& params) {
    if (trajectory.size() < 3) throw InvalidArgument("averaged_equation_residual: need at least 3 time levels");
    if (!(cadence > 0)) throw InvalidArgument("averaged_equation_residual: cadence must be positive");
    const Grid1D& g = trajectory.front().grid();
    const std::size_t N = g.n;
    const double m = params.mass();
    const double e = params.charge();
    const double zeeman = 2.0 * params.mu_b() / params.hbar();

    std::vector<FluidMoments> mom;
    mom.reserve(trajectory.size());
    for (const auto& ens : trajectory) mom.push_back(ensemble_moments(ens, pot, params));

    ResidualSeries out;
    for (std::size_t k = 1; k + 1 < trajectory.size(); ++k) {
        const auto& c = mom[k];
        const auto& prev = mom[k - 1];
        const auto& next = mom[k + 1];
        const double inv = 1.0 / (2.0 * cadence);

        std::vector<double> nv(N), vx(N), p(N);
        Vec3Field Kx(N);
        for (std::size_t i = 0; i < N; ++i) {
            nv[i] = c.n[i] * c.v[i].x();
            vx[i] = c.v[i].x();
            p[i] = c.p[i];
            Kx[i] = c.K[i];
        }
        const auto dnv = d(nv, g);
        const auto dvx = d(vx, g);
        const auto dp = d(p, g);
        const auto dS = d(c.S, g);
        const auto dK = d(Kx, g);

        std::vector<double> rc(N), rm(N);
        Vec3Field rs(N);
        for (std::size_t i = 0; i < N; ++i) {
            rc[i] = (next.n[i] - prev.n[i]) * inv + dnv[i];

            const double dtv = (next.v[i].x() - prev.v[i].x()) * inv;
            const Vec3 lorentz = -e * c.n[i] * (pot.E[i] + c.v[i].cross(pot.B[i]));
            rm[i] = m * c.n[i] * (dtv + c.v[i].x() * dvx[i]) -
                    (lorentz.x() - dp[i] + c.quantum_force[i] + c.f_spin[i]);

            const Vec3 dtS = (next.S[i] - prev.S[i]) * inv;
            rs[i] = c.n[i] * (dtS + c.v[i].x() * dS[i]) -
                    (zeeman * c.n[i] * pot.B[i].cross(c.S[i]) - dK[i] + c.omega_spin[i]);
        }
        out.times.push_back(static_cast<double>(k) * cadence);
        out.continuity.push_back(std::move(rc));
        out.momentum.push_back(std::move(rm));
        out.spin.push_back(std::move(rs));
    }
    return out;
}

}  // namespace spinkin::fluid
