#include "spinkin/particles.hpp"

#include "spinkin/spectral.hpp"

#include <gsl/gsl_cdf.h>

#include <algorithm>
#include <cmath>
#include <string>

namespace spinkin::kinetic {

namespace {

constexpr std::size_t chunk_size = 8192;

double wrap(double x, double L) {
    double y = std::fmod(x, L);
    if (y < 0.0) y += L;
    if (y >= L) y -= L;
    return y;
}

double radical_inverse(std::size_t i, std::size_t base) {
    double inv = 1.0 / static_cast<double>(base);
    double f = inv;
    double r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return r;
}

// Linear shape: index of the left support point and weight of the right one.
struct Shape {
    std::size_t i0;
    std::size_t i1;
    double f;
};

Shape shape(double x, const Grid1D& g, double offset) {
    const double xi = x / g.dx() - offset;
    const double fl = std::floor(xi);
    const auto n = static_cast<long>(g.n);
    const long i = ((static_cast<long>(fl) % n) + n) % n;
    return {static_cast<std::size_t>(i), static_cast<std::size_t>((i + 1) % n), xi - fl};
}

double interp(const std::vector<double>& f, const Shape& s) { return (1.0 - s.f) * f[s.i0] + s.f * f[s.i1]; }

}  // namespace

void ParticleEnsemble::push_back(double xi, const Vec3& vi, const Vec3& si, double wi) {
    x.push_back(xi);
    v.push_back(vi);
    s.push_back(si);
    w.push_back(wi);
}

void ParticleEnsemble::validate(double spin_tol) const {
    const std::size_t n = x.size();
    if (v.size() != n || s.size() != n || w.size() != n) throw InvalidState("ParticleEnsemble: array size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(w[i] > 0.0)) throw InvalidState("ParticleEnsemble: non-positive weight at " + std::to_string(i));
        if (std::abs(s[i].norm() - 1.0) > spin_tol)
            throw InvalidState("ParticleEnsemble: spin is not a unit vector at " + std::to_string(i));
    }
}

double ParticleEnsemble::total_weight() const {
    double t = 0.0;
    for (double wi : w) t += wi;
    return t;
}

std::uint64_t CounterRng::mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double q_function_cosine(double F, double a) {
    if (std::abs(a) < 1e-12) return 2.0 * F - 1.0;
    // (a/4) u^2 + u/2 + (1/2 - a/4 - F) = 0
    const double disc = 0.25 - a * (0.5 - 0.25 * a - F);
    return (-0.5 + std::sqrt(std::max(disc, 0.0))) / (0.5 * a);
}

Vec3 fibonacci_direction(std::size_t j, std::size_t n) {
    const double golden = pi * (3.0 - std::sqrt(5.0));
    const double z = 1.0 - (2.0 * static_cast<double>(j) + 1.0) / static_cast<double>(n);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double ph = golden * static_cast<double>(j);
    return {r * std::cos(ph), r * std::sin(ph), z};
}

ParticleEnsemble load_particles(const LoadSpec& spec, const Grid1D& grid) {
    if (spec.count == 0) throw InvalidArgument("load_particles: need at least one particle");
    if (!(spec.density > 0)) throw InvalidArgument("load_particles: density must be positive");
    if (spec.spin_mode != "direction" && spec.spin_mode != "isotropic" && spec.spin_mode != "q_function")
        throw InvalidArgument("load_particles: unknown spin mode '" + spec.spin_mode + "'");
    if (spec.bloch.norm() > 1.0 + 1e-12) throw InvalidArgument("load_particles: Bloch vector longer than 1");
    const double L = grid.length;
    const std::size_t N = spec.count;
    const double weight = spec.density * L / static_cast<double>(N);
    const double k = two_pi * spec.mode / L;
    const CounterRng pos(spec.seed, 1), vel(spec.seed, 2), spin(spec.seed, 3);

    const Vec3 axis = spec.bloch.norm() > 0 ? Vec3(spec.bloch.normalized()) : Vec3(0, 0, 1);
    const Vec3 ref = std::abs(axis.x()) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
    const Vec3 e1 = axis.cross(ref).normalized();
    const Vec3 e2 = axis.cross(e1);

    ParticleEnsemble ens;
    ens.x.reserve(N);
    ens.v.reserve(N);
    ens.s.reserve(N);
    ens.w.reserve(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double x0 = spec.quiet ? (static_cast<double>(i) + 0.5) * L / static_cast<double>(N)
                                     : pos.uniform(i) * L;
        const double x = spec.amplitude != 0.0 ? wrap(x0 - spec.amplitude / k * std::sin(k * x0), L) : x0;

        Vec3 v = spec.drift;
        if (spec.v_thermal > 0.0) {
            for (int a = 0; a < 3; ++a) {
                static constexpr std::size_t bases[3] = {2, 3, 5};
                const double F = spec.quiet ? radical_inverse(i + 1, bases[a])
                                            : vel.uniform(3 * i + static_cast<std::size_t>(a));
                v[a] += spec.v_thermal * gsl_cdf_ugaussian_Pinv(std::clamp(F, 1e-15, 1.0 - 1e-15));
            }
        }

        Vec3 s;
        if (spec.spin_mode == "direction") {
            s = spec.spin_axis.normalized();
        } else if (spec.spin_mode == "isotropic") {
            s = spec.quiet ? fibonacci_direction(i, N)
                           : fibonacci_direction(static_cast<std::size_t>(spin.uniform(i) * static_cast<double>(N)), N);
        } else {
            const double F = spec.quiet ? radical_inverse(i + 1, 7) : spin.uniform(2 * i);
            const double ph = two_pi * (spec.quiet ? radical_inverse(i + 1, 11) : spin.uniform(2 * i + 1));
            const double u = std::clamp(q_function_cosine(F, spec.bloch.norm()), -1.0, 1.0);
            const double r = std::sqrt(std::max(0.0, 1.0 - u * u));
            s = u * axis + r * (std::cos(ph) * e1 + std::sin(ph) * e2);
        }
        ens.push_back(x, v, s.normalized(), weight);
    }
    return ens;
}

LocalFields gather(const fields::FieldState& fs, const fields::ExternalField& ext, double x) {
    const Grid1D& g = fs.grid;
    const Shape node = shape(x, g, 0.0);
    const Shape half = shape(x, g, 0.5);
    LocalFields lf;
    lf.E = Vec3(interp(fs.ex, half), interp(fs.ey, node), interp(fs.ez, node)) + ext.E(x);
    lf.B = Vec3(fs.bx, interp(fs.by, half), interp(fs.bz, half)) + ext.B(x);
    const double dx = g.dx();
    lf.dB = Vec3(0.0, (fs.by[half.i1] - fs.by[half.i0]) / dx, (fs.bz[half.i1] - fs.bz[half.i0]) / dx) + ext.dB(x);
    return lf;
}

void push_particles(ParticleEnsemble& ens, const fields::FieldState& fs, const fields::ExternalField& ext,
                    const PlasmaParams& params, double dt) {
    if (!(dt > 0)) throw InvalidArgument("push_particles: dt must be positive");
    const std::size_t n = ens.size();
    const double e = params.charge();
    const double m = params.mass();
    const double mu_b = params.mu_b();
    const double L = fs.grid.length;

    std::vector<LocalFields> lf(n);
    double bmax = 0.0;
#pragma omp parallel for schedule(static) reduction(max : bmax)
    for (std::size_t i = 0; i < n; ++i) {
        lf[i] = gather(fs, ext, ens.x[i]);
        bmax = std::max(bmax, lf[i].B.norm());
    }
    const double ratio = dt * e * bmax / m;
    if (ratio >= 0.5) throw StepRejected("push_particles: dt * omega_c = " + std::to_string(ratio) + " >= 0.5");

    const double qm = -e / m;
    const double spin_rate = 2.0 * mu_b / params.hbar();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        const LocalFields& f = lf[i];
        Vec3 v = ens.v[i];
        Vec3 s = ens.s[i];
        v.x() += 0.5 * dt * (-mu_b * f.dB.dot(s)) / m;
        const Vec3 vm = v + 0.5 * dt * qm * f.E;
        const Vec3 t = 0.5 * dt * qm * f.B;
        const Vec3 sb = 2.0 * t / (1.0 + t.squaredNorm());
        const Vec3 vp = vm + (vm + vm.cross(t)).cross(sb);
        v = vp + 0.5 * dt * qm * f.E;
        const double bn = f.B.norm();
        if (bn > 0.0) {
            s = rotate(s, f.B / bn, spin_rate * bn * dt);
            s /= s.norm();
        }
        v.x() += 0.5 * dt * (-mu_b * f.dB.dot(s)) / m;
        ens.v[i] = v;
        ens.s[i] = s;
        ens.x[i] = wrap(ens.x[i] + v.x() * dt, L);
    }
}

Sources deposit_sources(const ParticleEnsemble& ens, const Grid1D& grid, const PlasmaParams& params,
                        fields::CurlMethod method) {
    const std::size_t n = ens.size();
    const std::size_t nx = grid.n;
    const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
    // per chunk: rho, j (3), M (3)
    std::vector<std::vector<double>> buf(chunks, std::vector<double>());
#pragma omp parallel for schedule(static)
    for (std::size_t c = 0; c < chunks; ++c) {
        auto& b = buf[c];
        b.assign(7 * nx, 0.0);
        const std::size_t end = std::min(n, (c + 1) * chunk_size);
        for (std::size_t p = c * chunk_size; p < end; ++p) {
            const Shape sh = shape(ens.x[p], grid, 0.0);
            const double w0 = ens.w[p] * (1.0 - sh.f);
            const double w1 = ens.w[p] * sh.f;
            const double vals[7] = {1.0, ens.v[p].x(), ens.v[p].y(), ens.v[p].z(), ens.s[p].x(), ens.s[p].y(), ens.s[p].z()};
            for (std::size_t q = 0; q < 7; ++q) {
                b[q * nx + sh.i0] += w0 * vals[q];
                b[q * nx + sh.i1] += w1 * vals[q];
            }
        }
    }
    std::vector<double> acc(7 * nx, 0.0);
    for (const auto& b : buf)
        for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += b[j];

    const double e = params.charge();
    const double mfac = -3.0 * params.mu_b();
    const double inv = 1.0 / grid.dx();
    Sources s;
    s.rho.resize(nx);
    s.j_free.assign(nx, Vec3::Zero());
    s.M.assign(nx, Vec3::Zero());
    for (std::size_t i = 0; i < nx; ++i) {
        s.rho[i] = -e * acc[i] * inv;
        s.j_free[i] = -e * inv * Vec3(acc[nx + i], acc[2 * nx + i], acc[3 * nx + i]);
        s.M[i] = mfac * inv * Vec3(acc[4 * nx + i], acc[5 * nx + i], acc[6 * nx + i]);
    }
    s.j_bound = fields::curl_magnetization(s.M, grid, method);
    return s;
}

std::vector<double> deposit_charge(const ParticleEnsemble& ens, const Grid1D& grid, const PlasmaParams& params) {
    const std::size_t n = ens.size();
    const std::size_t nx = grid.n;
    const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
    std::vector<std::vector<double>> buf(chunks);
#pragma omp parallel for schedule(static)
    for (std::size_t c = 0; c < chunks; ++c) {
        buf[c].assign(nx, 0.0);
        const std::size_t end = std::min(n, (c + 1) * chunk_size);
        for (std::size_t p = c * chunk_size; p < end; ++p) {
            const Shape sh = shape(ens.x[p], grid, 0.0);
            buf[c][sh.i0] += ens.w[p] * (1.0 - sh.f);
            buf[c][sh.i1] += ens.w[p] * sh.f;
        }
    }
    std::vector<double> rho(nx, 0.0);
    for (const auto& b : buf)
        for (std::size_t i = 0; i < nx; ++i) rho[i] += b[i];
    const double f = -params.charge() / grid.dx();
    for (auto& r : rho) r *= f;
    return rho;
}

std::vector<double> charge_conserving_jx(const std::vector<double>& rho_old, const std::vector<double>& rho_new,
                                         double mean_jx, const Grid1D& grid, double dt) {
    const std::size_t n = grid.n;
    if (rho_old.size() != n || rho_new.size() != n) throw InvalidArgument("charge_conserving_jx: size mismatch");
    std::vector<double> j(n);
    double run = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        run -= grid.dx() * (rho_new[i] - rho_old[i]) / dt;
        j[i] = run;
    }
    double mean = 0.0;
    for (double x : j) mean += x;
    mean /= static_cast<double>(n);
    for (auto& x : j) x += mean_jx - mean;
    return j;
}

ParticleDiagnostics particle_diagnostics(const ParticleEnsemble& ens, const fields::FieldState& fs,
                                         const fields::ExternalField& ext, const PlasmaParams& params) {
    ParticleDiagnostics d{0.0, 0.0, 0.0, 0.0, 0.0, Vec3::Zero()};
    const double m = params.mass();
    for (std::size_t i = 0; i < ens.size(); ++i) {
        const double w = ens.w[i];
        const Vec3 B = gather(fs, ext, ens.x[i]).B;
        d.total_charge -= params.charge() * w;
        d.kinetic_energy += 0.5 * m * w * ens.v[i].squaredNorm();
        d.zeeman_energy_force += params.mu_b() * w * ens.s[i].dot(B);
        d.spin_norm_deviation = std::max(d.spin_norm_deviation, std::abs(ens.s[i].norm() - 1.0));
        d.momentum += m * w * ens.v[i];
    }
    d.zeeman_energy_moment = 3.0 * d.zeeman_energy_force;
    return d;
}

}  // namespace spinkin::kinetic
