#include "spinkin/acceptance.hpp"

#include "spinkin/diagnostics.hpp"
#include "spinkin/eulerian.hpp"
#include "spinkin/full_equation.hpp"
#include "spinkin/gauge.hpp"
#include "spinkin/madelung_fluid.hpp"
#include "spinkin/particles.hpp"
#include "spinkin/pauli_oracle.hpp"
#include "spinkin/quantum_transforms.hpp"
#include "spinkin/scenarios.hpp"
#include "spinkin/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

namespace spinkin::acceptance {

namespace {

// Collects measured values and whether each met its bound.
class Probe {
public:
    void below(const std::string& label, double value, double bound) { add(label, value, value < bound, "<", bound); }
    void at_most(const std::string& label, double value, double bound) { add(label, value, value <= bound, "<=", bound); }
    void above(const std::string& label, double value, double bound) { add(label, value, value > bound, ">", bound); }
    void at_least(const std::string& label, double value, double bound) { add(label, value, value >= bound, ">=", bound); }
    void within(const std::string& label, double value, double target, double tol) {
        char buf[160];
        const bool ok = std::abs(value - target) <= tol;
        std::snprintf(buf, sizeof buf, "%s %.4g (%.4g +- %.3g)", label.c_str(), value, target, tol);
        append(buf, ok);
    }
    bool ok() const { return ok_; }
    const std::string& text() const { return text_; }

private:
    void add(const std::string& label, double value, bool ok, const char* op, double bound) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s %.3g %s %.3g", label.c_str(), value, op, bound);
        append(buf, ok);
    }
    void append(const std::string& s, bool ok) {
        if (!text_.empty()) text_ += "; ";
        text_ += s;
        if (!ok) text_ += " [x]";
        ok_ = ok_ && ok;
    }
    bool ok_ = true;
    std::string text_;
};

double slope(const std::vector<double>& x, const std::vector<double>& y) { return diagnostics::loglog_slope(x, y); }

// 1. Random density matrices through the spin Q-transform and back.
void spin_transform(Probe& pr) {
    std::mt19937_64 rng(20240611);
    std::normal_distribution<double> nd;
    const SphereQuadrature quad;
    double rec = 0.0, qmin = 1.0, closed = 0.0;
    for (int t = 0; t < 1000; ++t) {
        Mat2c a;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) a(i, j) = cplx(nd(rng), nd(rng));
        if (t % 10 == 0) a.col(1).setZero();
        Mat2c rho = a * a.adjoint();
        rho /= rho.trace().real();
        const auto f = transforms::spin_q_transform(rho, quad);
        const Vec3 r(2.0 * rho(0, 1).real(), -2.0 * rho(0, 1).imag(), (rho(0, 0) - rho(1, 1)).real());
        for (std::size_t j = 0; j < quad.size(); ++j) {
            qmin = std::min(qmin, f.values[j]);
            closed = std::max(closed, std::abs(f.values[j] - (1.0 + r.dot(quad.direction(j))) / (4.0 * pi)));
        }
        const auto m = transforms::spin_moments_and_reconstruct(f);
        rec = std::max(rec, (m.rho - rho).cwiseAbs().maxCoeff());
    }
    pr.below("reconstruction error", rec, 1e-12);
    pr.at_least("Q minimum", qmin, -1e-12);
    pr.below("closed-form Q", closed, 1e-12);
}

// 2. Wigner marginals over a corpus of Gaussian packets and two-packet superpositions.
void wigner_marginals(Probe& pr) {
    const Grid1D g(256, 40.0);
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double ex = 0.0, ep = 0.0;
    for (int s = 0; s < 20; ++s) {
        const double h = s % 2 == 0 ? 1.0 : 0.5;
        struct Packet {
            double x0, w, p0;
            cplx c;
        };
        std::vector<Packet> packets{{16.0 + 8.0 * u(rng), 0.6 + 0.6 * u(rng), h * (6.0 * u(rng) - 3.0), 1.0}};
        if (s >= 10)
            packets.push_back({packets[0].x0 + (u(rng) < 0.5 ? -1.0 : 1.0) * (1.0 + 3.0 * u(rng)), 0.6 + 0.6 * u(rng),
                               h * (6.0 * u(rng) - 3.0), std::polar(0.5 + u(rng), two_pi * u(rng))});
        auto psi_x = [&](double x) {
            cplx sum = 0.0;
            for (const auto& q : packets)
                sum += q.c * std::pow(pi * q.w * q.w, -0.25) * std::exp(-(x - q.x0) * (x - q.x0) / (2.0 * q.w * q.w)) *
                       std::exp(cplx(0.0, q.p0 * x / h));
            return sum;
        };
        // Continuous transform (2 pi hbar)^{-1/2} int psi e^{-ipx/hbar} dx of each packet.
        auto psi_p = [&](double p) {
            cplx sum = 0.0;
            for (const auto& q : packets)
                sum += q.c * std::pow(pi * q.w * q.w, -0.25) * q.w / std::sqrt(h) *
                       std::exp(-q.w * q.w * (p - q.p0) * (p - q.p0) / (2.0 * h * h)) *
                       std::exp(cplx(0.0, (q.p0 - p) * q.x0 / h));
            return sum;
        };
        std::vector<cplx> values(g.n);
        double norm = 0.0;
        for (std::size_t i = 0; i < g.n; ++i) {
            values[i] = psi_x(g.x(i));
            norm += std::norm(values[i]) * g.dx();
        }
        for (auto& v : values) v /= std::sqrt(norm);
        const PlasmaParams params = PlasmaParams::with_hbar(h);
        const auto axis = transforms::conjugate_momentum_axis(g, h);
        const auto w = transforms::wigner_transform(WaveFunction1D(g, values), params, axis);
        const auto m = transforms::marginals(w);
        for (std::size_t i = 0; i < g.n; ++i) ex = std::max(ex, std::abs(m.density_x[i] - std::norm(values[i])));
        for (std::size_t k = 0; k < axis.n; ++k)
            ep = std::max(ep, std::abs(m.density_p[k] - std::norm(psi_p(axis.at(k))) / norm));
    }
    pr.below("x-marginal error", ex, 1e-6);
    pr.below("p-marginal error", ep, 1e-6);
}

// 3. Spin precession in a uniform field with PIC.
void precession(Probe& pr) {
    const auto cfg = runner::preset("precession");
    const auto r = runner::run_in_memory(cfg);
    pr.at_least("run completed", r.ok ? 1.0 : 0.0, 1.0);
    const auto params = cfg.params();
    const double omega = 2.0 * params.mu_b() * cfg.B0 / params.hbar();
    pr.at_least("periods", omega * cfg.t_end / two_pi, 50.0);
    pr.at_least("fit conclusive", r.summary.at("fit_conclusive"), 1.0);
    if (r.summary.count("omega_fit")) pr.below("omega rel error", std::abs(r.summary.at("omega_fit") / omega - 1.0), 1e-3);
    pr.below("max ||s|-1|", r.summary.at("spin_dev_max"), 1e-12);
}

// 4. Cold plasma oscillation with PIC, and the quantum-corrected frequency from the Bohm fluid.
void plasma_oscillation(Probe& pr) {
    auto pic = runner::preset("plasma_osc");
    const auto r = runner::run_in_memory(pic);
    const auto params = pic.params();
    const double wp = std::sqrt(pic.density * params.charge() * params.charge() / (params.eps0() * params.mass()));
    pr.at_least("pic particles", static_cast<double>(pic.particles), 1e5);
    pr.at_least("pic conclusive", r.summary.at("fit_conclusive"), 1.0);
    if (r.summary.count("omega_fit")) pr.below("pic omega rel error", std::abs(r.summary.at("omega_fit") / wp - 1.0), 1e-2);

    auto fl = runner::preset("plasma_osc");
    fl.backend = "fluid";
    fl.quantum_term = true;
    fl.nx = 64;
    fl.length = two_pi;
    fl.dt = pi / 1024.0;
    fl.t_end = 20.0 * pi;
    fl.cadence = 16;
    const auto f = runner::run_in_memory(fl);
    const double k = two_pi * fl.mode / fl.length;
    const double w2 = wp * wp + std::pow(fl.hbar * k * k / (2.0 * fl.mass), 2);
    pr.at_least("fluid conclusive", f.summary.at("fit_conclusive"), 1.0);
    if (f.summary.count("omega_fit"))
        pr.below("fluid omega^2 rel error", std::abs(std::pow(f.summary.at("omega_fit"), 2) / w2 - 1.0), 2e-2);
}

// 5. Madelung fluid against the spinor oracle, and convergence of the fluid equations on the oracle trajectory.
void madelung_pauli(Probe& pr) {
    auto cfg = runner::preset("madelung_pauli");
    cfg.t_end = 2.0;
    cfg.cadence = 40;
    const auto r = runner::run_in_memory(cfg);
    pr.at_least("run completed", r.ok ? 1.0 : 0.0, 1.0);
    pr.below("density L-inf", r.summary.at("linf_max"), 1e-3);

    const auto params = cfg.params();
    const Grid1D g(cfg.nx, cfg.length);
    const auto pot = oracle::ExternalPotentials::none(g);
    oracle::InitParams ip;
    ip.x0 = 0.5 * cfg.length;
    ip.width = cfg.length / 8.0;
    ip.theta = 0.5 * pi;
    const auto psi0 = oracle::init_state("gaussian", ip, g, params);
    const double tc = 0.5;
    auto moments = [&](double t) {
        const auto steps = static_cast<std::size_t>(std::ceil(t / cfg.dt));
        const auto psi = oracle::propagate(psi0, pot, params, t / static_cast<double>(steps), steps);
        const auto obs = oracle::spinor_observables(psi, pot, params);
        std::vector<double> u(g.n);
        for (std::size_t i = 0; i < g.n; ++i) u[i] = obs.v[i].x();
        return fluid::FluidState(g, obs.n, u);
    };
    const auto mid = moments(tc);
    const auto rhs = fluid::fluid_rhs(mid, std::vector<double>(g.n, 0.0), params);
    const double nmax = *std::max_element(mid.n.begin(), mid.n.end());
    double dn_scale = 0.0, du_scale = 0.0;
    for (std::size_t i = 0; i < g.n; ++i)
        if (mid.n[i] > 1e-3 * nmax) {
            dn_scale = std::max(dn_scale, std::abs(rhs.dn[i]));
            du_scale = std::max(du_scale, std::abs(rhs.du[i]));
        }
    std::vector<double> deltas{0.08, 0.04, 0.02, 0.01}, res;
    for (double d : deltas) {
        const auto a = moments(tc - d), b = moments(tc + d);
        double m = 0.0;
        for (std::size_t i = 0; i < g.n; ++i) {
            if (mid.n[i] <= 1e-3 * nmax) continue;
            m = std::max(m, std::abs((b.n[i] - a.n[i]) / (2.0 * d) - rhs.dn[i]) / dn_scale);
            m = std::max(m, std::abs((b.u[i] - a.u[i]) / (2.0 * d) - rhs.du[i]) / du_scale);
        }
        res.push_back(m);
    }
    pr.within("equivalence residual order", slope(deltas, res), 2.0, 0.2);
}

// 6. Averaged fluid equations along a two-member ensemble trajectory.
SpinorField textured_member(const Grid1D& g, double a, double c, double p0, double hbar, double tilt, double twist) {
    std::vector<cplx> up(g.n), dn(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        const double x = g.x(i);
        const double amp = std::exp(0.5 * a * std::cos(x + c));
        const auto chi = oracle::spin_orientation(tilt + 0.4 * std::sin(x), twist * std::cos(x));
        const cplx plane = std::exp(cplx(0, p0 * x / hbar));
        up[i] = amp * plane * chi[0];
        dn[i] = amp * plane * chi[1];
    }
    return SpinorField(g, up, dn).normalized();
}

void averaged_fluid(Probe& pr) {
    const PlasmaParams params;
    std::vector<double> h, rc, rm, rs;
    for (int lvl = 0; lvl < 3; ++lvl) {
        const std::size_t n = 64u << lvl;
        const double cadence = 0.04 / (1 << lvl);
        const std::size_t sub = 8u << (2 * lvl);
        const Grid1D g(n, two_pi);
        const auto pot = oracle::ExternalPotentials::direct(g, {}, Vec3Field(n, Vec3(0.3, 0, 1.0)));
        std::vector<SpinorField> m{textured_member(g, 0.8, 0.0, 1.0, params.hbar(), 0.5, 0.3),
                                   textured_member(g, 0.6, 1.7, -1.0, params.hbar(), 2.0, -0.5)};
        std::vector<fluid::WavefunctionEnsemble> traj;
        for (int k = 0; k < 3; ++k) {
            traj.emplace_back(m, std::vector<double>{0.35, 0.65});
            for (auto& s : m) s = oracle::propagate(s, pot, params, cadence / static_cast<double>(sub), sub);
        }
        const auto r = fluid::averaged_equation_residual(traj, cadence, pot, params);
        h.push_back(cadence);
        rc.push_back(r.max_continuity());
        rm.push_back(r.max_momentum());
        rs.push_back(r.max_spin());
    }
    pr.within("continuity order", slope(h, rc), 2.0, 0.2);
    pr.within("momentum order", slope(h, rm), 2.0, 0.2);
    pr.within("spin order", slope(h, rs), 2.0, 0.2);
}

// 7. Quantum brackets of the full equation at O(hbar^2).
void semiclassical_limit(Probe& pr) {
    kinetic::AnalyticDistribution f;
    f.spatial = Profile::single_mode(0.3, 1.0, 0.2);
    f.drift = Vec3(0.2, -0.1, 0.05);
    f.v_thermal = 0.8;
    f.bloch = Vec3(0.2, -0.3, 0.5);
    const auto samples = kinetic::PhaseSpaceSamples::tensor(Grid1D(12, two_pi), UniformAxis::symmetric(12, 3.0), 0.7,
                                                            SphereQuadrature(3, 5));
    const std::vector<double> hbars{0.05, 0.1, 0.2, 0.4};
    kinetic::StaticPotentials uni;
    uni.V = Profile::uniform(0.4);
    uni.A = VectorProfile::uniform(Vec3(0.0, 0.3, -0.2));
    uni.B = VectorProfile::uniform(Vec3(0.1, 0.0, 1.0));
    const auto ru = kinetic::full_equation_residual_hbar2(f, uni, PlasmaParams(), hbars, samples);
    pr.at_most("uniform residual", *std::max_element(ru.rhs_norm.begin(), ru.rhs_norm.end()), 1e-12);
    kinetic::StaticPotentials quad;
    quad.V = Profile::polynomial({0.1, -0.4, 0.25}, 3.0);
    const auto rq = kinetic::full_equation_residual_hbar2(f, quad, PlasmaParams(), hbars, samples);
    pr.at_most("quadratic residual", *std::max_element(rq.rhs_norm.begin(), rq.rhs_norm.end()), 1e-12);
    kinetic::StaticPotentials quart;
    quart.V = Profile::polynomial({0.0, 0.0, 0.1, 0.05, 0.02}, 3.0);
    const auto r4 = kinetic::full_equation_residual_hbar2(f, quart, PlasmaParams(), hbars, samples);
    pr.within("quartic slope", r4.slope(), 2.0, 0.1);
}

// 8. Gauge-invariant Wigner transform and its O(hbar^2) correction.
double max_diff(const gauge::SpinWigner& a, const gauge::SpinWigner& b) {
    double d = 0.0;
    for (std::size_t c = 0; c < 4; ++c)
        for (std::size_t i = 0; i < a[c].values.size(); ++i) d = std::max(d, std::abs(a[c].values[i] - b[c].values[i]));
    return d;
}

gauge::GaugedState packet(const Grid1D& g, const PlasmaParams& params, double x0, double width, double p0) {
    oracle::InitParams ip;
    ip.x0 = x0;
    ip.width = width;
    ip.p0 = p0;
    ip.theta = 1.1;
    ip.phi = 0.4;
    return {oracle::init_state("gaussian", ip, g, params), 0.0};
}

void gauge_invariance(Probe& pr) {
    {
        const Grid1D g(128, two_pi);
        const PlasmaParams params(1.0, 1.0, 0.4, 1.0, 1.0);
        const auto st = packet(g, params, 2.5, 0.5, 0.3);
        const auto pot = oracle::ExternalPotentials::none(g);
        const auto v_axis = UniformAxis::symmetric(32, 4.0);
        const auto gi0 = gauge::gi_wigner_components(st, gauge::vector_potential_x(pot), params, v_axis);
        const auto gd0 = gauge::canonical_wigner_components(st, params, v_axis);
        double gi = 0.0, gd = 1e300;
        for (const auto& spec : {gauge::GaugeTransformSpec::single_mode(0.3, 1.0), gauge::GaugeTransformSpec::linear(0.2),
                                 gauge::GaugeTransformSpec::single_mode(-0.5, 2.0, 0.7)}) {
            const auto pair = gauge::gauge_transform_state(st, pot, spec, params);
            gi = std::max(gi, max_diff(gi0, gauge::gi_wigner_components(pair.state, gauge::vector_potential_x(pair.pot),
                                                                         params, v_axis)));
            if (spec.kind() == gauge::GaugeTransformSpec::Kind::single_mode)
                gd = std::min(gd, max_diff(gd0, gauge::canonical_wigner_components(pair.state, params, v_axis)));
        }
        pr.below("GI pair difference", gi, 1e-10);
        pr.above("GD pair difference", gd, 1e-3);
    }
    const Grid1D g(512, pi);
    const Profile A = Profile::single_mode(0.5, 2.0, -pi / 2.0);
    const auto v_axis = UniformAxis::symmetric(64, 8.0);
    const std::vector<double> hbars{0.2, 0.1, 0.05, 0.025};
    std::vector<double> defect;
    for (double h : hbars) {
        const PlasmaParams params(1.0, 1.0, h, 1.0, 1.0);
        const auto st = packet(g, params, pi / 4.0, h, 0.3);
        const auto gi = gauge::gi_wigner_components(st, A, params, v_axis);
        const auto gd = gauge::kinetic_wigner_components(st, A, params, v_axis);
        defect.push_back(gauge::gi_series_defect(gi, gd, A, params));
    }
    pr.within("corrected defect slope", slope(hbars, defect), 4.0, 0.2);
}

// 9. Bound current of a cosine magnetization and the factor-3 moment rule.
void magnetization_current(Probe& pr) {
    const Grid1D g(64, 8.0);
    const PlasmaParams params(1.0, 1.0, 0.4, 1.0, 1.0);
    const double k = two_pi * 2 / 8.0;
    const double a = 0.3;
    kinetic::ParticleEnsemble ens;
    for (std::size_t i = 0; i < g.n; ++i)
        ens.push_back(g.x(i), Vec3::Zero(), Vec3(0, 0, 1), 1.0 + a * std::cos(k * g.x(i)));
    const auto src = kinetic::deposit_sources(ens, g, params);
    double m0 = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) m0 += 2.0 / static_cast<double>(g.n) * src.M[i].z() * std::cos(k * g.x(i));
    double err = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) err = std::max(err, std::abs(src.j_bound[i].y() - m0 * k * std::sin(k * g.x(i))));
    pr.below("bound current error", err, 1e-8);
    pr.within("texture amplitude", m0, -3.0 * params.mu_b() * a / g.dx(), 1e-12);

    const Vec3 bloch(0.3, -0.2, 0.5);
    kinetic::LoadSpec spec;
    spec.count = 64 * 500;
    spec.density = 1.5;
    spec.spin_mode = "q_function";
    spec.bloch = bloch;
    const auto q = kinetic::load_particles(spec, g);
    const auto dep = kinetic::deposit_sources(q, g, params);
    Vec3 mean = Vec3::Zero();
    for (const auto& m : dep.M) mean += m;
    mean /= static_cast<double>(g.n);
    const SphereQuadrature quad;
    std::vector<double> fq(quad.size());
    for (std::size_t j = 0; j < quad.size(); ++j) fq[j] = (1.0 + bloch.dot(quad.direction(j))) / (4.0 * pi);
    const Vec3 expected = -3.0 * params.mu_b() * spec.density * quad.first_moment(fq);
    pr.below("moment rule rel error", (mean - expected).norm() / expected.norm(), 1e-2);
    pr.below("quadrature vs Bloch vector", (expected + params.mu_b() * spec.density * bloch).norm(), 1e-12);
}

// 10. Stern-Gerlach splitting in a field gradient.
void stern_gerlach(Probe& pr) {
    const auto cfg = runner::preset("stern_gerlach");
    const auto r = runner::run_in_memory(cfg);
    const auto params = cfg.params();
    const double a = params.mu_b() * cfg.B1 / params.mass();
    pr.below("up beam rel error", std::abs(r.summary.at("accel_up") / -a - 1.0), 5e-3);
    pr.below("down beam rel error", std::abs(r.summary.at("accel_down") / a - 1.0), 5e-3);
}

// 11. Spin-gradient coupling term in one Eulerian step.
double gauss(double v) { return std::exp(-0.5 * v * v) / std::sqrt(two_pi); }

void quantum_spin_gradient(Probe& pr) {
    const Grid1D g(16, 6.0);
    const SphereQuadrature quad(6, 11);
    const double k = two_pi / 6.0;
    const Vec3 c(0.3, -0.2, 0.4);
    const PlasmaParams params(1.0, 1.0, 0.5, 1.0, 1.0);
    auto X = [&](double x) { return 1.0 + 0.2 * std::sin(k * x); };
    Vec3Field B(g.n), dB(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        B[i] = Vec3(0.1, 0.2 * std::cos(k * g.x(i)), 1.0 + 0.3 * std::sin(k * g.x(i)));
        dB[i] = Vec3(0.0, -0.2 * k * std::sin(k * g.x(i)), 0.3 * k * std::cos(k * g.x(i)));
    }
    const kinetic::EulerianFields flds{Vec3Field(g.n, Vec3::Zero()), B, dB};
    kinetic::EulerianSolver off(quad, {kinetic::Limiter::none, false});
    kinetic::EulerianSolver on(quad, {kinetic::Limiter::none, true});

    // Discrete term against (mu_B/m) X G'(v) dB.(c - (c.s) s) under velocity refinement.
    std::vector<double> dvs, qerr;
    for (std::size_t nv : {48, 96, 192}) {
        const auto vx = UniformAxis::symmetric(nv, 6.0);
        const auto f = kinetic::ExtendedDistribution::from_function(
            g, vx, quad, [&](double x, const Vec3& v, const Vec3& s) { return X(x) * gauss(v.x()) * (1.0 + c.dot(s)); });
        const auto q = on.quantum_term_rhs(f, flds, params);
        double e = 0.0, qmax = 0.0;
        for (std::size_t i = 0; i < g.n; ++i)
            for (std::size_t a = 0; a < vx.n; ++a)
                for (std::size_t j = 0; j < quad.size(); ++j) {
                    const Vec3& s = quad.direction(j);
                    const double v = f.velocity(a, 0).x();
                    const double exact =
                        params.mu_b() / params.mass() * X(g.x(i)) * (-v * gauss(v)) * dB[i].dot(c - c.dot(s) * s);
                    e = std::max(e, std::abs(q[f.index(i, a, 0, j)] - exact));
                    qmax = std::max(qmax, std::abs(exact));
                }
        dvs.push_back(vx.step);
        qerr.push_back(e / qmax);
    }
    pr.within("coupling term order in dv", slope(dvs, qerr), 2.0, 0.2);

    const auto vx = UniformAxis::symmetric(48, 6.0);
    const auto f = kinetic::ExtendedDistribution::from_function(
        g, vx, quad, [&](double x, const Vec3& v, const Vec3& s) { return X(x) * gauss(v.x()) * (1.0 + c.dot(s)); });
    const auto q = on.quantum_term_rhs(f, flds, params);
    std::vector<double> dts{0.02, 0.01, 0.005}, defect;
    for (double dt : dts) {
        const auto a = off.step(f, flds, params, dt);
        const auto b = on.step(f, flds, params, dt);
        double d = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) d = std::max(d, std::abs(b.data()[i] - a.data()[i] - dt * q[i]));
        defect.push_back(d);
    }
    pr.within("on-off defect order in dt", slope(dts, defect), 2.0, 0.2);

    const auto fi = kinetic::ExtendedDistribution::from_function(
        g, vx, quad, [&](double x, const Vec3& v, const Vec3&) { return X(x) * gauss(v.x() - 0.3); });
    const auto a = off.step(fi, flds, params, 0.02);
    const auto b = on.step(fi, flds, params, 0.02);
    double d = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
    pr.below("spin-independent difference", d, 1e-13);
}

struct Entry {
    CheckInfo info;
    std::function<void(Probe&)> body;
};

const std::vector<Entry>& entries() {
    static const std::vector<Entry> e{
        {{1, "spin_transform", 5.0}, spin_transform},
        {{2, "wigner_marginals", 30.0}, wigner_marginals},
        {{3, "precession", 10.0}, precession},
        {{4, "plasma_oscillation", 60.0}, plasma_oscillation},
        {{5, "madelung_pauli", 60.0}, madelung_pauli},
        {{6, "averaged_fluid", 120.0}, averaged_fluid},
        {{7, "semiclassical_limit", 60.0}, semiclassical_limit},
        {{8, "gauge_invariance", 60.0}, gauge_invariance},
        {{9, "magnetization_current", 10.0}, magnetization_current},
        {{10, "stern_gerlach", 10.0}, stern_gerlach},
        {{11, "quantum_spin_gradient", 30.0}, quantum_spin_gradient},
    };
    return e;
}

}  // namespace

const std::vector<CheckInfo>& checks() {
    static const std::vector<CheckInfo> c = [] {
        std::vector<CheckInfo> out;
        for (const auto& e : entries()) out.push_back(e.info);
        return out;
    }();
    return c;
}

CheckResult run_check(int id) {
    const auto it = std::find_if(entries().begin(), entries().end(), [&](const Entry& e) { return e.info.id == id; });
    if (it == entries().end()) throw InvalidArgument("acceptance: no check " + std::to_string(id));
    CheckResult r;
    r.id = id;
    r.name = it->info.name;
    r.time_limit = it->info.time_limit;
    Probe pr;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        it->body(pr);
        r.passed = pr.ok();
        r.detail = pr.text();
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = pr.text() + (pr.text().empty() ? "" : "; ") + "error: " + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.seconds >= r.time_limit) r.passed = false;
    return r;
}

std::vector<CheckResult> run_suite(const std::string& which) {
    std::vector<CheckResult> out;
    for (const auto& c : checks())
        if (which == "all" || which == c.name || which == std::to_string(c.id)) out.push_back(run_check(c.id));
    if (out.empty()) throw InvalidArgument("acceptance: unknown suite '" + which + "'");
    return out;
}

std::string format_line(const CheckResult& r) {
    char head[96];
    std::snprintf(head, sizeof head, "%s %2d %-22s", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str());
    char tail[64];
    std::snprintf(tail, sizeof tail, " (%.1f s, limit %.0f s)", r.seconds, r.time_limit);
    return std::string(head) + " " + r.detail + tail;
}

}  // namespace spinkin::acceptance
