#include "spinkin/gauge.hpp"

#include "spinkin/spectral.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <span>

namespace spinkin::gauge {

namespace {

using transforms::PhaseSpaceField;

std::vector<std::pair<double, double>> gauss_legendre(std::size_t n) {
    std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
        gsl_integration_glfixed_table_alloc(n), &gsl_integration_glfixed_table_free);
    if (!table) throw InvalidArgument("gauss_legendre: table allocation failed");
    std::vector<std::pair<double, double>> out(n);
    for (std::size_t i = 0; i < n; ++i) gsl_integration_glfixed_point(-0.5, 0.5, i, &out[i].first, &out[i].second, table.get());
    return out;
}

// Pointwise evaluator of a profile; sampled profiles keep only their non-zero Fourier modes.
class FastProfile {
public:
    FastProfile(const Profile& p, const Grid1D& grid) : p_(p) {
        if (p.kind() != Profile::Kind::sampled) return;
        sparse_ = true;
        const auto vals = p.sample(grid);
        const auto spec = spectral::fft(std::vector<cplx>(vals.begin(), vals.end()));
        const auto k = spectral::wavenumbers(grid);
        double peak = 0.0;
        for (const auto& c : spec) peak = std::max(peak, std::abs(c));
        for (std::size_t j = 0; j < spec.size(); ++j)
            if (std::abs(spec[j]) > 1e-15 * peak) modes_.push_back({k[j], spec[j] / static_cast<double>(grid.n)});
    }

    double operator()(double x) const {
        if (!sparse_) return p_(x);
        double s = 0.0;
        for (const auto& [k, c] : modes_) s += (c * std::exp(cplx(0.0, k * x))).real();
        return s;
    }

private:
    Profile p_;
    bool sparse_ = false;
    std::vector<std::pair<double, cplx>> modes_;
};

// (1/2 pi hbar) sum_y dx exp(-i m v y/hbar) exp(i y (shift(j, y) + offset)/hbar) psi(x_j+y/2) psi^dag(x_j-y/2)
// contracted to [Tr, Tr sigma_x, Tr sigma_y, Tr sigma_z]. shift(j, q) returns e A_eff at node j, lag index q.
SpinWigner dressed_wigner(const GaugedState& st, const PlasmaParams& params, const UniformAxis& v_axis,
                          const std::function<double(std::size_t, std::size_t)>& shift) {
    const auto& psi = st.psi;
    const Grid1D& grid = psi.grid;
    const std::size_t n = grid.n;
    if (n % 2 != 0) throw InvalidArgument("gauge: grid size must be even");
    if (psi.up.size() != n || psi.down.size() != n) throw InvalidArgument("gauge: spinor size mismatch");
    if (v_axis.n < 2) throw InvalidArgument("gauge: velocity axis needs at least 2 points");
    const std::size_t n2 = 2 * n;
    const auto uh = spectral::upsample2(psi.up, grid);
    const auto dh = spectral::upsample2(psi.down, grid);
    const double hb = params.hbar();
    const double m = params.mass();
    const double dx = grid.dx();
    const double pref = dx / (two_pi * hb);
    const auto half = static_cast<long>(n / 2);
    const std::size_t nv = v_axis.n;

    std::vector<cplx> table(nv * n);
    for (std::size_t k = 0; k < nv; ++k)
        for (std::size_t q = 0; q < n; ++q) {
            const double y = static_cast<double>(static_cast<long>(q) - half) * dx;
            table[k * n + q] = std::exp(cplx(0.0, -m * v_axis.at(k) * y / hb));
        }

    SpinWigner out;
    for (auto& f : out) f = PhaseSpaceField(grid, v_axis);
#pragma omp parallel for schedule(static)
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<cplx> guu(n), gdd(n), gud(n);
        for (std::size_t q = 0; q < n; ++q) {
            const long mq = static_cast<long>(q) - half;
            const double y = static_cast<double>(mq) * dx;
            const auto ip = static_cast<std::size_t>((static_cast<long>(2 * j) + mq + static_cast<long>(n2)) %
                                                     static_cast<long>(n2));
            const auto im = static_cast<std::size_t>((static_cast<long>(2 * j) - mq + static_cast<long>(n2)) %
                                                     static_cast<long>(n2));
            const cplx ph = std::exp(cplx(0.0, y * (shift(j, q) + st.momentum_offset) / hb));
            guu[q] = ph * uh[ip] * std::conj(uh[im]);
            gdd[q] = ph * dh[ip] * std::conj(dh[im]);
            gud[q] = ph * uh[ip] * std::conj(dh[im]);
        }
        for (std::size_t k = 0; k < nv; ++k) {
            cplx suu = 0.0, sdd = 0.0, sud = 0.0;
            const cplx* row = &table[k * n];
            for (std::size_t q = 0; q < n; ++q) {
                suu += row[q] * guu[q];
                sdd += row[q] * gdd[q];
                sud += row[q] * gud[q];
            }
            const cplx sdu = std::conj(sud);
            const std::size_t idx = j * nv + k;
            out[0].values[idx] = pref * (suu + sdd).real();
            out[1].values[idx] = pref * (sud + sdu).real();
            out[2].values[idx] = pref * (cplx(0, 1) * sud - cplx(0, 1) * sdu).real();
            out[3].values[idx] = pref * (suu - sdd).real();
        }
    }
    return out;
}

}  // namespace

GaugeTransformSpec GaugeTransformSpec::constant(double c) {
    GaugeTransformSpec g;
    g.kind_ = Kind::constant;
    g.a_ = c;
    return g;
}

GaugeTransformSpec GaugeTransformSpec::linear(double alpha, double c) {
    GaugeTransformSpec g;
    g.kind_ = Kind::linear;
    g.a_ = alpha;
    g.b_ = c;
    return g;
}

GaugeTransformSpec GaugeTransformSpec::single_mode(double beta, double k, double phase) {
    if (!(k > 0)) throw InvalidArgument("GaugeTransformSpec: wavenumber must be positive");
    GaugeTransformSpec g;
    g.kind_ = Kind::single_mode;
    g.a_ = beta;
    g.b_ = k;
    g.c_ = phase;
    return g;
}

GaugeTransformSpec GaugeTransformSpec::make(const std::string& family, double a, double b, double c) {
    if (family == "constant") return constant(a);
    if (family == "linear") return linear(a, b);
    if (family == "single_mode") return single_mode(a, b, c);
    throw InvalidArgument("GaugeTransformSpec: unsupported gauge family '" + family + "'");
}

double GaugeTransformSpec::lambda(double x) const {
    switch (kind_) {
    case Kind::constant: return a_;
    case Kind::linear: return a_ * x + b_;
    case Kind::single_mode: return a_ * std::sin(b_ * x + c_);
    }
    return 0.0;
}

double GaugeTransformSpec::gradient(double x) const {
    switch (kind_) {
    case Kind::constant: return 0.0;
    case Kind::linear: return a_;
    case Kind::single_mode: return a_ * b_ * std::cos(b_ * x + c_);
    }
    return 0.0;
}

GaugeTransformSpec GaugeTransformSpec::negated() const {
    GaugeTransformSpec g = *this;
    g.a_ = -a_;
    if (kind_ == Kind::linear) g.b_ = -b_;
    return g;
}

GaugePair gauge_transform_state(const GaugedState& state, const oracle::ExternalPotentials& pot,
                                const GaugeTransformSpec& g, const PlasmaParams& params) {
    const Grid1D& grid = state.psi.grid;
    if (!(pot.grid == grid)) throw InvalidArgument("gauge_transform_state: potential grid does not match the state");
    const std::size_t n = grid.n;
    const double e = params.charge();
    const double hb = params.hbar();
    GaugePair out{state, pot};
    if (out.pot.A[0].size() != n) out.pot.A[0].assign(n, 0.0);

    switch (g.kind()) {
    case GaugeTransformSpec::Kind::constant: {
        const cplx ph = std::exp(cplx(0.0, -e * g.lambda(0.0) / hb));
        for (std::size_t i = 0; i < n; ++i) {
            out.state.psi.up[i] *= ph;
            out.state.psi.down[i] *= ph;
        }
        break;
    }
    case GaugeTransformSpec::Kind::linear: {
        // exp(-i e (alpha x + c)/hbar): the constant part acts on psi, the slope moves into the offset
        const cplx ph = std::exp(cplx(0.0, -e * g.lambda(0.0) / hb));
        for (std::size_t i = 0; i < n; ++i) {
            out.state.psi.up[i] *= ph;
            out.state.psi.down[i] *= ph;
        }
        const double alpha = g.gradient(0.0);
        out.state.momentum_offset -= e * alpha;
        for (auto& a : out.pot.A[0]) a += alpha;
        break;
    }
    case GaugeTransformSpec::Kind::single_mode: {
        // periodicity of Lambda on the domain
        const double l0 = g.lambda(0.0);
        const double lL = g.lambda(grid.length);
        const double d0 = g.gradient(0.0);
        const double dL = g.gradient(grid.length);
        const double scale = std::max(1.0, std::abs(d0) + std::abs(l0));
        if (std::abs(l0 - lL) > 1e-9 * scale || std::abs(d0 - dL) > 1e-9 * scale)
            throw InvalidArgument("gauge_transform_state: single-mode gauge is not periodic on the domain");
        for (std::size_t i = 0; i < n; ++i) {
            const double x = grid.x(i);
            const cplx ph = std::exp(cplx(0.0, -e * g.lambda(x) / hb));
            out.state.psi.up[i] *= ph;
            out.state.psi.down[i] *= ph;
            out.pot.A[0][i] += g.gradient(x);
        }
        break;
    }
    }
    return out;
}

oracle::Observables gauged_observables(const GaugedState& state, const oracle::ExternalPotentials& pot,
                                       const PlasmaParams& params) {
    oracle::ExternalPotentials p = pot;
    if (p.A[0].size() != pot.grid.n) p.A[0].assign(pot.grid.n, 0.0);
    for (auto& a : p.A[0]) a += state.momentum_offset / params.charge();
    return oracle::spinor_observables(state.psi, p, params);
}

SpinWigner gi_wigner_components(const GaugedState& state, const Profile& A_x, const PlasmaParams& params,
                                const UniformAxis& v_axis, GiOptions opts) {
    if (opts.tau_nodes < 2) throw InvalidArgument("gi_wigner_components: need at least 2 tau nodes");
    const Grid1D& grid = state.psi.grid;
    const std::size_t n = grid.n;
    const FastProfile A(A_x, grid);
    const auto nodes = gauss_legendre(opts.tau_nodes);
    const auto nodes2 = gauss_legendre(2 * opts.tau_nodes);
    const double dx = grid.dx();
    const auto half = static_cast<long>(n / 2);
    const double e = params.charge();

    // mean of A_x over [x - y/2, x + y/2] at every (node, lag)
    std::vector<double> abar(n * n);
    double defect = 0.0;
#pragma omp parallel for schedule(static) reduction(max : defect)
    for (std::size_t j = 0; j < n; ++j) {
        const double x = grid.x(j);
        for (std::size_t q = 0; q < n; ++q) {
            const double y = static_cast<double>(static_cast<long>(q) - half) * dx;
            double s1 = 0.0;
            for (const auto& [t, w] : nodes) s1 += w * A(x + t * y);
            double s2 = 0.0;
            for (const auto& [t, w] : nodes2) s2 += w * A(x + t * y);
            abar[j * n + q] = s2;
            defect = std::max(defect, std::abs(s2 - s1));
        }
    }
    if (defect > 1e-10)
        throw InvalidArgument("gi_wigner_components: tau quadrature with " + std::to_string(opts.tau_nodes) +
                              " nodes is insufficient (doubling difference " + std::to_string(defect) + ")");
    return dressed_wigner(state, params, v_axis, [&](std::size_t j, std::size_t q) { return e * abar[j * n + q]; });
}

SpinWigner canonical_wigner_components(const GaugedState& state, const PlasmaParams& params,
                                       const UniformAxis& v_axis) {
    return dressed_wigner(state, params, v_axis, [](std::size_t, std::size_t) { return 0.0; });
}

SpinWigner kinetic_wigner_components(const GaugedState& state, const Profile& A_x, const PlasmaParams& params,
                                     const UniformAxis& v_axis) {
    const Grid1D& grid = state.psi.grid;
    const FastProfile A(A_x, grid);
    std::vector<double> ea(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j) ea[j] = params.charge() * A(grid.x(j));
    return dressed_wigner(state, params, v_axis, [&](std::size_t j, std::size_t) { return ea[j]; });
}

kinetic::ExtendedDistribution q_project(const SpinWigner& w, const SphereQuadrature& quad) {
    for (std::size_t c = 1; c < 4; ++c)
        if (!w[c].same_grid(w[0])) throw InvalidArgument("q_project: component grids differ");
    kinetic::ExtendedDistribution f(w[0].x, w[0].p, quad);
    const std::size_t nv = w[0].p.n;
    for (std::size_t i = 0; i < w[0].x.n; ++i)
        for (std::size_t a = 0; a < nv; ++a) {
            const Vec3 sv(w[1].at(i, a), w[2].at(i, a), w[3].at(i, a));
            for (std::size_t j = 0; j < quad.size(); ++j)
                f.at(i, a, 0, j) = (w[0].at(i, a) + quad.direction(j).dot(sv)) / (4.0 * pi);
        }
    return f;
}

kinetic::ExtendedDistribution gi_wigner_transform(const GaugedState& state, const Profile& A_x,
                                                  const PlasmaParams& params, const UniformAxis& v_axis,
                                                  const SphereQuadrature& quad, GiOptions opts) {
    return q_project(gi_wigner_components(state, A_x, params, v_axis, opts), quad);
}

Profile vector_potential_x(const oracle::ExternalPotentials& pot) {
    if (pot.A[0].empty()) return Profile::uniform(0.0);
    return Profile::sampled(pot.grid, pot.A[0]);
}

PhaseSpaceField gi_correction_series(const PhaseSpaceField& f, const Profile& A_x, const PlasmaParams& params,
                                     int order) {
    if (order != 2) throw InvalidArgument("gi_correction_series: only order 2 is supported");
    if (f.p.n < 4 || f.p.n % 2 != 0) throw InvalidArgument("gi_correction_series: velocity axis must be even");
    const double m = params.mass();
    const double hb = params.hbar();
    const double coef = params.charge() * hb * hb / (24.0 * m * m * m);
    const Grid1D vg(f.p.n, f.p.step * static_cast<double>(f.p.n));
    PhaseSpaceField out = f;
    for (std::size_t i = 0; i < f.x.n; ++i) {
        const double a2 = A_x.derivative(f.x.x(i), 2);
        if (a2 == 0.0) continue;
        const std::span<const double> row(&f.values[i * f.p.n], f.p.n);
        const auto d3 = spectral::derivative(row, vg, 3);
        for (std::size_t k = 0; k < f.p.n; ++k) out.at(i, k) += coef * a2 * d3[k];
    }
    return out;
}

double gi_series_defect(const SpinWigner& gi, const SpinWigner& kinetic, const Profile& A_x,
                        const PlasmaParams& params) {
    double scale = 0.0;
    for (double v : kinetic[0].values) scale = std::max(scale, std::abs(v));
    if (!(scale > 0.0)) throw InvalidState("gi_series_defect: zero distribution");
    double d = 0.0;
    for (std::size_t c = 0; c < 4; ++c) {
        if (!gi[c].same_grid(kinetic[c])) throw InvalidArgument("gi_series_defect: grids differ");
        const auto s = gi_correction_series(kinetic[c], A_x, params, 2);
        for (std::size_t i = 0; i < s.values.size(); ++i) d = std::max(d, std::abs(gi[c].values[i] - s.values[i]));
    }
    return d / scale;
}

// ---- tilde fields ----

Vec3 TildeFields::e_corr(const kinetic::AnalyticDistribution& f, double x, const Vec3& v) const {
    const double m = params.mass();
    const double h = params.hbar();
    return -(h * h / (24.0 * m * m)) * E.derivative(x, 2) * f.spatial_velocity(x, v, 0, 2);
}

Vec3 TildeFields::b_corr(const kinetic::AnalyticDistribution& f, double x, const Vec3& v) const {
    const double m = params.mass();
    const double h = params.hbar();
    return -(h * h / (24.0 * m * m)) * B.derivative(x, 2) * f.spatial_velocity(x, v, 0, 2);
}

Vec3 TildeFields::delta_v(const kinetic::AnalyticDistribution& f, double x, const Vec3& v) const {
    const double m = params.mass();
    const double h = params.hbar();
    const Vec3 g(f.spatial_velocity(x, v, 0, 2, 0, 0), f.spatial_velocity(x, v, 0, 1, 1, 0),
                 f.spatial_velocity(x, v, 0, 1, 0, 1));
    return -(params.charge() * h * h / (12.0 * m * m * m)) * B.derivative(x, 1).cross(g);
}

Vec3 TildeFields::delta_B(const kinetic::AnalyticDistribution& f, double x, const Vec3& v) const {
    const double m = params.mass();
    const double h = params.hbar();
    return (h * h / (12.0 * m * m)) * B.derivative(x, 2) * f.spatial_velocity(x, v, 0, 2);
}

TildeFields tilde_fields_hbar2(const VectorProfile& E, const VectorProfile& B, const PlasmaParams& params) {
    return TildeFields{E, B, params};
}

// ---- kinetic residual ----

namespace {

// Constant-coefficient differential operator: (d_x order, d_vx, d_vy, d_vz) -> coefficient.
using Key = std::array<int, 4>;
using Op = std::map<Key, double>;
using OpVec = std::array<Op, 3>;

Op unit(const Key& k, double c = 1.0) { return Op{{k, c}}; }
Op ident(double c = 1.0) { return unit({0, 0, 0, 0}, c); }
Op dvel(int c) {
    Key k{0, 0, 0, 0};
    k[static_cast<std::size_t>(c) + 1] = 1;
    return unit(k);
}
Op dpos() { return unit({1, 0, 0, 0}); }

Op& operator+=(Op& a, const Op& b) {
    for (const auto& [k, c] : b) a[k] += c;
    return a;
}
Op operator+(Op a, const Op& b) { return a += b; }
Op operator*(double s, Op a) {
    for (auto& [k, c] : a) c *= s;
    return a;
}
Op operator*(const Op& a, const Op& b) {
    Op out;
    for (const auto& [ka, ca] : a)
        for (const auto& [kb, cb] : b) {
            Key k;
            for (std::size_t i = 0; i < 4; ++i) k[i] = ka[i] + kb[i];
            out[k] += ca * cb;
        }
    return out;
}

double apply(const Op& op, const kinetic::AnalyticDistribution& f, double x, const Vec3& v) {
    double s = 0.0;
    for (const auto& [k, c] : op)
        if (c != 0.0) s += c * f.spatial_velocity(x, v, k[0], k[1], k[2], k[3]);
    return s;
}

int levi(int a, int b, int c) {
    if (a == b || b == c || a == c) return 0;
    return ((b - a + 3) % 3 == 1) ? 1 : -1;
}

// Operator acting on f = (X G) Y: scalar part times Y, plus parts multiplying grad_s Y and (grad_s Y) x s_hat.
struct SpinOp {
    Op main;
    OpVec grad;
    OpVec prec;

    double eval(const kinetic::AnalyticDistribution& f, double x, const Vec3& v, const Vec3& s) const {
        const double Y = f.spin_factor(s);
        const Vec3 g = f.spin_gradient(s);
        const Vec3 gxs = g.cross(s);
        double r = apply(main, f, x, v) * Y;
        for (int b = 0; b < 3; ++b) {
            const auto ub = static_cast<std::size_t>(b);
            r += apply(grad[ub], f, x, v) * g[b] + apply(prec[ub], f, x, v) * gxs[b];
        }
        return r;
    }
};

struct LocalFields {
    std::array<Vec3, 4> E;  // derivatives 0..3
    std::array<Vec3, 4> B;
};

struct Coefs {
    double qm, sm, pr, c24, c12, cv;
};

Coefs coefs(const PlasmaParams& p) {
    const double m = p.mass();
    const double h = p.hbar();
    return {p.charge() / m, p.mu_b() / m, 2.0 * p.mu_b() / h, h * h / (24.0 * m * m), h * h / (12.0 * m * m),
            p.charge() * h * h / (12.0 * m * m * m)};
}

// Left side of the kinetic equation with hbar^2 tilde fields (corrections on) or the plain fields (off),
// without the time derivative.
SpinOp tilde_lhs(const LocalFields& F, const Coefs& C, const Vec3& v, const Vec3& s, bool corrections) {
    const double on = corrections ? 1.0 : 0.0;
    const Op D2 = dvel(0) * dvel(0);
    OpVec Bt, Btp, dBt, dvt;
    std::array<Op, 3> Et;
    for (int b = 0; b < 3; ++b) {
        const auto ub = static_cast<std::size_t>(b);
        Bt[ub] = ident(F.B[0][b]) + (-on * C.c24 * F.B[2][b]) * D2;
        Btp[ub] = ident(F.B[1][b]) + (-on * C.c24 * F.B[3][b]) * D2;
        dBt[ub] = (on * C.c12 * F.B[2][b]) * D2;
        Et[ub] = ident(F.E[0][b]) + (-on * C.c24 * F.E[2][b]) * D2;
    }
    for (int a = 0; a < 3; ++a)
        for (int d = 0; d < 3; ++d)
            for (int e = 0; e < 3; ++e) {
                const int l = levi(a, d, e);
                if (l != 0) dvt[static_cast<std::size_t>(a)] += (-on * C.cv * l * F.B[1][d]) * (dvel(e) * dvel(0));
            }
    SpinOp out;
    out.main = v.x() * dpos() + dvt[0] * dpos();
    for (int c = 0; c < 3; ++c) {
        Op force = Et[static_cast<std::size_t>(c)];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                const int l = levi(c, a, b);
                if (l == 0) continue;
                const auto ua = static_cast<std::size_t>(a);
                force += static_cast<double>(l) * ((ident(v[a]) + dvt[ua]) * Bt[static_cast<std::size_t>(b)]);
            }
        out.main += (-C.qm) * (force * dvel(c));
    }
    for (int b = 0; b < 3; ++b) {
        const auto ub = static_cast<std::size_t>(b);
        out.main += (-C.sm * s[b]) * (Btp[ub] * dvel(0));
        out.grad[ub] = (-C.sm) * (Btp[ub] * dvel(0));
        out.prec[ub] = (-C.pr) * (Bt[ub] + dBt[ub]);
    }
    return out;
}

// Correction terms moved to the right-hand side, written term by term.
SpinOp split_rhs(const LocalFields& F, const Coefs& C, const Vec3& v, const Vec3& s) {
    const Op D2 = dvel(0) * dvel(0);
    OpVec Bc, Bcp, dBt, dvt, Ec;
    for (int b = 0; b < 3; ++b) {
        const auto ub = static_cast<std::size_t>(b);
        Bc[ub] = (-C.c24 * F.B[2][b]) * D2;
        Bcp[ub] = (-C.c24 * F.B[3][b]) * D2;
        dBt[ub] = (C.c12 * F.B[2][b]) * D2;
        Ec[ub] = (-C.c24 * F.E[2][b]) * D2;
    }
    for (int a = 0; a < 3; ++a)
        for (int d = 0; d < 3; ++d)
            for (int e = 0; e < 3; ++e) {
                const int l = levi(a, d, e);
                if (l != 0) dvt[static_cast<std::size_t>(a)] += (-C.cv * l * F.B[1][d]) * (dvel(e) * dvel(0));
            }
    SpinOp out;
    out.main = (-1.0) * (dvt[0] * dpos());
    for (int c = 0; c < 3; ++c) {
        Op t = Ec[static_cast<std::size_t>(c)];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                const int l = levi(c, a, b);
                if (l == 0) continue;
                const auto ua = static_cast<std::size_t>(a);
                const auto ubb = static_cast<std::size_t>(b);
                t += static_cast<double>(l) * ((ident(v[a]) + dvt[ua]) * Bc[ubb] + dvt[ua] * ident(F.B[0][b]));
            }
        out.main += C.qm * (t * dvel(c));
    }
    for (int b = 0; b < 3; ++b) {
        const auto ub = static_cast<std::size_t>(b);
        out.main += (C.sm * s[b]) * (Bcp[ub] * dvel(0));
        out.grad[ub] = C.sm * (Bcp[ub] * dvel(0));
        out.prec[ub] = C.pr * (Bc[ub] + dBt[ub]);
    }
    return out;
}

// (hbar^2/24 m^2) [ A (<-d_x . ->grad_v) + C ] (<-d_x . ->grad_v) f, left derivatives on the fields.
SpinOp bracket(const LocalFields& F, const Coefs& C, const Vec3& v, const Vec3& s) {
    const Op D2 = dvel(0) * dvel(0);
    SpinOp out;
    const Vec3 vxb2 = v.cross(F.B[2]);
    for (int c = 0; c < 3; ++c) out.main += (-C.qm * (F.E[2][c] + vxb2[c])) * (dvel(c) * D2);
    // (B' x grad_v)_a
    OpVec bxg;
    for (int a = 0; a < 3; ++a)
        for (int d = 0; d < 3; ++d)
            for (int e = 0; e < 3; ++e) {
                const int l = levi(a, d, e);
                if (l != 0) bxg[static_cast<std::size_t>(a)] += (l * F.B[1][d]) * dvel(e);
            }
    out.main += (2.0 * C.qm) * (bxg[0] * dpos() * dvel(0));
    for (int c = 0; c < 3; ++c)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                const int l = levi(c, a, b);
                if (l == 0) continue;
                out.main += (-2.0 * C.qm * C.qm * l * F.B[0][b]) * (bxg[static_cast<std::size_t>(a)] * dvel(c) * dvel(0));
            }
    for (int b = 0; b < 3; ++b) {
        const auto ub = static_cast<std::size_t>(b);
        out.main += (-C.sm * s[b] * F.B[3][b]) * (dvel(0) * D2);
        out.grad[ub] = (-C.sm * F.B[3][b]) * (dvel(0) * D2);
        out.prec[ub] = (C.pr * F.B[2][b]) * D2;
    }
    out.main = C.c24 * out.main;
    for (int b = 0; b < 3; ++b) {
        const auto ub = static_cast<std::size_t>(b);
        out.grad[ub] = C.c24 * out.grad[ub];
        out.prec[ub] = C.c24 * out.prec[ub];
    }
    return out;
}

bool sampled(const VectorProfile& p) {
    for (const auto& c : p.c)
        if (c.kind() == Profile::Kind::sampled) return true;
    return false;
}

// Scalar potential with -V' = E_x for the closed-form families; absent otherwise.
bool potential_for(const VectorProfile& E, Profile& V) {
    if (!E.c[1].is_uniform() || !E.c[2].is_uniform() || E.c[1](0.0) != 0.0 || E.c[2](0.0) != 0.0) return false;
    const Profile& ex = E.c[0];
    if (ex.is_uniform()) {
        V = Profile::polynomial({0.0, -ex(0.0)});
        return true;
    }
    if (ex.kind() == Profile::Kind::single_mode) {
        // -int A cos(kx + ph) = -(A/k) sin(kx + ph) = -(A/k) cos(kx + ph - pi/2)
        V = Profile::single_mode(-ex.amplitude() / ex.wavenumber(), ex.wavenumber(), ex.phase() - pi / 2.0);
        return true;
    }
    return false;
}

}  // namespace

GiKineticResidual gi_kinetic_residual(const kinetic::AnalyticDistribution& f, const VectorProfile& E,
                                      const VectorProfile& B, const PlasmaParams& params,
                                      const std::vector<double>& hbar_list,
                                      const kinetic::PhaseSpaceSamples& samples) {
    if (sampled(E) || sampled(B)) throw InvalidArgument("gi_kinetic_residual: sampled field profiles are not supported");
    if (hbar_list.empty()) throw InvalidArgument("gi_kinetic_residual: empty hbar list");
    kinetic::StaticPotentials pot;
    const bool reducible = potential_for(E, pot.V);
    pot.B = B;

    GiKineticResidual out;
    for (double hb : hbar_list) {
        const PlasmaParams p(params.mass(), params.charge(), hb, params.eps0(), params.c());
        const Coefs C = coefs(p);
        double split = 0.0, br = 0.0, res = 0.0, ident_d = 0.0, red = 0.0;
#pragma omp parallel for schedule(static) reduction(max : split, br, res, ident_d, red)
        for (std::size_t i = 0; i < samples.x.size(); ++i) {
            const double x = samples.x[i];
            LocalFields F;
            for (int d = 0; d < 4; ++d) {
                F.E[static_cast<std::size_t>(d)] = E.derivative(x, d);
                F.B[static_cast<std::size_t>(d)] = B.derivative(x, d);
            }
            for (const Vec3& v : samples.v)
                for (const Vec3& s : samples.sphere.directions()) {
                    const double l82 = tilde_lhs(F, C, v, s, true).eval(f, x, v, s);
                    const double lsc = tilde_lhs(F, C, v, s, false).eval(f, x, v, s);
                    const double r = split_rhs(F, C, v, s).eval(f, x, v, s);
                    const double b = bracket(F, C, v, s).eval(f, x, v, s);
                    split = std::max(split, std::abs(r));
                    br = std::max(br, std::abs(b));
                    res = std::max(res, std::abs(r - b));
                    ident_d = std::max(ident_d, std::abs((lsc - l82) - r));
                    if (reducible)
                        red = std::max(red, std::abs(lsc - kinetic::semiclassical_lhs(f, pot, p, x, v, s)));
                }
        }
        out.hbar.push_back(hb);
        out.split_norm.push_back(split);
        out.bracket_norm.push_back(br);
        out.residual.push_back(res);
        out.identity_defect.push_back(ident_d);
        out.reduction_defect.push_back(reducible ? red : std::numeric_limits<double>::quiet_NaN());
    }
    return out;
}

double GiKineticResidual::slope(std::size_t window) const {
    const std::size_t n = hbar.size();
    const std::size_t w = window == 0 ? n : std::min(window, n);
    if (w < 2) throw InvalidArgument("GiKineticResidual::slope: need at least two hbar values");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = n - w; k < n; ++k) {
        if (!(residual[k] > 0.0)) throw InvalidState("GiKineticResidual::slope: zero residual");
        const double lx = std::log(hbar[k]);
        const double ly = std::log(residual[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double dn = static_cast<double>(w);
    return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

}  // namespace spinkin::gauge
