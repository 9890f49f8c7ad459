#include "spinkin/full_equation.hpp"

#include <cmath>

namespace spinkin::kinetic {

namespace {

// d^n/dv^n of the unit Maxwellian with mean mu and spread s.
double gauss_derivative(double v, double mu, double s, int n) {
    const double u = (v - mu) / s;
    const double g = std::exp(-0.5 * u * u) / (std::sqrt(two_pi) * s);
    double h0 = 1.0;
    double h1 = u;
    double he = n == 0 ? 1.0 : u;
    for (int k = 1; k < n; ++k) {
        he = u * h1 - k * h0;
        h0 = h1;
        h1 = he;
    }
    return std::pow(-1.0 / s, n) * he * g;
}

bool is_sampled(const Profile& p) { return p.kind() == Profile::Kind::sampled; }

}  // namespace

double AnalyticDistribution::spatial_velocity(double x, const Vec3& v, int kx, int nx, int ny, int nz) const {
    return spatial.derivative(x, kx) * gauss_derivative(v.x(), drift.x(), v_thermal, nx) *
           gauss_derivative(v.y(), drift.y(), v_thermal, ny) * gauss_derivative(v.z(), drift.z(), v_thermal, nz);
}

double AnalyticDistribution::spin_factor(const Vec3& s) const { return (1.0 + bloch.dot(s)) / (4.0 * pi); }

Vec3 AnalyticDistribution::spin_gradient(const Vec3& s) const { return (bloch - bloch.dot(s) * s) / (4.0 * pi); }

void StaticPotentials::validate() const {
    if (is_sampled(V)) throw InvalidArgument("full equation: sampled scalar potential is not a supported family");
    for (int a = 0; a < 3; ++a)
        if (is_sampled(A.c[a]) || is_sampled(B.c[a]))
            throw InvalidArgument("full equation: sampled vector profiles are not a supported family");
    if (!A.c[0].is_uniform()) throw InvalidArgument("full equation: A_x must be uniform (Coulomb gauge)");
}

PhaseSpaceSamples PhaseSpaceSamples::tensor(const Grid1D& grid, const UniformAxis& vx, double w,
                                            const SphereQuadrature& s) {
    PhaseSpaceSamples out;
    out.x = grid.nodes();
    out.sphere = s;
    const double t[3] = {-w, 0.0, w};
    for (std::size_t a = 0; a < vx.n; ++a)
        for (double vy : t)
            for (double vz : t) out.v.emplace_back(vx.at(a), vy, vz);
    return out;
}

double full_equation_rhs(const AnalyticDistribution& f, const StaticPotentials& pot, const PlasmaParams& params,
                         double x, const Vec3& v, const Vec3& s) {
    const double m = params.mass();
    const double e = params.charge();
    const double hb = params.hbar();
    const double mu = params.mu_b();
    const double Y = f.spin_factor(s);
    const Vec3 dY = f.spin_gradient(s);

    // sine bracket: (2m/hbar) sin(hbar D/2m) - D = -(hbar^2/24m^2) D^3 + O(hbar^4), D = <-d_x ->d_vx
    const double d3f = f.spatial_velocity(x, v, 0, 3);
    const double V3 = pot.V.derivative(x, 3);
    const Vec3 A3 = pot.A.derivative(x, 3);
    const Vec3 B3 = pot.B.derivative(x, 3);
    const double sine = (e / m) * (V3 - v.dot(A3)) * d3f * Y - (mu / m) * (B3.dot(dY) + s.dot(B3) * Y) * d3f;
    const double r1 = hb * hb / (24.0 * m * m) * sine;

    // cosine bracket: cos(hbar D/2m) - 1 = -(hbar^2/8m^2) D^2 + O(hbar^4)
    const Vec3 A0 = pot.A.derivative(x, 0);
    const Vec3 A1 = pot.A.derivative(x, 1);
    const Vec3 A2 = pot.A.derivative(x, 2);
    // d^2/dx^2 [A_x dA/dx]
    const Vec3 adv = pot.A.c[0].derivative(x, 2) * A1 + 2.0 * pot.A.c[0].derivative(x, 1) * A2 + A0.x() * A3;
    const Vec3 B2 = pot.B.derivative(x, 2);
    const double cosine = (e / m) * A2.x() * f.spatial_velocity(x, v, 1, 2) * Y +
                          (e * e / (m * m)) *
                              (adv.x() * f.spatial_velocity(x, v, 0, 3) + adv.y() * f.spatial_velocity(x, v, 0, 2, 1) +
                               adv.z() * f.spatial_velocity(x, v, 0, 2, 0, 1)) *
                              Y -
                          (2.0 * mu / hb) * s.cross(B2).dot(dY) * f.spatial_velocity(x, v, 0, 2);
    const double r2 = hb * hb / (8.0 * m * m) * cosine;
    return r1 + r2;
}

namespace {

struct Pieces {
    double fx;   // d_x f
    Vec3 gv;     // grad_v f
    double Y;
    Vec3 dY;
    double g;    // X G
    double gvx;  // d_vx (X G)
    Vec3 E;
    Vec3 B;
    Vec3 dB;
};

Pieces pieces(const AnalyticDistribution& f, const StaticPotentials& pot, double x, const Vec3& v, const Vec3& s) {
    Pieces p;
    p.Y = f.spin_factor(s);
    p.dY = f.spin_gradient(s);
    p.g = f.spatial_velocity(x, v, 0, 0);
    p.gvx = f.spatial_velocity(x, v, 0, 1);
    p.fx = f.spatial_velocity(x, v, 1, 0) * p.Y;
    p.gv = Vec3(p.gvx, f.spatial_velocity(x, v, 0, 0, 1), f.spatial_velocity(x, v, 0, 0, 0, 1)) * p.Y;
    p.E = Vec3(-pot.V.derivative(x, 1), 0.0, 0.0);
    p.B = pot.B.derivative(x, 0);
    p.dB = pot.B.derivative(x, 1);
    return p;
}

}  // namespace

double full_equation_lhs(const AnalyticDistribution& f, const StaticPotentials& pot, const PlasmaParams& params,
                         double x, const Vec3& v, const Vec3& s) {
    const Pieces p = pieces(f, pot, x, v, s);
    const double qm = params.charge() / params.mass();
    const double sm = params.mu_b() / params.mass();
    // d_x[(grad_s + s).B] acting on d_vx f
    const double spin_x = sm * (p.dB.dot(p.dY) * p.gvx + s.dot(p.dB) * p.Y * p.gvx);
    return v.x() * p.fx - qm * (p.E + v.cross(p.B)).dot(p.gv) - spin_x -
           (2.0 * params.mu_b() / params.hbar()) * s.cross(p.B).dot(p.dY) * p.g;
}

double semiclassical_lhs(const AnalyticDistribution& f, const StaticPotentials& pot, const PlasmaParams& params,
                         double x, const Vec3& v, const Vec3& s) {
    const Pieces p = pieces(f, pot, x, v, s);
    const double qm = params.charge() / params.mass();
    const double sm = params.mu_b() / params.mass();
    const Vec3 force = qm * (p.E + v.cross(p.B)) + Vec3(sm * s.dot(p.dB), 0.0, 0.0);
    const double precession = (2.0 * params.mu_b() / params.hbar()) * s.cross(p.B).dot(p.dY) * p.g;
    const double mixed = sm * p.dB.dot(p.dY) * p.gvx;
    return v.x() * p.fx - force.dot(p.gv) - precession - mixed;
}

FullEquationResidual full_equation_residual_hbar2(const AnalyticDistribution& f, const StaticPotentials& pot,
                                                  const PlasmaParams& params, const std::vector<double>& hbar_list,
                                                  const PhaseSpaceSamples& samples) {
    pot.validate();
    if (hbar_list.empty()) throw InvalidArgument("full_equation_residual_hbar2: empty hbar list");
    FullEquationResidual out;
    for (double hb : hbar_list) {
        const PlasmaParams p(params.mass(), params.charge(), hb, params.eps0(), params.c());
        double rhs = 0.0;
        double diff = 0.0;
#pragma omp parallel for schedule(static) reduction(max : rhs, diff)
        for (std::size_t i = 0; i < samples.x.size(); ++i) {
            const double x = samples.x[i];
            for (const Vec3& v : samples.v) {
                for (const Vec3& s : samples.sphere.directions()) {
                    rhs = std::max(rhs, std::abs(full_equation_rhs(f, pot, p, x, v, s)));
                    diff = std::max(diff, std::abs(full_equation_lhs(f, pot, p, x, v, s) -
                                                   semiclassical_lhs(f, pot, p, x, v, s)));
                }
            }
        }
        out.hbar.push_back(hb);
        out.rhs_norm.push_back(rhs);
        out.lhs_difference.push_back(diff);
    }
    return out;
}

double FullEquationResidual::slope() const {
    const std::size_t n = hbar.size();
    if (n < 2) throw InvalidArgument("FullEquationResidual::slope: need at least two hbar values");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (!(rhs_norm[k] > 0.0)) throw InvalidState("FullEquationResidual::slope: zero residual");
        const double lx = std::log(hbar[k]);
        const double ly = std::log(rhs_norm[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double dn = static_cast<double>(n);
    return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

}  // namespace spinkin::kinetic
