#include "spinkin/quantum_transforms.hpp"

#include "spinkin/spectral.hpp"

#include <cmath>
#include <string>

namespace spinkin::transforms {

PhaseSpaceField::PhaseSpaceField(Grid1D xg, UniformAxis pa)
    : x(xg), p(pa), values(xg.n * pa.n, 0.0) {}

PhaseSpaceField::PhaseSpaceField(Grid1D xg, UniformAxis pa, std::vector<double> v)
    : x(xg), p(pa), values(std::move(v)) {
    if (values.size() != x.n * p.n) throw InvalidArgument("PhaseSpaceField: value count does not match grid");
}

bool PhaseSpaceField::all_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

UniformAxis conjugate_momentum_axis(const Grid1D& grid, double hbar) {
    const double dp = two_pi * hbar / grid.length;
    return {grid.n, -static_cast<double>(grid.n / 2) * dp, dp};
}

namespace {

bool is_conjugate(const UniformAxis& axis, const Grid1D& grid, double hbar) {
    const auto c = conjugate_momentum_axis(grid, hbar);
    return axis.n == c.n && std::abs(axis.step - c.step) <= 1e-12 * c.step &&
           std::abs(axis.lo - c.lo) <= 1e-12 * std::abs(c.lo);
}

void require_normalized(const WaveFunction1D& psi) {
    if (!psi.is_normalized(1e-10))
        throw InvalidState("wigner_transform: wavefunction is not normalized (norm^2 = " +
                           std::to_string(psi.norm_squared()) + ")");
}

}  // namespace

std::vector<cplx> cross_wigner(std::span<const cplx> a, std::span<const cplx> b, const Grid1D& grid,
                               double hbar, const UniformAxis& p_axis, double momentum_offset) {
    if (a.size() != grid.n || b.size() != grid.n) throw InvalidArgument("cross_wigner: size mismatch");
    if (grid.n % 2 != 0) throw InvalidArgument("cross_wigner: grid size must be even");
    const std::size_t n = grid.n;
    const std::size_t n2 = 2 * n;
    const auto ah = spectral::upsample2(a, grid);
    const auto bh = spectral::upsample2(b, grid);
    const double dx = grid.dx();
    const double pref = dx / (two_pi * hbar);
    const auto half = static_cast<long>(n / 2);

    std::vector<cplx> out(n * p_axis.n);
    const bool fast = momentum_offset == 0.0 && is_conjugate(p_axis, grid, hbar);

    std::vector<cplx> table;
    if (!fast) {
        table.resize(p_axis.n * n);
        for (std::size_t k = 0; k < p_axis.n; ++k)
            for (long m = -half; m < half; ++m) {
                const double y = static_cast<double>(m) * dx;
                table[k * n + static_cast<std::size_t>(m + half)] =
                    std::exp(cplx(0.0, -(p_axis.at(k) - momentum_offset) * y / hbar));
            }
    }

    std::vector<cplx> g(n);
    for (std::size_t j = 0; j < n; ++j) {
        // g over m in [-n/2, n/2): a(x_j + m dx/2) b*(x_j - m dx/2) on the doubled grid
        for (long m = -half; m < half; ++m) {
            const auto ip = static_cast<std::size_t>((static_cast<long>(2 * j) + m + static_cast<long>(n2)) %
                                                     static_cast<long>(n2));
            const auto im = static_cast<std::size_t>((static_cast<long>(2 * j) - m + static_cast<long>(n2)) %
                                                     static_cast<long>(n2));
            const cplx v = ah[ip] * std::conj(bh[im]);
            if (fast)
                g[static_cast<std::size_t>((m + static_cast<long>(n)) % static_cast<long>(n))] = v;
            else
                g[static_cast<std::size_t>(m + half)] = v;
        }
        if (fast) {
            const auto h = spectral::fft(g);
            for (std::size_t k = 0; k < n; ++k) out[j * n + k] = pref * h[(k + n / 2) % n];
        } else {
            for (std::size_t k = 0; k < p_axis.n; ++k) {
                cplx s = 0.0;
                const cplx* row = &table[k * n];
                for (std::size_t q = 0; q < n; ++q) s += row[q] * g[q];
                out[j * p_axis.n + k] = pref * s;
            }
        }
    }
    return out;
}

PhaseSpaceField wigner_transform(const WaveFunction1D& psi, const PlasmaParams& params,
                                 const UniformAxis& p_axis) {
    require_normalized(psi);
    const auto w = cross_wigner(psi.psi, psi.psi, psi.grid, params.hbar(), p_axis);
    PhaseSpaceField f(psi.grid, p_axis);
    for (std::size_t i = 0; i < w.size(); ++i) f.values[i] = w[i].real();
    return f;
}

PhaseSpaceField wigner_transform(const WaveFunction1D& psi, const PlasmaParams& params, std::size_t n_v,
                                 double v_max) {
    if (!(v_max > 0)) throw InvalidArgument("wigner_transform: v_max must be positive");
    if (n_v % 2 != 0) throw InvalidArgument("wigner_transform: N_v must be even");
    const double m = params.mass();
    UniformAxis axis = UniformAxis::symmetric(n_v, m * v_max);
    // Snap onto the conjugate grid when it is the one requested.
    const auto c = conjugate_momentum_axis(psi.grid, params.hbar());
    if (axis.n == c.n && std::abs(axis.step - c.step) <= 1e-12 * c.step) axis = c;
    return wigner_transform(psi, params, axis);
}

std::array<PhaseSpaceField, 4> wigner_spin_components(const SpinorField& psi, const PlasmaParams& params,
                                                      const UniformAxis& p_axis) {
    const double h = params.hbar();
    const auto uu = cross_wigner(psi.up, psi.up, psi.grid, h, p_axis);
    const auto dd = cross_wigner(psi.down, psi.down, psi.grid, h, p_axis);
    const auto ud = cross_wigner(psi.up, psi.down, psi.grid, h, p_axis);  // W_{up,down}
    std::array<PhaseSpaceField, 4> out;
    for (auto& f : out) f = PhaseSpaceField(psi.grid, p_axis);
    for (std::size_t i = 0; i < uu.size(); ++i) {
        // W_{down,up} = conj(W_{up,down}) pointwise for a Hermitian Wigner matrix
        const cplx du = std::conj(ud[i]);
        out[0].values[i] = (uu[i] + dd[i]).real();
        out[1].values[i] = (ud[i] + du).real();                    // Tr(sigma_x W)
        out[2].values[i] = (cplx(0, -1) * du + cplx(0, 1) * ud[i]).real();  // Tr(sigma_y W)
        out[3].values[i] = (uu[i] - dd[i]).real();
    }
    return out;
}

Marginals marginals(const PhaseSpaceField& f) {
    if (!f.all_finite()) throw InvalidArgument("marginals: non-finite values");
    Marginals m{f.x, f.p, std::vector<double>(f.x.n, 0.0), std::vector<double>(f.p.n, 0.0)};
    const double dx = f.x.dx();
    const double dp = f.p.step;
    for (std::size_t i = 0; i < f.x.n; ++i)
        for (std::size_t k = 0; k < f.p.n; ++k) {
            m.density_x[i] += f.at(i, k) * dp;
            m.density_p[k] += f.at(i, k) * dx;
        }
    return m;
}

double expect_phase_space(const PhaseSpaceField& f, const PhaseSpaceField& symbol) {
    if (!f.same_grid(symbol)) throw InvalidArgument("expect_phase_space: symbol grid does not match");
    double s = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) s += f.values[i] * symbol.values[i];
    return s * f.x.dx() * f.p.step;
}

double expect_phase_space(const PhaseSpaceField& f, const std::function<double(double, double)>& symbol) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.x.n; ++i)
        for (std::size_t k = 0; k < f.p.n; ++k) s += f.at(i, k) * symbol(f.x.x(i), f.p.at(k));
    return s * f.x.dx() * f.p.step;
}

SpinDistribution spin_q_transform(const Mat2c& rho, const SphereQuadrature& quad) {
    if (hermiticity_defect(rho) >= 1e-14) throw InvalidState("spin_q_transform: rho is not Hermitian");
    const cplx tr = rho.trace();
    std::array<cplx, 3> t;
    for (int a = 0; a < 3; ++a) t[static_cast<std::size_t>(a)] = (pauli(a) * rho).trace();
    SpinDistribution out{quad, std::vector<double>(quad.size())};
    for (std::size_t j = 0; j < quad.size(); ++j) {
        const Vec3& s = quad.direction(j);
        const cplx v = (tr + s.x() * t[0] + s.y() * t[1] + s.z() * t[2]) / (4.0 * pi);
        if (std::abs(v.imag()) > 1e-14) throw InvalidState("spin_q_transform: complex Q-value");
        out.values[j] = v.real();
    }
    return out;
}

SpinDistribution spin_q_transform(const DensityMatrixSpin& rho, const SphereQuadrature& quad) {
    return spin_q_transform(rho.matrix(), quad);
}

SpinMoments spin_moments_and_reconstruct(const SpinDistribution& f) {
    SpinMoments m;
    m.scalar = f.quad.integrate(f.values);
    m.vector = 3.0 * f.quad.first_moment(f.values);
    m.rho = m.scalar * Mat2c::Identity();
    for (int a = 0; a < 3; ++a) m.rho += m.vector[a] * pauli(a);
    m.rho *= 0.5;
    const double lo = min_eigenvalue_hermitian(m.rho);
    if (lo < -1e-8)
        throw InvalidState("spin_moments_and_reconstruct: reconstructed rho has eigenvalue " + std::to_string(lo));
    return m;
}

}  // namespace spinkin::transforms
