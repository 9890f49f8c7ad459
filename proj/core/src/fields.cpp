#include "spinkin/fields.hpp"

#include "spinkin/spectral.hpp"

#include <cmath>
#include <string>

namespace spinkin::fields {

namespace {

std::vector<double> component(const Vec3Field& f, int a) {
    std::vector<double> c(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) c[i] = f[i][a];
    return c;
}

// average of half-node values onto node i: (h[i-1] + h[i]) / 2
std::vector<double> half_to_nodes(const std::vector<double>& h) {
    const std::size_t n = h.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (h[(i + n - 1) % n] + h[i]);
    return out;
}

}  // namespace

FieldState FieldState::zeros(const Grid1D& grid) {
    FieldState f;
    f.grid = grid;
    const std::vector<double> z(grid.n, 0.0);
    f.ex = f.ey = f.ez = f.by = f.bz = f.phi = f.rho = z;
    f.M = f.j_free = f.j_bound = Vec3Field(grid.n, Vec3::Zero());
    return f;
}

Vec3Field FieldState::E_nodes() const {
    const auto exn = half_to_nodes(ex);
    Vec3Field out(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) out[i] = Vec3(exn[i], ey[i], ez[i]);
    return out;
}

Vec3Field FieldState::B_nodes() const {
    const auto byn = half_to_nodes(by);
    const auto bzn = half_to_nodes(bz);
    Vec3Field out(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) out[i] = Vec3(bx, byn[i], bzn[i]);
    return out;
}

Vec3Field FieldState::H(const PlasmaParams& params) const {
    auto out = B_nodes();
    for (std::size_t i = 0; i < grid.n; ++i) out[i] = out[i] / params.mu0() - M[i];
    return out;
}

PoissonSolution solve_poisson(const std::vector<double>& rho, const Grid1D& grid, const PlasmaParams& params) {
    if (rho.size() != grid.n) throw InvalidArgument("solve_poisson: size mismatch");
    double mean = 0.0;
    for (double r : rho) mean += r;
    mean /= static_cast<double>(grid.n);
    if (std::abs(mean) > 1e-10)
        throw InvalidArgument("solve_poisson: net charge density " + std::to_string(mean) + " is not neutral");
    std::vector<cplx> z(rho.begin(), rho.end());
    auto spec = spectral::fft(z);
    const auto k = spectral::wavenumbers(grid);
    for (std::size_t j = 0; j < grid.n; ++j) spec[j] = k[j] == 0.0 ? cplx(0.0) : spec[j] / (params.eps0() * k[j] * k[j]);
    const auto phi_c = spectral::ifft(spec);
    PoissonSolution s;
    s.phi.resize(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) s.phi[i] = phi_c[i].real();
    s.ex = spectral::derivative(std::span<const double>(s.phi), grid);
    for (auto& e : s.ex) e = -e;
    return s;
}

Vec3Field curl_magnetization(const Vec3Field& M, const Grid1D& grid, CurlMethod method) {
    if (M.size() != grid.n) throw InvalidArgument("curl_magnetization: size mismatch");
    const auto my = component(M, 1);
    const auto mz = component(M, 2);
    std::vector<double> dmy, dmz;
    if (method == CurlMethod::spectral) {
        dmy = spectral::derivative(std::span<const double>(my), grid);
        dmz = spectral::derivative(std::span<const double>(mz), grid);
    } else {
        const std::size_t n = grid.n;
        dmy.resize(n);
        dmz.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            dmy[i] = (my[(i + 1) % n] - my[(i + n - 1) % n]) / (2.0 * grid.dx());
            dmz[i] = (mz[(i + 1) % n] - mz[(i + n - 1) % n]) / (2.0 * grid.dx());
        }
    }
    Vec3Field out(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) out[i] = Vec3(0.0, -dmz[i], dmy[i]);
    return out;
}

FieldState maxwell_step(const FieldState& fs, const Vec3Field& j_free, const Vec3Field& M, const PlasmaParams& params,
                        double dt, CurlMethod method) {
    const Grid1D& g = fs.grid;
    const std::size_t n = g.n;
    if (j_free.size() != n || M.size() != n) throw InvalidArgument("maxwell_step: source size mismatch");
    if (!(dt > 0)) throw InvalidArgument("maxwell_step: dt must be positive");
    const double dx = g.dx();
    const double courant = params.c() * dt / dx;
    if (courant > 1.0) throw StepRejected("maxwell_step: Courant number " + std::to_string(courant) + " exceeds 1");

    FieldState out = fs;
    out.M = M;
    out.j_free = j_free;
    out.j_bound = curl_magnetization(M, g, method);

    auto half_b = [&]() {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t ip = (i + 1) % n;
            out.by[i] += 0.5 * dt * (out.ez[ip] - out.ez[i]) / dx;
            out.bz[i] -= 0.5 * dt * (out.ey[ip] - out.ey[i]) / dx;
        }
    };
    half_b();
    const double c2 = params.c() * params.c();
    const double ie = 1.0 / params.eps0();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t im = (i + n - 1) % n;
        const Vec3 J = j_free[i] + out.j_bound[i];
        out.ey[i] += dt * (-c2 * (out.bz[i] - out.bz[im]) / dx - ie * J.y());
        out.ez[i] += dt * (c2 * (out.by[i] - out.by[im]) / dx - ie * J.z());
        out.ex[i] -= dt * ie * j_free[i].x();
    }
    half_b();
    return out;
}

double gauss_residual(const FieldState& fs, const PlasmaParams& params) {
    const std::size_t n = fs.grid.n;
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double div = (fs.ex[i] - fs.ex[(i + n - 1) % n]) / fs.grid.dx();
        r = std::max(r, std::abs(div - fs.rho[i] / params.eps0()));
    }
    return r;
}

double field_energy(const FieldState& fs, const PlasmaParams& params) {
    double e2 = 0.0;
    double b2 = 0.0;
    for (std::size_t i = 0; i < fs.grid.n; ++i) {
        e2 += fs.ex[i] * fs.ex[i] + fs.ey[i] * fs.ey[i] + fs.ez[i] * fs.ez[i];
        b2 += fs.bx * fs.bx + fs.by[i] * fs.by[i] + fs.bz[i] * fs.bz[i];
    }
    return fs.grid.dx() * (0.5 * params.eps0() * e2 + 0.5 * b2 / params.mu0());
}

ExternalField ExternalField::make(const std::string& kind, double b0, double b1, double e0, double k, double length) {
    if (kind == "none") return {};
    if (kind == "uniform_B") return uniform_b(b0);
    if (kind == "gradient_B") return gradient_b(b0, b1, length);
    if (kind == "single_mode_E") return single_mode_e(e0, k);
    throw InvalidArgument("ExternalField: unknown kind '" + kind + "'");
}

ExternalField ExternalField::uniform_b(double b0) {
    ExternalField f;
    f.kind_ = Kind::uniform_B;
    f.b0_ = b0;
    return f;
}

ExternalField ExternalField::gradient_b(double b0, double b1, double length) {
    ExternalField f;
    f.kind_ = Kind::gradient_B;
    f.b0_ = b0;
    f.b1_ = b1;
    f.center_ = length / 2.0;
    f.note_ = "B_z = B0 + B1 (x - L/2) is not periodic; div B = 0 holds trivially in 1D, and the jump at the "
              "domain edge is outside the region of interest";
    return f;
}

ExternalField ExternalField::single_mode_e(double e0, double k) {
    ExternalField f;
    f.kind_ = Kind::single_mode_E;
    f.e0_ = e0;
    f.k_ = k;
    return f;
}

Vec3 ExternalField::E(double x) const {
    if (kind_ == Kind::single_mode_E) return Vec3(e0_ * std::sin(k_ * x), 0.0, 0.0);
    return Vec3::Zero();
}

Vec3 ExternalField::B(double x) const {
    switch (kind_) {
    case Kind::uniform_B: return Vec3(0.0, 0.0, b0_);
    case Kind::gradient_B: return Vec3(0.0, 0.0, b0_ + b1_ * (x - center_));
    default: return Vec3::Zero();
    }
}

Vec3 ExternalField::dB(double) const {
    if (kind_ == Kind::gradient_B) return Vec3(0.0, 0.0, b1_);
    return Vec3::Zero();
}

}  // namespace spinkin::fields
