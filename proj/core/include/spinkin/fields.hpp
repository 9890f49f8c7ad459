#pragma once

#include "spinkin/common.hpp"

#include <string>
#include <vector>

namespace spinkin::fields {

/// 1D staggered field layout on the periodic grid.
/// Nodes x_i: E_y, E_z, phi, rho, M, j_free y/z, j_bound.
/// Half nodes x_{i+1/2}: E_x, B_y, B_z, j_free x.
struct FieldState {
    Grid1D grid;
    std::vector<double> ex;
    std::vector<double> ey;
    std::vector<double> ez;
    double bx = 0.0;
    std::vector<double> by;
    std::vector<double> bz;
    std::vector<double> phi;
    std::vector<double> rho;
    Vec3Field M;
    Vec3Field j_free;
    Vec3Field j_bound;

    static FieldState zeros(const Grid1D& grid);

    /// E and B interpolated to the nodes.
    Vec3Field E_nodes() const;
    Vec3Field B_nodes() const;
    /// H = B/mu0 - M at the nodes (read only).
    Vec3Field H(const PlasmaParams& params) const;
};

struct PoissonSolution {
    std::vector<double> phi;  ///< nodes
    std::vector<double> ex;   ///< nodes
};

/// d^2 phi/dx^2 = -rho/eps0 on the periodic grid, zero-mean phi, E_x = -dphi/dx.
/// Rejects input whose mean charge density exceeds 1e-10.
PoissonSolution solve_poisson(const std::vector<double>& rho, const Grid1D& grid, const PlasmaParams& params);

enum class CurlMethod { spectral, centered };

/// (0, -dM_z/dx, dM_y/dx) at the nodes.
Vec3Field curl_magnetization(const Vec3Field& M, const Grid1D& grid, CurlMethod method = CurlMethod::spectral);

/// Leapfrog update of the transverse fields and E_x from the total current j_free + curl M.
/// B is advanced in two half steps around the E update. Requires c dt/dx <= 1.
FieldState maxwell_step(const FieldState& fs, const Vec3Field& j_free, const Vec3Field& M, const PlasmaParams& params,
                        double dt, CurlMethod method = CurlMethod::spectral);

/// max |(E_x(i+1/2) - E_x(i-1/2))/dx - rho_i/eps0|
double gauss_residual(const FieldState& fs, const PlasmaParams& params);

/// (eps0/2) int |E|^2 + (1/2 mu0) int |B|^2
double field_energy(const FieldState& fs, const PlasmaParams& params);

/// Analytic external fields, added at gather time and never evolved.
class ExternalField {
public:
    enum class Kind { none, uniform_B, gradient_B, single_mode_E };

    ExternalField() = default;
    /// kind: "none", "uniform_B", "gradient_B" or "single_mode_E".
    static ExternalField make(const std::string& kind, double b0, double b1, double e0, double k, double length);
    static ExternalField uniform_b(double b0);
    static ExternalField gradient_b(double b0, double b1, double length);
    static ExternalField single_mode_e(double e0, double k);

    Kind kind() const { return kind_; }
    Vec3 E(double x) const;
    Vec3 B(double x) const;
    Vec3 dB(double x) const;
    const std::string& note() const { return note_; }

private:
    Kind kind_ = Kind::none;
    double b0_ = 0.0;
    double b1_ = 0.0;
    double e0_ = 0.0;
    double k_ = 0.0;
    double center_ = 0.0;
    std::string note_;
};

}  // namespace spinkin::fields
