#pragma once

#include "spinkin/common.hpp"

#include <array>
#include <span>
#include <vector>

namespace spinkin {

/// Scalar profile F(x) in one of the closed-form families used by the
/// residual evaluators, with exact derivatives of any order.
class Profile {
public:
    enum class Kind { uniform, polynomial, single_mode, sampled };

    Profile() = default;

    static Profile uniform(double value);
    /// sum_n coeffs[n] * (x - center)^n
    static Profile polynomial(std::vector<double> coeffs, double center = 0.0);
    /// amplitude * cos(k x + phase)
    static Profile single_mode(double amplitude, double k, double phase = 0.0);
    /// Band-limited interpolant of grid samples.
    static Profile sampled(const Grid1D& grid, std::vector<double> values);

    Kind kind() const { return kind_; }
    double operator()(double x) const { return derivative(x, 0); }
    double derivative(double x, int order) const;
    std::vector<double> sample(const Grid1D& grid, int order = 0) const;

    bool is_uniform() const;

    double amplitude() const { return amplitude_; }
    double wavenumber() const { return k_; }
    double phase() const { return phase_; }

private:
    Kind kind_ = Kind::uniform;
    std::vector<double> coeffs_{0.0};
    double center_ = 0.0;
    double amplitude_ = 0.0;
    double k_ = 0.0;
    double phase_ = 0.0;
    Grid1D grid_;
    std::vector<cplx> spectrum_;
};

/// Three Cartesian components, each depending on x only.
struct VectorProfile {
    std::array<Profile, 3> c{Profile::uniform(0.0), Profile::uniform(0.0), Profile::uniform(0.0)};

    static VectorProfile zero() { return {}; }
    static VectorProfile uniform(const Vec3& v);

    Vec3 operator()(double x) const { return derivative(x, 0); }
    Vec3 derivative(double x, int order) const;
    bool is_uniform() const;
};

}  // namespace spinkin
