#pragma once

#include "spinkin/common.hpp"
#include "spinkin/eulerian.hpp"
#include "spinkin/full_equation.hpp"
#include "spinkin/pauli_oracle.hpp"
#include "spinkin/profiles.hpp"
#include "spinkin/quantum_transforms.hpp"
#include "spinkin/states.hpp"

#include <array>
#include <string>
#include <vector>

namespace spinkin::gauge {

/// Static gauge function Lambda(x): constant c, linear alpha x + c, or beta sin(k x + phase).
class GaugeTransformSpec {
public:
    enum class Kind { constant, linear, single_mode };

    static GaugeTransformSpec constant(double c);
    static GaugeTransformSpec linear(double alpha, double c = 0.0);
    /// k must be commensurate with the domain when applied.
    static GaugeTransformSpec single_mode(double beta, double k, double phase = 0.0);
    /// By family name: "constant" (a), "linear" (a, b), "single_mode" (a, b, c).
    static GaugeTransformSpec make(const std::string& family, double a, double b = 0.0, double c = 0.0);

    Kind kind() const { return kind_; }
    double lambda(double x) const;
    double gradient(double x) const;
    GaugeTransformSpec negated() const;

private:
    Kind kind_ = Kind::constant;
    double a_ = 0.0;  // c, alpha or beta
    double b_ = 0.0;  // c or k
    double c_ = 0.0;  // phase
};

/// Spinor whose physical wavefunction is exp(i momentum_offset x / hbar) psi. The offset records
/// the non-periodic part of a linear gauge so psi stays periodic.
struct GaugedState {
    SpinorField psi;
    double momentum_offset = 0.0;
};

struct GaugePair {
    GaugedState state;
    oracle::ExternalPotentials pot;
};

/// psi' = psi exp(-i e Lambda/hbar), A' = A + grad Lambda, phi unchanged.
GaugePair gauge_transform_state(const GaugedState& state, const oracle::ExternalPotentials& pot,
                                const GaugeTransformSpec& g, const PlasmaParams& params);

/// Observables of the physical wavefunction, including the momentum offset.
oracle::Observables gauged_observables(const GaugedState& state, const oracle::ExternalPotentials& pot,
                                       const PlasmaParams& params);

/// Scalar and Pauli components [Tr W, Tr sigma_x W, Tr sigma_y W, Tr sigma_z W]; the axis of each field is v.
using SpinWigner = std::array<transforms::PhaseSpaceField, 4>;

struct GiOptions {
    std::size_t tau_nodes = 16;  ///< Gauss-Legendre nodes; checked against twice as many
};

/// Gauge-invariant Wigner components
/// (1/2 pi hbar) int dy exp{-(i/hbar) y [m v - e int_{-1/2}^{1/2} dtau A_x(x + tau y)]} psi(x+y/2) psi^dag(x-y/2).
/// Throws InvalidArgument when the tau quadrature and its doubled version differ by more than 1e-10.
SpinWigner gi_wigner_components(const GaugedState& state, const Profile& A_x, const PlasmaParams& params,
                                const UniformAxis& v_axis, GiOptions opts = {});

/// Gauge-invariant distribution contracted with the spin Q-projector: (W_0 + s_hat.W)/4 pi.
kinetic::ExtendedDistribution gi_wigner_transform(const GaugedState& state, const Profile& A_x,
                                                  const PlasmaParams& params, const UniformAxis& v_axis,
                                                  const SphereQuadrature& quad, GiOptions opts = {});

/// Canonical (gauge-dependent) Wigner components at p = m v.
SpinWigner canonical_wigner_components(const GaugedState& state, const PlasmaParams& params,
                                       const UniformAxis& v_axis);

/// Gauge-dependent Wigner components with the local kinetic shift, W(x, p = m v - e A_x(x)).
SpinWigner kinetic_wigner_components(const GaugedState& state, const Profile& A_x, const PlasmaParams& params,
                                     const UniformAxis& v_axis);

/// Q-projection of spin components onto a sphere quadrature.
kinetic::ExtendedDistribution q_project(const SpinWigner& w, const SphereQuadrature& quad);

/// A_x as a profile, band-limited from the grid samples of the potentials.
Profile vector_potential_x(const oracle::ExternalPotentials& pot);

/// O(hbar^2) h-operator series f + (e hbar^2/24 m^3) A_x'' d^3f/dv^3, with f on a velocity axis and the
/// v-derivatives taken spectrally. Only order 2 is supported.
transforms::PhaseSpaceField gi_correction_series(const transforms::PhaseSpaceField& f, const Profile& A_x,
                                                 const PlasmaParams& params, int order = 2);

/// max |gi - series(kinetic)| / max |kinetic| over the four spin components.
double gi_series_defect(const SpinWigner& gi, const SpinWigner& kinetic, const Profile& A_x,
                        const PlasmaParams& params);

/// Fields with their O(hbar^2) corrections, each correction applied to a closed-form test function.
/// The results are the correction operators acting on X G; multiply by the spin factor for f.
struct TildeFields {
    VectorProfile E;
    VectorProfile B;
    PlasmaParams params;

    /// -(hbar^2/24 m^2) E'' d^2/dv_x^2
    Vec3 e_corr(const kinetic::AnalyticDistribution& f, double x, const Vec3& v) const;
    /// -(hbar^2/24 m^2) B'' d^2/dv_x^2
    Vec3 b_corr(const kinetic::AnalyticDistribution& f, double x, const Vec3& v) const;
    /// -(e hbar^2/12 m^3) B' x grad_v d/dv_x
    Vec3 delta_v(const kinetic::AnalyticDistribution& f, double x, const Vec3& v) const;
    /// (hbar^2/12 m^2) B'' d^2/dv_x^2
    Vec3 delta_B(const kinetic::AnalyticDistribution& f, double x, const Vec3& v) const;
};

TildeFields tilde_fields_hbar2(const VectorProfile& E, const VectorProfile& B, const PlasmaParams& params);

struct GiKineticResidual {
    std::vector<double> hbar;
    std::vector<double> split_norm;        ///< max |split right-hand side|
    std::vector<double> bracket_norm;      ///< max |hbar^2 bracket|
    std::vector<double> residual;          ///< max |split - bracket|
    std::vector<double> identity_defect;   ///< max |(semiclassical - tilde form) - split|
    std::vector<double> reduction_defect;  ///< max |semiclassical form - full-equation semiclassical operator|

    /// Least-squares slope of log residual against log hbar over the last `window` points (0: all).
    double slope(std::size_t window = 0) const;
};

/// Kinetic equation with truncated tilde fields, rearranged into semiclassical part and corrections,
/// evaluated on closed-form f for every hbar in hbar_list. Sampled field profiles are rejected.
GiKineticResidual gi_kinetic_residual(const kinetic::AnalyticDistribution& f, const VectorProfile& E,
                                      const VectorProfile& B, const PlasmaParams& params,
                                      const std::vector<double>& hbar_list, const kinetic::PhaseSpaceSamples& samples);

}  // namespace spinkin::gauge
