#pragma once

#include "spinkin/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace spinkin::runner {

/// Schema violation; what() lists every offending key.
class ConfigError : public InvalidArgument {
public:
    explicit ConfigError(std::vector<std::string> issues);
    const std::vector<std::string>& issues() const { return issues_; }

private:
    std::vector<std::string> issues_;
};

struct RunConfig {
    std::string scenario = "precession";
    std::string backend = "pic";  ///< pic | eulerian | fluid | oracle

    std::size_t nx = 32;
    double length = two_pi;
    std::size_t nv = 64;
    double v_max = 4.0;
    std::size_t n_theta = 4;
    std::size_t n_phi = 7;

    double mass = 1.0;
    double charge = 1.0;
    double hbar = 1.0;
    double eps0 = 1.0;
    double c = 10.0;
    double density = 1.0;

    std::size_t particles = 1000;
    std::uint64_t seed = 1;
    double v_thermal = 0.0;
    double amplitude = 0.0;
    int mode = 1;

    double dt = 0.05;
    double t_end = 1.0;
    std::size_t cadence = 1;

    bool quantum_term = false;
    std::string limiter = "mc";  ///< mc | none

    std::string field = "none";  ///< none | uniform_B | gradient_B | single_mode_E
    double B0 = 0.0;
    double B1 = 0.0;
    double E0 = 0.0;
    double field_k = 0.0;

    std::string output_dir = "spinkin_out";
    bool snapshots = true;

    PlasmaParams params() const { return {mass, charge, hbar, eps0, c}; }
    std::size_t steps() const;

    /// Throws ConfigError listing every violated constraint.
    void validate() const;

    bool operator==(const RunConfig&) const = default;
};

/// Defaults for a named scenario: precession, plasma_osc, free_stream, stern_gerlach, madelung_pauli.
RunConfig preset(const std::string& scenario);
std::vector<std::string> scenario_names();
std::vector<std::string> supported_backends(const std::string& scenario);

/// Strict flat JSON: unknown keys and type errors are collected and reported together.
/// Missing keys take the scenario preset value.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// Every key, pretty printed.
std::string to_json(const RunConfig& cfg);

}  // namespace spinkin::runner
