#include "spinkin/acceptance.hpp"
#include "spinkin/diagnostics.hpp"
#include "spinkin/gauge.hpp"
#include "spinkin/io.hpp"
#include "spinkin/parallel.hpp"
#include "spinkin/pauli_oracle.hpp"
#include "spinkin/quantum_transforms.hpp"
#include "spinkin/scenarios.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>

using namespace spinkin;
using json = nlohmann::json;

namespace {

std::optional<std::string> env(const char* name) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
}

int cmd_run(const std::string& path, const std::string& out, long long seed, int threads) {
    auto cfg = runner::load_config(path);
    if (auto d = env("SPINKIN_OUTPUT_DIR")) cfg.output_dir = *d;
    if (!out.empty()) cfg.output_dir = out;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.validate();
    if (threads > 0) set_thread_count(threads);
    const auto r = runner::run_case(cfg);
    std::printf("%s: %zu of %zu steps, output in %s\n", cfg.scenario.c_str(), r.steps_done, cfg.steps(),
                r.directory.c_str());
    for (const auto& [k, v] : r.summary) std::printf("  %-20s %.10g\n", k.c_str(), v);
    if (!r.ok) std::fprintf(stderr, "step rejected: %s\n", r.message.c_str());
    return r.ok ? 0 : 1;
}

int cmd_check(const std::string& which) {
    int failed = 0;
    const auto& list = acceptance::checks();
    bool any = false;
    for (const auto& c : list) {
        if (which != "all" && which != c.name && which != std::to_string(c.id)) continue;
        any = true;
        const auto r = acceptance::run_check(c.id);
        std::printf("%s\n", acceptance::format_line(r).c_str());
        std::fflush(stdout);
        if (!r.passed) ++failed;
    }
    if (!any) throw InvalidArgument("unknown suite '" + which + "'");
    std::printf("%d check(s) failed\n", failed);
    return failed == 0 ? 0 : 1;
}

// State file: {"n", "length", "hbar", "mass", "family", "x0", "width", "p0", "theta", "phi", "separation",
// "nv", "v_max", "ax_amplitude", "ax_k", "n_theta", "n_phi"}.
int cmd_transform(const std::string& input, const std::string& kind, const std::string& out) {
    const auto j = json::parse(io::read_file(input));
    const Grid1D grid(j.value("n", 128), j.value("length", two_pi));
    const PlasmaParams params(j.value("mass", 1.0), 1.0, j.value("hbar", 1.0), 1.0, 1.0);
    oracle::InitParams ip;
    ip.x0 = j.value("x0", 0.5 * grid.length);
    ip.width = j.value("width", 0.5);
    ip.p0 = j.value("p0", 0.0);
    ip.theta = j.value("theta", 0.0);
    ip.phi = j.value("phi", 0.0);
    ip.separation = j.value("separation", 0.0);
    const auto psi = oracle::init_state(j.value("family", std::string("gaussian")), ip, grid, params);
    const auto v_axis = UniformAxis::symmetric(j.value("nv", 64), j.value("v_max", 4.0));

    io::Snapshot s;
    s.unit = "normalized";
    s.attributes["input"] = input;
    if (kind == "wigner" || kind == "gi") {
        gauge::SpinWigner w;
        if (kind == "wigner") {
            const UniformAxis p_axis{v_axis.n, params.mass() * v_axis.lo, params.mass() * v_axis.step};
            w = transforms::wigner_spin_components(psi, params, p_axis);
        } else {
            const auto A = Profile::single_mode(j.value("ax_amplitude", 0.0), j.value("ax_k", 1.0));
            w = gauge::gi_wigner_components({psi, 0.0}, A, params, v_axis);
        }
        s.quantity = kind == "wigner" ? "wigner_components" : "gi_wigner_components";
        s.axes = {{"component", "", 0.0, 3.0, 4},
                  {"x", "length", 0.0, grid.length - grid.dx(), grid.n},
                  {"v", "velocity", v_axis.lo, v_axis.at(v_axis.n - 1), v_axis.n}};
        s.attributes["components"] = "trace,sigma_x,sigma_y,sigma_z";
        for (const auto& c : w) s.data.insert(s.data.end(), c.values.begin(), c.values.end());
    } else if (kind == "spinq") {
        Mat2c rho = Mat2c::Zero();
        for (std::size_t i = 0; i < grid.n; ++i) {
            const Eigen::Vector2cd chi(psi.up[i], psi.down[i]);
            rho += chi * chi.adjoint() * grid.dx();
        }
        const SphereQuadrature quad(j.value("n_theta", 16), j.value("n_phi", 32));
        const auto f = transforms::spin_q_transform(rho, quad);
        s.quantity = "spin_q";
        s.axes = {{"theta_node", "", 0.0, static_cast<double>(quad.n_theta() - 1), quad.n_theta()},
                  {"phi_node", "", 0.0, static_cast<double>(quad.n_phi() - 1), quad.n_phi()}};
        s.data = f.values;
    } else {
        throw InvalidArgument("unknown transform kind '" + kind + "' (wigner, spinq or gi)");
    }
    io::write_snapshot(out, s);
    std::printf("wrote %s.f64 and %s.json\n", out.c_str(), out.c_str());
    return 0;
}

int cmd_fit(const std::string& input, const std::string& column) {
    const auto series = io::DiagnosticsSeries::from_csv(io::read_file(input));
    const auto fit = diagnostics::fit_frequency(series, column);
    if (!fit.conclusive) {
        std::printf("inconclusive: %s\n", fit.reason.c_str());
        return 1;
    }
    std::printf("omega %.12g +- %.3g\ngamma %.12g +- %.3g\npeak_ratio %.4g\nperiods %.4g\n", fit.omega,
                fit.omega_uncertainty, fit.gamma, fit.gamma_uncertainty, fit.peak_ratio, fit.periods);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spin-kinetic plasma toolkit"};
    app.set_version_flag("--version", io::code_version());
    app.require_subcommand(1);

    std::string config, out, suite = "all", input, kind, column, stem = "transform";
    long long seed = -1;
    int threads = 0;

    auto* run = app.add_subcommand("run", "run a scenario from a JSON config");
    run->add_option("--config", config, "config file")->required();
    run->add_option("--out", out, "output directory");
    run->add_option("--seed", seed, "random seed");
    run->add_option("--threads", threads, "worker threads");

    auto* check = app.add_subcommand("check", "run acceptance checks");
    check->add_option("suite", suite, "all, a check name or number");
    check->add_option("--threads", threads, "worker threads");

    auto* transform = app.add_subcommand("transform", "phase-space transform of a state");
    transform->add_option("--input", input, "state description (JSON)")->required();
    transform->add_option("--kind", kind, "wigner, spinq or gi")->required();
    transform->add_option("--out", stem, "output stem");

    auto* fit = app.add_subcommand("fit", "fit a frequency to a diagnostics column");
    fit->add_option("--input", input, "diagnostics CSV")->required();
    fit->add_option("--column", column, "column name")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (threads <= 0)
            if (auto t = env("SPINKIN_THREADS")) threads = std::stoi(*t);
        if (threads > 0) set_thread_count(threads);
        if (*run) return cmd_run(config, out, seed, threads);
        if (*check) return cmd_check(suite);
        if (*transform) return cmd_transform(input, kind, stem);
        if (*fit) return cmd_fit(input, column);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
