#include "spinkin/scenarios.hpp"

#include "spinkin/diagnostics.hpp"
#include "spinkin/eulerian.hpp"
#include "spinkin/fields.hpp"
#include "spinkin/madelung_fluid.hpp"
#include "spinkin/particles.hpp"
#include "spinkin/pauli_oracle.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <memory>
#include <numeric>

namespace spinkin::runner {

namespace {

using json = nlohmann::json;

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double slope_of(const std::vector<double>& t, const std::vector<double>& y) {
    const double mt = std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(t.size());
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        sxy += (t[i] - mt) * (y[i] - my);
        sxx += (t[i] - mt) * (t[i] - mt);
    }
    return sxy / sxx;
}

void put_fit(std::map<std::string, double>& out, const diagnostics::FrequencyFit& fit, double expected) {
    out["omega_expected"] = expected;
    out["fit_conclusive"] = fit.conclusive ? 1.0 : 0.0;
    if (!fit.conclusive) return;
    out["omega_fit"] = fit.omega;
    out["omega_uncertainty"] = fit.omega_uncertainty;
    out["gamma_fit"] = fit.gamma;
    out["omega_rel_error"] = std::abs(fit.omega / expected - 1.0);
}

class Backend {
public:
    virtual ~Backend() = default;
    virtual std::vector<std::string> columns() const = 0;
    virtual std::vector<double> diagnose() const = 0;
    /// Replaces the state only when the whole step succeeds.
    virtual void step(double dt) = 0;
    virtual io::Snapshot snapshot() const = 0;
    virtual void summarize(const io::DiagnosticsSeries& series, std::map<std::string, double>& out) const = 0;
    /// Non-empty when the run should end normally before t_end.
    virtual std::string finished() const { return {}; }

    double time = 0.0;
};

// Electrostatic E_x at half nodes: E_{i+1/2} - E_{i-1/2} = dx rho_i / eps0 with zero mean.
std::vector<double> gauss_half_nodes(std::vector<double> rho, const Grid1D& grid, const PlasmaParams& p) {
    const double mean = std::accumulate(rho.begin(), rho.end(), 0.0) / static_cast<double>(rho.size());
    for (double& r : rho) r -= mean;
    std::vector<double> ex(grid.n, 0.0);
    for (std::size_t i = 1; i < grid.n; ++i) ex[i] = ex[i - 1] + grid.dx() * rho[i] / p.eps0();
    const double em = std::accumulate(ex.begin(), ex.end(), 0.0) / static_cast<double>(grid.n);
    for (double& e : ex) e -= em;
    return ex;
}

class PicBackend final : public Backend {
public:
    explicit PicBackend(const RunConfig& cfg)
        : cfg_(cfg), p_(cfg.params()), grid_(cfg.nx, cfg.length), fs_(fields::FieldState::zeros(grid_)),
          ext_(fields::ExternalField::make(cfg.field, cfg.B0, cfg.B1, cfg.E0, cfg.field_k, cfg.length)) {
        electrostatic_ = cfg.scenario == "plasma_osc";
        beams_ = cfg.scenario == "stern_gerlach";
        if (beams_) {
            const double w = cfg.density * cfg.length / static_cast<double>(cfg.particles);
            for (std::size_t i = 0; i < cfg.particles; ++i)
                ens_.push_back(0.5 * cfg.length, Vec3::Zero(), Vec3(0, 0, i % 2 == 0 ? 1.0 : -1.0), w);
        } else {
            kinetic::LoadSpec spec;
            spec.count = cfg.particles;
            spec.density = cfg.density;
            spec.amplitude = cfg.amplitude;
            spec.mode = cfg.mode;
            spec.v_thermal = cfg.v_thermal;
            spec.spin_axis = cfg.scenario == "precession" ? Vec3(1, 0, 0) : Vec3(0, 0, 1);
            spec.seed = cfg.seed;
            ens_ = kinetic::load_particles(spec, grid_);
        }
        solve_fields();
    }

    std::vector<std::string> columns() const override {
        std::vector<std::string> c{"sx", "sy", "sz", "spin_dev", "kinetic", "field_energy", "total_energy", "e_mode"};
        if (beams_) c.insert(c.end(), {"vx_up", "vx_down"});
        return c;
    }

    std::vector<double> diagnose() const override {
        const auto d = kinetic::particle_diagnostics(ens_, fs_, ext_, p_);
        Vec3 s = Vec3::Zero();
        double wsum = 0.0;
        for (std::size_t i = 0; i < ens_.size(); ++i) {
            s += ens_.w[i] * ens_.s[i];
            wsum += ens_.w[i];
        }
        s /= wsum;
        double fe = 0.0, mode = 0.0;
        const double k = two_pi * cfg_.mode / cfg_.length;
        for (std::size_t i = 0; i < grid_.n; ++i) {
            fe += 0.5 * p_.eps0() * fs_.ex[i] * fs_.ex[i] * grid_.dx();
            mode += 2.0 / static_cast<double>(grid_.n) * fs_.ex[i] * std::sin(k * (grid_.x(i) + 0.5 * grid_.dx()));
        }
        std::vector<double> out{s.x(), s.y(), s.z(), d.spin_norm_deviation, d.kinetic_energy, fe, d.kinetic_energy + fe,
                                mode};
        if (beams_) {
            double up = 0.0, down = 0.0, wu = 0.0, wd = 0.0;
            for (std::size_t i = 0; i < ens_.size(); ++i) {
                if (ens_.s[i].z() > 0) {
                    up += ens_.w[i] * ens_.v[i].x();
                    wu += ens_.w[i];
                } else {
                    down += ens_.w[i] * ens_.v[i].x();
                    wd += ens_.w[i];
                }
            }
            out.push_back(wu > 0 ? up / wu : 0.0);
            out.push_back(wd > 0 ? down / wd : 0.0);
        }
        return out;
    }

    void step(double dt) override {
        auto next = ens_;
        kinetic::push_particles(next, fs_, ext_, p_, dt);
        next.validate();
        ens_ = std::move(next);
        solve_fields();
        time += dt;
    }

    io::Snapshot snapshot() const override {
        io::Snapshot s;
        s.quantity = "particles";
        s.unit = "normalized";
        s.time = time;
        s.axes = {{"particle", "index", 0.0, static_cast<double>(ens_.size() - 1), ens_.size()},
                  {"component", "", 0.0, 7.0, 8}};
        s.attributes["components"] = "x,vx,vy,vz,sx,sy,sz,w";
        s.data.reserve(ens_.size() * 8);
        for (std::size_t i = 0; i < ens_.size(); ++i)
            for (double v : {ens_.x[i], ens_.v[i].x(), ens_.v[i].y(), ens_.v[i].z(), ens_.s[i].x(), ens_.s[i].y(),
                             ens_.s[i].z(), ens_.w[i]})
                s.data.push_back(v);
        return s;
    }

    void summarize(const io::DiagnosticsSeries& series, std::map<std::string, double>& out) const override {
        out["spin_dev_max"] = max_abs(series.column("spin_dev"));
        if (cfg_.scenario == "precession") {
            put_fit(out, diagnostics::fit_frequency(series, "sx"), 2.0 * p_.mu_b() * cfg_.B0 / p_.hbar());
        } else if (cfg_.scenario == "plasma_osc") {
            put_fit(out, diagnostics::fit_frequency(series, "e_mode"),
                    std::sqrt(cfg_.density * p_.charge() * p_.charge() / (p_.eps0() * p_.mass())));
        } else if (beams_ && series.size() >= 2) {
            const double expected = p_.mu_b() * cfg_.B1 / p_.mass();
            out["accel_up"] = slope_of(series.time(), series.column("vx_up"));
            out["accel_down"] = slope_of(series.time(), series.column("vx_down"));
            out["accel_up_expected"] = -expected;
            out["accel_down_expected"] = expected;
        }
    }

private:
    void solve_fields() {
        if (!electrostatic_) return;
        auto rho = kinetic::deposit_charge(ens_, grid_, p_);
        for (double& r : rho) r += p_.charge() * cfg_.density;
        fs_.ex = gauss_half_nodes(rho, grid_, p_);
        fs_.rho = std::move(rho);
    }

    RunConfig cfg_;
    PlasmaParams p_;
    Grid1D grid_;
    kinetic::ParticleEnsemble ens_;
    fields::FieldState fs_;
    fields::ExternalField ext_;
    bool electrostatic_ = false;
    bool beams_ = false;
};

class EulerianBackend final : public Backend {
public:
    explicit EulerianBackend(const RunConfig& cfg)
        : cfg_(cfg), p_(cfg.params()), grid_(cfg.nx, cfg.length), quad_(cfg.n_theta, cfg.n_phi),
          f_(grid_, UniformAxis::symmetric(cfg.nv, cfg.v_max), quad_),
          solver_(quad_, {cfg.limiter == "none" ? kinetic::Limiter::none : kinetic::Limiter::mc, cfg.quantum_term}),
          flds_(kinetic::EulerianFields::from(
              fields::FieldState::zeros(grid_),
              fields::ExternalField::make(cfg.field, cfg.B0, cfg.B1, cfg.E0, cfg.field_k, cfg.length))) {
        f_ = kinetic::ExtendedDistribution::from_function(grid_, f_.vx(), quad_, [this](double x, const Vec3& v, const Vec3& s) {
            return exact(x, v, s, 0.0);
        });
        mass0_ = f_.total();
    }

    std::vector<std::string> columns() const override { return {"mass", "l1_error", "sz"}; }

    std::vector<double> diagnose() const override {
        double l1 = 0.0;
        for (std::size_t i = 0; i < grid_.n; ++i)
            for (std::size_t a = 0; a < f_.n_vx(); ++a) {
                const Vec3 v = f_.velocity(a, 0);
                for (std::size_t j = 0; j < f_.n_s(); ++j)
                    l1 += quad_.weight(j) *
                          std::abs(f_.at(i, a, 0, j) - exact(grid_.x(i), v, quad_.direction(j), time));
            }
        l1 *= grid_.dx() * f_.dv();
        const auto sm = f_.spin_moment();
        double sz = 0.0;
        for (const auto& s : sm) sz += s.z() * grid_.dx();
        const double mass = f_.total();
        return {mass, l1, sz / mass};
    }

    void step(double dt) override {
        f_ = solver_.step(f_, flds_, p_, dt);
        if (!f_.all_finite()) throw StepRejected("eulerian: non-finite distribution");
        time += dt;
    }

    io::Snapshot snapshot() const override {
        io::Snapshot s;
        s.quantity = "f";
        s.unit = "normalized";
        s.time = time;
        s.axes = {{"x", "length", 0.0, grid_.length - grid_.dx(), grid_.n},
                  {"vx", "velocity", f_.vx().at(0), f_.vx().at(f_.n_vx() - 1), f_.n_vx()},
                  {"s", "quadrature node", 0.0, static_cast<double>(f_.n_s() - 1), f_.n_s()}};
        s.attributes["sphere"] = std::to_string(quad_.n_theta()) + "x" + std::to_string(quad_.n_phi());
        s.data = f_.data();
        return s;
    }

    void summarize(const io::DiagnosticsSeries& series, std::map<std::string, double>& out) const override {
        out["l1_error"] = series.column("l1_error").back();
        out["mass_drift"] = diagnostics::relative_drift(series.column("mass"));
    }

private:
    // Free streaming of n(x) M(v) (1 + s_z / 2) / 4 pi.
    double exact(double x, const Vec3& v, const Vec3& s, double t) const {
        const double k = two_pi * cfg_.mode / cfg_.length;
        const double vt = cfg_.v_thermal > 0 ? cfg_.v_thermal : 1.0;
        const double n = cfg_.density * (1.0 + cfg_.amplitude * std::cos(k * (x - v.x() * t)));
        const double m = std::exp(-0.5 * v.x() * v.x() / (vt * vt)) / (std::sqrt(two_pi) * vt);
        return n * m * (1.0 + 0.5 * s.z()) / (4.0 * pi);
    }

    RunConfig cfg_;
    PlasmaParams p_;
    Grid1D grid_;
    SphereQuadrature quad_;
    kinetic::ExtendedDistribution f_;
    kinetic::EulerianSolver solver_;
    kinetic::EulerianFields flds_;
    double mass0_ = 0.0;
};

// Without the quantum term the fluid runs with a negligible hbar.
PlasmaParams fluid_params(const RunConfig& cfg) {
    return {cfg.mass, cfg.charge, cfg.quantum_term ? cfg.hbar : 1e-12 * cfg.hbar, cfg.eps0, cfg.c};
}

class PlasmaFluidBackend final : public Backend {
public:
    explicit PlasmaFluidBackend(const RunConfig& cfg)
        : cfg_(cfg), p_(fluid_params(cfg)), grid_(cfg.nx, cfg.length), k_(two_pi * cfg.mode / cfg.length) {
        std::vector<double> n(grid_.n);
        for (std::size_t i = 0; i < grid_.n; ++i) n[i] = cfg.density * (1.0 + cfg.amplitude * std::cos(k_ * grid_.x(i)));
        state_ = fluid::FluidState(grid_, std::move(n), std::vector<double>(grid_.n, 0.0));
    }

    std::vector<std::string> columns() const override { return {"mass", "n_mode"}; }

    std::vector<double> diagnose() const override {
        double mode = 0.0;
        for (std::size_t i = 0; i < grid_.n; ++i)
            mode += 2.0 / static_cast<double>(grid_.n) * (state_.n[i] - cfg_.density) * std::cos(k_ * grid_.x(i));
        return {state_.mass(), mode};
    }

    void step(double dt) override {
        const fluid::PotentialFn phi = [this](const fluid::FluidState& s) {
            std::vector<double> rho(s.n.size());
            for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = p_.charge() * (cfg_.density - s.n[i]);
            const double mean = std::accumulate(rho.begin(), rho.end(), 0.0) / static_cast<double>(rho.size());
            for (double& r : rho) r -= mean;
            return fields::solve_poisson(rho, grid_, p_).phi;
        };
        state_ = fluid::step_fluid(state_, phi, p_, dt);
        time += dt;
    }

    io::Snapshot snapshot() const override {
        io::Snapshot s;
        s.quantity = "fluid";
        s.unit = "normalized";
        s.time = time;
        s.axes = {{"field", "", 0.0, 1.0, 2}, {"x", "length", 0.0, grid_.length - grid_.dx(), grid_.n}};
        s.attributes["fields"] = "n,u";
        s.data = state_.n;
        s.data.insert(s.data.end(), state_.u.begin(), state_.u.end());
        return s;
    }

    void summarize(const io::DiagnosticsSeries& series, std::map<std::string, double>& out) const override {
        const double wp2 = cfg_.density * p_.charge() * p_.charge() / (p_.eps0() * p_.mass());
        const double q = cfg_.quantum_term ? cfg_.hbar * cfg_.hbar * std::pow(k_, 4) / (4.0 * cfg_.mass * cfg_.mass) : 0.0;
        const auto fit = diagnostics::fit_frequency(series, "n_mode");
        put_fit(out, fit, std::sqrt(wp2 + q));
        if (fit.conclusive) out["omega2_rel_error"] = std::abs(fit.omega * fit.omega / (wp2 + q) - 1.0);
        out["mass_drift"] = diagnostics::relative_drift(series.column("mass"));
    }

private:
    RunConfig cfg_;
    PlasmaParams p_;
    Grid1D grid_;
    double k_;
    fluid::FluidState state_;
};

// Free Gaussian packet evolved by the spinor oracle, and by the Madelung fluid when with_fluid is set.
class MadelungBackend final : public Backend {
public:
    MadelungBackend(const RunConfig& cfg, bool with_fluid)
        : cfg_(cfg), p_(cfg.params()), grid_(cfg.nx, cfg.length), pot_(oracle::ExternalPotentials::none(grid_)),
          with_fluid_(with_fluid) {
        oracle::InitParams ip;
        ip.x0 = 0.5 * cfg.length;
        ip.width = cfg.length / 8.0;
        ip.theta = 0.5 * pi;
        psi_ = oracle::init_state("gaussian", ip, grid_, p_);
        if (with_fluid_) {
            const auto obs = oracle::spinor_observables(psi_, pot_, p_);
            std::vector<double> u(grid_.n);
            for (std::size_t i = 0; i < grid_.n; ++i) u[i] = obs.v[i].x();
            fluid_ = fluid::FluidState(grid_, obs.n, std::move(u));
        }
    }

    std::vector<std::string> columns() const override {
        if (with_fluid_) return {"mass", "linf", "min_density_ratio"};
        return {"mass", "sx", "sy", "sz"};
    }

    std::vector<double> diagnose() const override {
        const auto n = oracle_density();
        const double nmax = *std::max_element(n.begin(), n.end());
        if (!with_fluid_) {
            const Vec3 s = oracle::mean_sigma(psi_);
            return {psi_.norm_squared(), s.x(), s.y(), s.z()};
        }
        double linf = 0.0;
        for (std::size_t i = 0; i < n.size(); ++i) linf = std::max(linf, std::abs(fluid_.n[i] - n[i]));
        return {fluid_.mass(), linf / nmax, *std::min_element(n.begin(), n.end()) / nmax};
    }

    void step(double dt) override {
        auto next = oracle::step_pauli(psi_, pot_, p_, dt);
        if (with_fluid_) fluid_ = fluid::step_fluid(fluid_, std::vector<double>(grid_.n, 0.0), p_, dt);
        psi_ = std::move(next);
        time += dt;
    }

    std::string finished() const override {
        if (!with_fluid_) return {};
        const auto n = oracle_density();
        const double nmax = *std::max_element(n.begin(), n.end());
        if (*std::min_element(n.begin(), n.end()) < 100.0 * fluid::default_floor * nmax)
            return "density floor reached";
        return {};
    }

    io::Snapshot snapshot() const override {
        io::Snapshot s;
        s.quantity = with_fluid_ ? "density" : "spinor";
        s.unit = "normalized";
        s.time = time;
        s.axes = {{"field", "", 0.0, 1.0, 2}, {"x", "length", 0.0, grid_.length - grid_.dx(), grid_.n}};
        if (with_fluid_) {
            s.attributes["fields"] = "n_oracle,n_fluid";
            s.data = oracle_density();
            s.data.insert(s.data.end(), fluid_.n.begin(), fluid_.n.end());
        } else {
            s.attributes["fields"] = "|up|^2,|down|^2";
            for (const auto& c : psi_.up) s.data.push_back(std::norm(c));
            for (const auto& c : psi_.down) s.data.push_back(std::norm(c));
        }
        return s;
    }

    void summarize(const io::DiagnosticsSeries& series, std::map<std::string, double>& out) const override {
        out["mass_drift"] = diagnostics::relative_drift(series.column("mass"));
        out["end_time"] = time;
        if (with_fluid_) out["linf_max"] = max_abs(series.column("linf"));
    }

private:
    std::vector<double> oracle_density() const {
        std::vector<double> n(grid_.n);
        for (std::size_t i = 0; i < grid_.n; ++i) n[i] = std::norm(psi_.up[i]) + std::norm(psi_.down[i]);
        return n;
    }

    RunConfig cfg_;
    PlasmaParams p_;
    Grid1D grid_;
    oracle::ExternalPotentials pot_;
    bool with_fluid_;
    SpinorField psi_;
    fluid::FluidState fluid_;
};

std::unique_ptr<Backend> make_backend(const RunConfig& cfg) {
    if (cfg.backend == "pic") return std::make_unique<PicBackend>(cfg);
    if (cfg.backend == "eulerian") return std::make_unique<EulerianBackend>(cfg);
    if (cfg.scenario == "plasma_osc") return std::make_unique<PlasmaFluidBackend>(cfg);
    return std::make_unique<MadelungBackend>(cfg, cfg.backend == "fluid");
}

json summary_json(const RunResult& r) {
    json s = json::object();
    for (const auto& [k, v] : r.summary) s[k] = v;
    return s;
}

RunResult execute(const RunConfig& cfg, bool write) {
    cfg.validate();
    const std::filesystem::path dir(cfg.output_dir);
    RunResult result;
    result.directory = dir.string();
    if (write) {
        std::filesystem::create_directories(dir);
        io::write_atomic((dir / "config.json").string(), to_json(cfg) + "\n");
    }
    auto backend = make_backend(cfg);
    result.series = io::DiagnosticsSeries(backend->columns());
    result.series.append(0.0, backend->diagnose());

    const std::size_t steps = cfg.steps();
    std::size_t every = std::max<std::size_t>(cfg.cadence, (steps / 10 / cfg.cadence) * cfg.cadence);
    std::size_t snap = 0;
    std::vector<std::string> written;
    auto save = [&](const std::string& stem) {
        if (!write || !cfg.snapshots) return;
        io::write_snapshot((dir / stem).string(), backend->snapshot());
        written.push_back(stem);
    };
    auto numbered = [&] {
        char buf[32];
        std::snprintf(buf, sizeof buf, "snap_%04zu", snap++);
        return std::string(buf);
    };
    save(numbered());

    for (std::size_t s = 1; s <= steps; ++s) {
        if (const auto why = backend->finished(); !why.empty()) {
            result.message = why;
            break;
        }
        try {
            backend->step(cfg.dt);
        } catch (const StepRejected& e) {
            result.ok = false;
            result.message = e.what();
            save("last_valid");
            break;
        }
        result.steps_done = s;
        const double t = static_cast<double>(s) * cfg.dt;
        if (s % cfg.cadence == 0) result.series.append(t, backend->diagnose());
        if (s % every == 0 || s == steps) save(numbered());
    }
    backend->summarize(result.series, result.summary);

    if (write) {
        io::write_atomic((dir / "diagnostics.csv").string(), result.series.to_csv());
        json run;
        run["format_version"] = io::snapshot_format_version;
        run["code_version"] = io::code_version();
        run["ok"] = result.ok;
        run["message"] = result.message;
        run["steps_done"] = result.steps_done;
        run["steps_planned"] = steps;
        run["snapshots"] = written;
        run["summary"] = summary_json(result);
        io::write_atomic((dir / "run.json").string(), run.dump(2) + "\n");
    }
    return result;
}

}  // namespace

RunResult run_case(const RunConfig& cfg) { return execute(cfg, true); }

RunResult run_in_memory(const RunConfig& cfg) { return execute(cfg, false); }

}  // namespace spinkin::runner
