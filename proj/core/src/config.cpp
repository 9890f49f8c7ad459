#include "spinkin/config.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>
#include <variant>

namespace spinkin::runner {

namespace {

using json = nlohmann::json;

static_assert(std::is_same_v<std::uint64_t, std::size_t>, "seed is stored through the size_t accessor");

using Member = std::variant<std::string RunConfig::*, double RunConfig::*, std::size_t RunConfig::*, int RunConfig::*,
                            bool RunConfig::*>;

struct Key {
    const char* name;
    Member member;
};

const std::vector<Key>& keys() {
    static const std::vector<Key> k{
        {"scenario", &RunConfig::scenario}, {"backend", &RunConfig::backend},
        {"nx", &RunConfig::nx},             {"length", &RunConfig::length},
        {"nv", &RunConfig::nv},             {"v_max", &RunConfig::v_max},
        {"n_theta", &RunConfig::n_theta},   {"n_phi", &RunConfig::n_phi},
        {"mass", &RunConfig::mass},         {"charge", &RunConfig::charge},
        {"hbar", &RunConfig::hbar},         {"eps0", &RunConfig::eps0},
        {"c", &RunConfig::c},               {"density", &RunConfig::density},
        {"particles", &RunConfig::particles}, {"seed", &RunConfig::seed},
        {"v_thermal", &RunConfig::v_thermal}, {"amplitude", &RunConfig::amplitude},
        {"mode", &RunConfig::mode},         {"dt", &RunConfig::dt},
        {"t_end", &RunConfig::t_end},       {"cadence", &RunConfig::cadence},
        {"quantum_term", &RunConfig::quantum_term}, {"limiter", &RunConfig::limiter},
        {"field", &RunConfig::field},       {"B0", &RunConfig::B0},
        {"B1", &RunConfig::B1},             {"E0", &RunConfig::E0},
        {"field_k", &RunConfig::field_k},   {"output_dir", &RunConfig::output_dir},
        {"snapshots", &RunConfig::snapshots},
    };
    return k;
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
    return out;
}

// Assigns j to the member, or records why it cannot.
void assign(RunConfig& cfg, const Key& key, const json& j, std::vector<std::string>& issues) {
    const std::string name = key.name;
    std::visit(
        [&](auto ptr) {
            using T = std::remove_reference_t<decltype(cfg.*ptr)>;
            if constexpr (std::is_same_v<T, std::string>) {
                if (!j.is_string()) return issues.push_back(name + ": expected string");
                cfg.*ptr = j.get<std::string>();
            } else if constexpr (std::is_same_v<T, bool>) {
                if (!j.is_boolean()) return issues.push_back(name + ": expected boolean");
                cfg.*ptr = j.get<bool>();
            } else if constexpr (std::is_same_v<T, double>) {
                if (!j.is_number()) return issues.push_back(name + ": expected number");
                cfg.*ptr = j.get<double>();
            } else if constexpr (std::is_same_v<T, int>) {
                if (!j.is_number_integer()) return issues.push_back(name + ": expected integer");
                cfg.*ptr = j.get<int>();
            } else {
                if (!j.is_number_unsigned()) return issues.push_back(name + ": expected non-negative integer");
                cfg.*ptr = j.get<std::size_t>();
            }
        },
        key.member);
}

json to_json_object(const RunConfig& cfg) {
    json j = json::object();
    for (const auto& k : keys()) std::visit([&](auto ptr) { j[k.name] = cfg.*ptr; }, k.member);
    return j;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : InvalidArgument("invalid configuration: " + join(issues, "; ")), issues_(std::move(issues)) {}

std::size_t RunConfig::steps() const {
    if (!(dt > 0) || !(t_end > 0)) return 0;
    return static_cast<std::size_t>(std::llround(t_end / dt));
}

void RunConfig::validate() const {
    std::vector<std::string> bad;
    const auto names = scenario_names();
    if (std::find(names.begin(), names.end(), scenario) == names.end())
        bad.push_back("scenario: unknown scenario '" + scenario + "' (expected one of " + join(names, ", ") + ")");
    const std::set<std::string> backends{"pic", "eulerian", "fluid", "oracle"};
    if (!backends.count(backend)) bad.push_back("backend: expected pic, eulerian, fluid or oracle");
    else if (const auto sup = supported_backends(scenario); !sup.empty() &&
             std::find(sup.begin(), sup.end(), backend) == sup.end())
        bad.push_back("backend: scenario " + scenario + " runs on " + join(sup, " or "));
    const std::set<std::string> fields{"none", "uniform_B", "gradient_B", "single_mode_E"};
    if (!fields.count(field)) bad.push_back("field: expected none, uniform_B, gradient_B or single_mode_E");
    if (limiter != "mc" && limiter != "none") bad.push_back("limiter: expected mc or none");
    auto positive = [&](const char* name, double v) {
        if (!(v > 0) || !std::isfinite(v)) bad.push_back(std::string(name) + ": must be positive");
    };
    positive("length", length);
    positive("v_max", v_max);
    positive("mass", mass);
    positive("charge", charge);
    positive("hbar", hbar);
    positive("eps0", eps0);
    positive("c", c);
    positive("density", density);
    positive("dt", dt);
    positive("t_end", t_end);
    auto count = [&](const char* name, std::size_t v, std::size_t lo) {
        if (v < lo) bad.push_back(std::string(name) + ": must be at least " + std::to_string(lo));
    };
    count("nx", nx, 4);
    count("nv", nv, 4);
    count("n_theta", n_theta, 1);
    count("n_phi", n_phi, 1);
    count("particles", particles, 1);
    count("cadence", cadence, 1);
    if (nx % 2 != 0) bad.push_back("nx: must be even");
    if (nv % 2 != 0) bad.push_back("nv: must be even");
    if (mode < 1) bad.push_back("mode: must be at least 1");
    if (v_thermal < 0 || !std::isfinite(v_thermal)) bad.push_back("v_thermal: must be non-negative");
    if (!std::isfinite(amplitude) || std::abs(amplitude) >= 1.0) bad.push_back("amplitude: must satisfy |amplitude| < 1");
    for (auto [name, v] : {std::pair{"B0", B0}, std::pair{"B1", B1}, std::pair{"E0", E0}, std::pair{"field_k", field_k}})
        if (!std::isfinite(v)) bad.push_back(std::string(name) + ": must be finite");
    if (dt > 0 && t_end > 0) {
        if (!(dt < t_end)) bad.push_back("dt: must be smaller than t_end");
        const double ratio = t_end / dt;
        if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
            bad.push_back("t_end: must be an integer multiple of dt");
        else if (cadence > 0 && steps() % cadence != 0)
            bad.push_back("cadence: must divide the step count " + std::to_string(steps()));
    }
    if (output_dir.empty()) bad.push_back("output_dir: must not be empty");
    if (!bad.empty()) throw ConfigError(bad);
}

std::vector<std::string> scenario_names() {
    return {"precession", "plasma_osc", "free_stream", "stern_gerlach", "madelung_pauli"};
}

std::vector<std::string> supported_backends(const std::string& scenario) {
    if (scenario == "precession" || scenario == "stern_gerlach") return {"pic"};
    if (scenario == "plasma_osc") return {"pic", "fluid"};
    if (scenario == "free_stream") return {"eulerian"};
    if (scenario == "madelung_pauli") return {"fluid", "oracle"};
    return {};
}

RunConfig preset(const std::string& scenario) {
    RunConfig c;
    c.scenario = scenario;
    if (scenario == "precession") {
        c.backend = "pic";
        c.field = "uniform_B";
        c.B0 = 1.0;
        c.particles = 1000;
        c.dt = pi / 64.0;
        c.t_end = 100.0 * pi;
        c.cadence = 4;
    } else if (scenario == "plasma_osc") {
        c.backend = "pic";
        c.nx = 128;
        c.length = 4.0 * pi;
        c.particles = 100000;
        c.amplitude = 1e-3;
        c.dt = pi / 64.0;
        c.t_end = 20.0 * pi;
        c.cadence = 2;
    } else if (scenario == "free_stream") {
        c.backend = "eulerian";
        c.nx = 64;
        c.nv = 64;
        c.v_max = 4.0;
        c.n_theta = 2;
        c.n_phi = 3;
        c.amplitude = 0.2;
        c.v_thermal = 1.0;
        c.dt = 1.0 / 64.0;
        c.t_end = 1.0;
    } else if (scenario == "stern_gerlach") {
        c.backend = "pic";
        c.field = "gradient_B";
        c.B1 = 0.05;
        c.particles = 2000;
        c.dt = 1e-3;
        c.t_end = 0.1;
        c.cadence = 10;
    } else if (scenario == "madelung_pauli") {
        c.backend = "fluid";
        c.nx = 96;
        c.length = 6.0;
        c.dt = 5e-4;
        c.t_end = 1.0;
        c.cadence = 20;
        c.snapshots = true;
    }
    return c;
}

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("not valid JSON: ") + e.what()});
    }
    if (!j.is_object()) throw ConfigError({"top level: expected a JSON object"});
    std::string scenario = "precession";
    if (j.contains("scenario")) {
        if (!j["scenario"].is_string()) throw ConfigError({"scenario: expected string"});
        scenario = j["scenario"].get<std::string>();
    }
    RunConfig cfg = preset(scenario);
    std::vector<std::string> issues;
    for (const auto& [name, value] : j.items()) {
        const auto it = std::find_if(keys().begin(), keys().end(), [&](const Key& k) { return name == k.name; });
        if (it == keys().end()) {
            issues.push_back(name + ": unknown key");
            continue;
        }
        assign(cfg, *it, value, issues);
    }
    if (!issues.empty()) throw ConfigError(issues);
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(e.issues());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("load_config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_json(const RunConfig& cfg) { return to_json_object(cfg).dump(2); }

}  // namespace spinkin::runner
