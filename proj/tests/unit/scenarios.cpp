#include "doctest.h"

#include "spinkin/diagnostics.hpp"
#include "spinkin/parallel.hpp"
#include "spinkin/scenarios.hpp"

#include "json.hpp"

#include <cmath>
#include <filesystem>

using namespace spinkin;
using namespace spinkin::runner;
namespace fs = std::filesystem;

namespace {

RunConfig with(const std::string& scenario, const std::string& overrides = "") {
    return parse_config(R"({"scenario": ")" + scenario + "\"" + (overrides.empty() ? "" : ", " + overrides) + "}");
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("spinkin_scenarios_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("precession frequency and spin norm") {
    const auto r = run_in_memory(with("precession", R"("B0": 0.7, "particles": 200, "dt": 0.03125, "t_end": 100.0)"));
    REQUIRE(r.ok);
    REQUIRE(r.summary.at("fit_conclusive") == 1.0);
    CHECK(r.summary.at("omega_expected") == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(r.summary.at("omega_rel_error") < 1e-3);
    CHECK(r.summary.at("spin_dev_max") < 1e-12);
}

TEST_CASE("cold plasma oscillation, small PIC") {
    const auto r = run_in_memory(with("plasma_osc", R"("particles": 20000, "nx": 64, "dt": 0.09817477042468103, "cadence": 1)"));
    REQUIRE(r.ok);
    REQUIRE(r.summary.at("fit_conclusive") == 1.0);
    CHECK(r.summary.at("omega_rel_error") < 1e-2);
}

TEST_CASE("fluid plasma oscillation with and without the Bohm term") {
    for (bool q : {false, true}) {
        const auto r = run_in_memory(with(
            "plasma_osc", std::string(R"("backend": "fluid", "nx": 32, "length": 6.283185307179586, "mode": 2,)") +
                              R"("hbar": 0.5, "dt": 0.006135923151542565, "t_end": 62.83185307179586, "cadence": 8,)" +
                              R"("quantum_term": )" + (q ? "true" : "false")));
        REQUIRE(r.ok);
        const double expected = q ? std::sqrt(1.0 + 0.25 * 16.0 / 4.0) : 1.0;
        CHECK(r.summary.at("omega_expected") == doctest::Approx(expected).epsilon(1e-14));
        CHECK(r.summary.at("omega2_rel_error") < 1e-3);
    }
}

TEST_CASE("free streaming converges at second order") {
    for (const char* lim : {"mc", "none"}) {
        std::vector<double> h, err;
        for (std::size_t nx : {32, 64, 128}) {
            const double dt = 1.0 / static_cast<double>(nx);
            auto cfg = with("free_stream", R"("n_theta": 1, "n_phi": 2, "nv": 32)");
            cfg.limiter = lim;
            cfg.nx = nx;
            cfg.dt = dt;
            const auto r = run_in_memory(cfg);
            REQUIRE(r.ok);
            CHECK(r.summary.at("mass_drift") < 1e-13);
            h.push_back(cfg.length / static_cast<double>(nx));
            err.push_back(r.summary.at("l1_error"));
        }
        INFO(lim);
        CHECK(diagnostics::loglog_slope(h, err) > 1.8);
    }
}

TEST_CASE("stern gerlach beams separate") {
    const auto r = run_in_memory(with("stern_gerlach"));
    REQUIRE(r.ok);
    CHECK(r.summary.at("accel_up") == doctest::Approx(r.summary.at("accel_up_expected")).epsilon(5e-3));
    CHECK(r.summary.at("accel_down") == doctest::Approx(r.summary.at("accel_down_expected")).epsilon(5e-3));
    CHECK(r.summary.at("accel_up") < 0.0);
}

TEST_CASE("madelung fluid tracks the spinor oracle") {
    const auto r = run_in_memory(with("madelung_pauli", R"("t_end": 0.5)"));
    REQUIRE(r.ok);
    CHECK(r.summary.at("linf_max") < 1e-3);
    CHECK(r.summary.at("mass_drift") < 1e-12);
    const auto o = run_in_memory(with("madelung_pauli", R"("backend": "oracle", "t_end": 0.5)"));
    REQUIRE(o.ok);
    CHECK(o.summary.at("mass_drift") < 1e-12);
}

TEST_CASE("run directory is self describing") {
    const auto dir = scratch("describe");
    auto cfg = with("precession", R"("particles": 50, "dt": 0.1, "t_end": 2.0, "cadence": 2)");
    cfg.output_dir = dir.string();
    const auto r = run_case(cfg);
    REQUIRE(r.ok);
    CHECK(load_config((dir / "config.json").string()) == cfg);
    const auto series = io::DiagnosticsSeries::from_csv(io::read_file((dir / "diagnostics.csv").string()));
    CHECK(series.size() == 11);
    CHECK(series.column("sx") == r.series.column("sx"));
    const auto run = nlohmann::json::parse(io::read_file((dir / "run.json").string()));
    CHECK(run["ok"] == true);
    CHECK(run["format_version"] == io::snapshot_format_version);
    CHECK(run["code_version"] == io::code_version());
    CHECK(run["steps_done"] == 20);
    const auto snap = io::read_snapshot((dir / "snap_0000").string());
    CHECK(snap.axes.at(0).n == 50);
    CHECK(snap.data.size() == 50 * 8);
    for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() != ".tmp");
    fs::remove_all(dir);
}

TEST_CASE("rejected step keeps the last valid snapshot") {
    const auto dir = scratch("reject");
    auto cfg = with("precession", R"("B0": 40.0, "particles": 20, "dt": 0.05, "t_end": 1.0)");
    cfg.output_dir = dir.string();
    const auto r = run_case(cfg);
    CHECK(!r.ok);
    CHECK(r.steps_done == 0);
    CHECK(!r.message.empty());
    REQUIRE(fs::exists(dir / "last_valid.json"));
    const auto snap = io::read_snapshot((dir / "last_valid").string());
    CHECK(snap.time == 0.0);
    const auto run = nlohmann::json::parse(io::read_file((dir / "run.json").string()));
    CHECK(run["ok"] == false);
    for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() != ".tmp");
    fs::remove_all(dir);

    auto eul = with("free_stream", R"("dt": 0.25)");
    const auto re = run_in_memory(eul);
    CHECK(!re.ok);
}

TEST_CASE("diagnostics are identical for any thread count") {
    const auto cfg = with("plasma_osc", R"("particles": 5000, "nx": 32, "dt": 0.19634954084936207, "t_end": 6.283185307179586, "cadence": 1)");
    const int before = thread_count();
    set_thread_count(1);
    const auto one = run_in_memory(cfg).series.to_csv();
    set_thread_count(3);
    const auto three = run_in_memory(cfg).series.to_csv();
    set_thread_count(before);
    CHECK(one == three);
    const auto stream = with("free_stream", R"("n_theta": 1, "n_phi": 2)");
    set_thread_count(1);
    const auto f1 = run_in_memory(stream).series.to_csv();
    set_thread_count(3);
    const auto f3 = run_in_memory(stream).series.to_csv();
    set_thread_count(before);
    CHECK(f1 == f3);
}
