#include "doctest.h"

#include "spinkin/config.hpp"

#include <cstdio>
#include <fstream>

using namespace spinkin;
using namespace spinkin::runner;

namespace {

std::vector<std::string> issues_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.issues();
    }
    return {};
}

bool mentions(const std::vector<std::string>& issues, const std::string& key) {
    for (const auto& s : issues)
        if (s.rfind(key + ":", 0) == 0) return true;
    return false;
}

}  // namespace

TEST_CASE("minimal config takes preset defaults") {
    const auto cfg = parse_config(R"({"scenario": "precession", "B0": 1.0})");
    CHECK(cfg.scenario == "precession");
    CHECK(cfg.B0 == 1.0);
    auto expected = preset("precession");
    expected.B0 = 1.0;
    CHECK(cfg == expected);
    CHECK(cfg.steps() * cfg.dt == doctest::Approx(cfg.t_end));
}

TEST_CASE("every preset validates") {
    for (const auto& name : scenario_names()) {
        INFO(name);
        CHECK_NOTHROW(preset(name).validate());
    }
}

TEST_CASE("negative dt names the field") {
    const auto issues = issues_of(R"({"scenario": "precession", "dt": -0.1})");
    REQUIRE(!issues.empty());
    CHECK(mentions(issues, "dt"));
    CHECK_THROWS_AS(parse_config(R"({"dt": -0.1})"), InvalidArgument);
}

TEST_CASE("all problems are reported together") {
    const auto issues = issues_of(R"({"nx": "many", "bogus": 1, "hbar": true, "seed": -3})");
    CHECK(mentions(issues, "nx"));
    CHECK(mentions(issues, "bogus"));
    CHECK(mentions(issues, "hbar"));
    CHECK(mentions(issues, "seed"));
    CHECK(issues.size() == 4);
}

TEST_CASE("range constraints") {
    CHECK(mentions(issues_of(R"({"scenario": "nope"})"), "scenario"));
    CHECK(mentions(issues_of(R"({"backend": "gpu"})"), "backend"));
    CHECK(mentions(issues_of(R"({"scenario": "free_stream", "backend": "pic"})"), "backend"));
    CHECK(mentions(issues_of(R"({"nx": 7})"), "nx"));
    CHECK(mentions(issues_of(R"({"dt": 2.0, "t_end": 1.0})"), "dt"));
    CHECK(mentions(issues_of(R"({"dt": 0.3, "t_end": 1.0})"), "t_end"));
    CHECK(mentions(issues_of(R"({"dt": 0.25, "t_end": 1.0, "cadence": 3})"), "cadence"));
    CHECK(mentions(issues_of(R"({"amplitude": 1.5})"), "amplitude"));
    CHECK(mentions(issues_of(R"({"particles": 0})"), "particles"));
    CHECK(!issues_of("[1, 2]").empty());
    CHECK(!issues_of("{not json").empty());
}

TEST_CASE("json round trip") {
    for (const auto& name : scenario_names()) {
        auto cfg = preset(name);
        cfg.seed = 12345678901234ull;
        cfg.dt = cfg.t_end / 40.0;
        cfg.cadence = 4;
        cfg.quantum_term = true;
        CHECK(parse_config(to_json(cfg)) == cfg);
    }
}

TEST_CASE("load from file") {
    const std::string path = "config_test_tmp.json";
    {
        std::ofstream out(path);
        out << R"({"scenario": "stern_gerlach", "B1": 0.1})";
    }
    const auto cfg = load_config(path);
    CHECK(cfg.B1 == 0.1);
    CHECK(cfg.field == "gradient_B");
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_config("does_not_exist.json"), InvalidArgument);
}
