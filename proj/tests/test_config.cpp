#include <doctest.h>

#include <string>
#include <vector>

#include "heatctl/config.hpp"
#include "heatctl/errors.hpp"

using namespace heatctl;
using nlohmann::json;

namespace {

std::string error_path(const std::string& text) {
    try {
        auto c = parse_config(text);
        c.validate();
    } catch (const ConfigError& e) {
        return e.path();
    }
    return "<none>";
}

}  // namespace

TEST_CASE("every preset round-trips") {
    const auto names = preset_names();
    CHECK(names.size() >= 8);
    for (const auto& n : names) {
        CAPTURE(n);
        const auto c = preset(n);
        CHECK_NOTHROW(c.validate());
        const json once = c.to_json();
        const json twice = RunConfig::from_json(once).to_json();
        CHECK(once == twice);
        CHECK(once.dump() == twice.dump());
    }
}

TEST_CASE("preset lookup") {
    CHECK(resolve_config("preset:table2").search.theorem == 2);
    CHECK_THROWS_AS((void)preset("nope"), ConfigError);
    CHECK_THROWS_AS((void)load_config("/nonexistent/cfg.json"), ConfigError);
}

TEST_CASE("defaults of a minimal config") {
    const auto c = parse_config(R"({"plant": {"q": 3}})");
    CHECK(c.design.delta == 0.0);
    CHECK(c.resolved_N0() == 0);
    CHECK(c.sim.M == 50);
    CHECK(c.sim.h == 1e-4);
    CHECK(c.sim.T == 8.0);
}

TEST_CASE("error paths point at the offending field") {
    CHECK(error_path(R"({"plant": {"q": 3, "extra": 1}})") == "/plant/extra");
    CHECK(error_path(R"({"plant": {"q": "three"}})") == "/plant/q");
    CHECK(error_path(R"({"design": {"delta": -1}})") == "/design/delta");
    CHECK(error_path(R"({"design": {"delta": 0, "delta1": 1, "delta0": 2}})") == "/design/delta0");
    CHECK(error_path(R"({"design": {"gains": {"K0": [-5.5, 1], "L0": [5.5]}}})") == "/design/gains/K0");
    CHECK(error_path(R"({"search": {"theorem": 7}})") == "/search/theorem");
    CHECK(error_path(R"({"search": {"r_grid": [0.2, 0.1]}})") == "/search/r_grid/1");
    CHECK(error_path(R"({"plant": {"weight": {"kind": "indicator", "a": 0.9, "b": 0.3}}})") == "/plant/weight");
    CHECK(error_path(R"({"sim": {"controller_mode": "fast"}})") == "/sim/controller_mode");
    CHECK(error_path("{not json") == "/");
}

TEST_CASE("delta0 consistent with delta + delta1 is accepted") {
    const auto c = parse_config(R"({"design": {"delta": 0.5, "delta1": 1, "delta0": 1.5}})");
    CHECK(c.design.delta0() == 1.5);
}

TEST_CASE("N0 override mismatch only warns") {
    std::vector<std::string> seen;
    auto old = set_warning_handler([&seen](const std::string& m) { seen.push_back(m); });
    const auto c = parse_config(R"({"design": {"N0": 1, "gains": {"K0": [-5, 0], "L0": [5, 0.1]}}})");
    CHECK_NOTHROW(c.validate());
    set_warning_handler(old);
    CHECK(c.resolved_N0() == 1);
    CHECK_FALSE(seen.empty());
}

TEST_CASE("r grid from a range") {
    const auto c = parse_config(R"({"search": {"r_grid": {"from": 0.02, "to": 0.6, "step": 0.01}}})");
    REQUIRE(c.search.r_grid.size() == 59);
    CHECK(c.search.r_grid[12] == 0.14);
    CHECK(c.search.r_grid.back() == 0.6);
}

TEST_CASE("theorem parameters and simulation config from a preset") {
    const auto c = preset("section4_static_r014");
    const auto p = c.theorem_params();
    CHECK(p.delays.r == 0.14);
    CHECK(p.delta1_grid.size() == 7);
    const auto m = c.model(c.sim.M);
    const auto s = c.sim_config(m, c.gains(m));
    CHECK(s.N == 30);
    CHECK(s.delays.tau_u.shape == DelayProfile::Shape::SinSquared);
    CHECK(s.delays.tau_y.shape == DelayProfile::Shape::CosSquared);
    CHECK(s.z0[0] == doctest::Approx(1.0 / 3.0));
    CHECK_NOTHROW(s.validate());
}
