#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "kg/config.hpp"

using namespace kg;

TEST_CASE("minimal config resolves all defaults") {
    auto cfg = parse_config_text(R"({"experiment":{"tag":"dispersion"}})");
    CHECK(cfg.experiment.tag == "dispersion");
    CHECK(cfg.grid.n == 4096);
    CHECK(cfg.grid.box_length == doctest::Approx(256.0 * M_PI));
    CHECK(cfg.norms.alpha == 0.5);
    CHECK(cfg.norms.N1 == 12);
    CHECK(cfg.dyadic.gap_constant == 5);
    CHECK(cfg.evolution.F == "u_squared");
    CHECK(cfg.evolution.aliasing_tol == 1e-6);
    CHECK(cfg.experiment.eps_list.size() == 6);
    CHECK(cfg.experiment.eps_list.front() == 0.8);
}

TEST_CASE("constraint violations carry field-level messages") {
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"norms":{"alpha":0.7}})"),
                         doctest::Contains("norms.alpha"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"norms":{"alpha":0.0}})"),
                         doctest::Contains("norms.alpha"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"grid":{"n":100}})"),
                         doctest::Contains("grid.n"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"grid":{"nn":128}})"),
                         doctest::Contains("grid.nn"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"bogus":{}})"),
                         doctest::Contains("bogus"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"evolution":{"F":"cubic"}})"),
                         doctest::Contains("evolution.F"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"experiment":{"eps_list":[0.4,0.8]}})"),
                         doctest::Contains("strictly decreasing"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"experiment":{"fit_window":[50,5]}})"),
                         doctest::Contains("fit_window"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"experiment":{"fit_window":[5,500]}})"),
                         doctest::Contains("horizon"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("{nope"), std::invalid_argument);
}

TEST_CASE("resolved echo re-parses to an identical config") {
    auto cfg = parse_config_text(
        R"({"grid":{"n":1024,"box_length":100.0},
            "norms":{"alpha":0.25,"N":6},
            "evolution":{"F":"dtu_sq_dxu","epsilon":0.3,"dt":0.02,"horizon":40.0},
            "experiment":{"tag":"lifespan","seed":77,"fit_window":[2,30]}})");
    const std::string echo = cfg.to_json();
    auto cfg2 = parse_config_text(echo);
    CHECK(cfg2.to_json() == echo);
    CHECK(cfg2.grid.n == 1024);
    CHECK(cfg2.norms.alpha == 0.25);
    CHECK(cfg2.evolution.F == "dtu_sq_dxu");
    CHECK(cfg2.experiment.seed == 77);
}

TEST_CASE("parse_config reads files and rejects missing paths") {
    const std::string path = "/tmp/kg_test_config.json";
    {
        std::ofstream out(path);
        out << R"({"experiment":{"tag":"znorm"}})";
    }
    auto cfg = parse_config(path);
    CHECK(cfg.experiment.tag == "znorm");
    CHECK_THROWS_AS(parse_config("/tmp/definitely_missing_kg.json"), std::invalid_argument);
}

TEST_CASE("blow-up threshold derivation") {
    ConfigFile cfg;
    cfg.evolution.epsilon = 0.5;
    cfg.evolution.blowup_threshold = 0.0;
    CHECK(resolved_blowup_threshold(cfg, 0.65) == doctest::Approx(13.0));
    CHECK(resolved_blowup_threshold(cfg, 0.25) == doctest::Approx(10.0));
    cfg.evolution.blowup_threshold = 7.5;
    CHECK(resolved_blowup_threshold(cfg, 123.0) == 7.5);
}

TEST_CASE("non-reference N1 parses (with a loud warning) and is carried through") {
    auto cfg = parse_config_text(R"({"norms":{"N1":11}})");
    CHECK(cfg.norms.N1 == 11);
}
