#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "cqed/config.hpp"
#include "cqed/csv.hpp"

using namespace cqed;
using nlohmann::json;

TEST_CASE("empty document yields the defaults") {
    const auto cfg = parse_config(json::object());
    const auto& e = cfg.experiment;
    CHECK(e.params.alpha == 1e-3);
    CHECK(e.params.delta == 0.0);
    CHECK(e.params.variant == Variant::Consistent);
    CHECK(is_zero_temperature(e.params.temperature));
    CHECK(e.integration.method == Method::FixedRK4);
    CHECK(e.integration.step == 1e-3);
    CHECK(e.initial.sz == -0.8660254);
    CHECK_FALSE(e.initial.sx.has_value());
    CHECK(e.lyapunov.transient == 100.0);
    CHECK(e.flights.min_length == doctest::Approx(10.0 * std::numbers::pi));
    CHECK(e.seed == 1);
    CHECK(cfg.output_path == "cqed_out");
}

TEST_CASE("full document is parsed") {
    const json doc = R"({
        "params": {"alpha": 0.002, "delta": 1.92, "variant": "literal",
                   "temperature": {"beta": 5}},
        "initial": {"p": 25, "sz": 0, "sx": null, "ax": 0.5},
        "integration": {"method": "dp45", "rel_tol": 1e-9, "t_end": 50},
        "section": {"function": "custom", "component": 3, "level": 0.1, "direction": "both",
                    "project_u": {"component": 2, "wrap_2pi": false}, "n_points": 10},
        "lyapunov": {"d0": 1e-9, "n_renorm": 200},
        "flights": {"min_length": 5, "p_threshold": 0.2},
        "sweep": {"axes": [{"name": "delta", "linspace": {"start": -1, "stop": 1, "count": 3}},
                           {"name": "beta", "values": ["inf", 2]}],
                  "diagnostic": "flight_count", "max_cells": 6},
        "seed": 42,
        "output_path": "somewhere"
    })"_json;
    const auto cfg = parse_config(doc);
    const auto& e = cfg.experiment;
    CHECK(e.params.alpha == 0.002);
    CHECK(e.params.variant == Variant::Literal);
    CHECK(std::get<InverseTemperature>(e.params.temperature).beta == 5.0);
    CHECK(e.initial.p == 25.0);
    CHECK(e.integration.method == Method::AdaptiveEmbedded45);
    CHECK(e.section.kind == SectionDef::Kind::Custom);
    CHECK(e.section.direction == Direction::Both);
    CHECK(e.section.u.component == 2);
    CHECK_FALSE(e.section.u.wrap_2pi);
    CHECK(e.poincare.n_points == 10);
    CHECK(e.lyapunov.n_renorm == 200);
    CHECK(e.flights.p_threshold == 0.2);
    REQUIRE(cfg.sweep.axes.size() == 2);
    CHECK(cfg.sweep.axes[0].values == std::vector<double>{-1.0, 0.0, 1.0});
    CHECK(std::isinf(cfg.sweep.axes[1].values[0]));
    CHECK(cfg.sweep.diagnostic == Diagnostic::FlightCount);
    CHECK(cfg.sweep.max_cells == 6);
    CHECK(e.seed == 42);
    CHECK(cfg.output_path == "somewhere");
}

TEST_CASE("logspace axis") {
    const auto cfg = parse_config(
        R"({"sweep": {"axes": [{"name": "beta", "logspace": {"start": 0.01, "stop": 100, "count": 5}}]}})"_json);
    const auto& v = cfg.sweep.axes[0].values;
    REQUIRE(v.size() == 5);
    CHECK(v[0] == doctest::Approx(0.01));
    CHECK(v[2] == doctest::Approx(1.0));
    CHECK(v[4] == doctest::Approx(100.0));
}

TEST_CASE("unknown keys are rejected with their path") {
    auto field_of = [](const json& doc) {
        try {
            (void)parse_config(doc);
        } catch (const ConfigError& e) {
            return e.field();
        }
        return std::string("<accepted>");
    };
    CHECK(field_of(R"({"bogus": 1})"_json) == "bogus");
    CHECK(field_of(R"({"params": {"omega": 1}})"_json) == "params.omega");
    CHECK(field_of(R"({"section": {"project_u": {"axis": 1}}})"_json) == "section.project_u.axis");
    CHECK(field_of(R"({"sweep": {"axes": [{"name": "delta", "values": [1], "x": 0}]}})"_json)
              .find("x") != std::string::npos);
}

TEST_CASE("invalid values are rejected") {
    CHECK_THROWS_AS(parse_config(R"({"params": {"alpha": -1}})"_json), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"params": {"variant": "other"}})"_json), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"params": {"temperature": {"beta": 0}}})"_json),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"params": {"temperature": {"beta": "hot"}}})"_json),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"initial": {"sx": 1, "sz": 1}})"_json), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"integration": {"step": 0}})"_json), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"integration": {"rel_tol": 1}})"_json), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"lyapunov": {"n_renorm": 10}})"_json), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"lyapunov": {"d0": 1}})"_json), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"params": {"delta": "x"}})"_json), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"sweep": {"axes": [{"name": "delta"}]}})"_json), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"sweep": {"axes": [{"name": "mass", "values": [1]}]}})"_json),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"([1, 2])"_json), ConfigError);
}

TEST_CASE("echoed configuration round-trips exactly") {
    const json doc = R"({"params": {"delta": 1.92, "temperature": {"beta": 0.1}},
                         "initial": {"p": 2, "sz": 0},
                         "sweep": {"axes": [{"name": "beta", "values": ["inf", 0.3]}]},
                         "seed": 9})"_json;
    const auto first = to_json(parse_config(doc));
    const auto second = to_json(parse_config(first));
    CHECK(first == second);
    CHECK(first.dump() == second.dump());
    CHECK(first["params"]["temperature"]["beta"] == 0.1);
    CHECK(first["sweep"]["axes"][0]["values"][0] == "inf");
    CHECK(first.contains("lyapunov"));
    CHECK(first["initial"]["sx"].is_null());
    const auto zero = to_json(parse_config(json::object()));
    CHECK(zero["params"]["temperature"]["beta"] == "inf");
}

TEST_CASE("load_config reports syntax errors and missing files") {
    const auto dir = std::filesystem::temp_directory_path() / "cqed_config_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "broken.json").string();
    {
        std::ofstream(path) << "{\n  \"params\": {\n    \"delta\": 1,,\n  }\n}\n";
    }
    try {
        (void)load_config(path);
        FAIL("expected a syntax error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
    CHECK_THROWS_AS(load_config((dir / "absent.json").string()), ConfigError);
}

TEST_CASE("number formatting") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_double(std::nan("")) == "nan");
    for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300}) {
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(csv_escape("ok") == "ok");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
}
