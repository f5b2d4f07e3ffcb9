#include "weightlab/io.hpp"

#include <doctest.h>

using namespace weightlab;

TEST_CASE("space ingestion") {
    json j = {{"points", 2},
              {"dist", {{0.0, 1.0}, {1.0, 0.0}}},
              {"measure", {1.0, 2.0}}};
    SUBCASE("round trip") {
        const auto s = space_from_json(j);
        CHECK(s.size() == 2);
        CHECK(s.dist(0, 1) == 1.0);
        CHECK(s.pointMeasure(1) == 2.0);
        CHECK(s.kappa() == 1.0);
    }
    SUBCASE("missing measure names the field") {
        j.erase("measure");
        try {
            space_from_json(j);
            FAIL("expected a config error");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("measure") != std::string::npos);
        }
    }
    SUBCASE("asymmetric matrix is structural, not config") {
        j["dist"] = {{0.0, 1.0}, {2.0, 0.0}};
        CHECK_THROWS_AS(space_from_json(j), StructuralError);
    }
}

TEST_CASE("grid ingestion") {
    SUBCASE("lebesgue keyword") {
        const json j = {{"grid", {{"dim", 1}, {"depth", 3}, {"cell_measure", "lebesgue"}}}};
        const auto g = grid_from_json(j);
        CHECK(g.cellCount() == 8);
        CHECK(g.isLebesgue());
    }
    SUBCASE("explicit cell measures") {
        const json j = {{"dim", 1}, {"depth", 1}, {"cell_measure", {0.25, 0.75}}};
        const auto g = grid_from_json(j);
        CHECK(!g.isLebesgue());
        CHECK(g.totalMeasure() == doctest::Approx(1.0));
    }
    SUBCASE("missing depth names the field") {
        const json j = {{"grid", {{"dim", 1}, {"cell_measure", "lebesgue"}}}};
        try {
            grid_from_json(j);
            FAIL("expected a config error");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("depth") != std::string::npos);
        }
    }
}

TEST_CASE("weight descriptors") {
    const auto g = DyadicGrid::lebesgue(1, 2);
    SUBCASE("ones") {
        const ArrayXd w = weight_from_json(json{{"type", "ones"}}, g);
        CHECK(w.size() == 4);
        CHECK(w[3] == 1.0);
    }
    SUBCASE("explicit values with a zero are rejected at ingestion") {
        const json j = {{"type", "values"}, {"values", {1.0, 2.0, 0.0, 1.0}}};
        CHECK_THROWS_AS(weight_from_json(j, g), StructuralError);
    }
    SUBCASE("seed override changes the cascade") {
        const json j = {{"type", "cascade"}, {"bound", 4.0}, {"seed", 1}};
        const ArrayXd a = weight_from_json(j, g);
        const ArrayXd b = weight_from_json(j, g, 2);
        bool differ = false;
        for (Index i = 0; i < a.size(); ++i) differ = differ || a[i] != b[i];
        CHECK(differ);
        CHECK(weight_label(j) == "cascade(bound=4,seed=1)");
        CHECK(weight_label(j, 2) == "cascade(bound=4,seed=2)");
    }
    SUBCASE("unknown type is a config error") {
        CHECK_THROWS_AS(weight_from_json(json{{"type", "nope"}}, g), ConfigError);
    }
}

TEST_CASE("schema version is required and pinned") {
    CHECK_THROWS_AS(require_schema_version(json::object()), ConfigError);
    CHECK_THROWS_AS(require_schema_version(json{{"schema_version", 2}}), ConfigError);
    CHECK_NOTHROW(require_schema_version(json{{"schema_version", 1}}));
}

TEST_CASE("17-digit formatting round-trips binary64") {
    for (double x : {1.0 / 3.0, 0.1, 6.02214076e23, 1.0 + 1e-15}) {
        const std::string s = format_g17(x);
        CHECK(std::stod(s) == x);
    }
}

TEST_CASE("check results serialize with params and note") {
    const CheckResult r = make_check("demo", "id-1", 1.0, 2.0, {{"p", 2.0}}, "lower-estimate");
    const json j = to_json(r);
    CHECK(j.at("pass").get<bool>());
    CHECK(j.at("slack").get<double>() == doctest::Approx(0.5));
    CHECK(j.at("params").at("p").get<double>() == 2.0);
    CHECK(j.at("note").get<std::string>() == "lower-estimate");
}
