#include <doctest.h>

#include "mmr/errors.hpp"
#include "mmr/json_io.hpp"

using namespace mmr;

TEST_CASE("measure JSON round trips preserve every kind") {
    std::vector<Measure1D> ms;
    ms.push_back(Measure1D::gaussian(0.25, 1.75));
    ms.push_back(Measure1D::spherical(3.5));
    ms.push_back(Measure1D::uniform(-1.0, 2.0));
    ms.push_back(Measure1D::atoms({{-0.5, 0.25}, {0.0, 0.25}, {2.0, 0.5}}));
    PiecewiseLinear h;
    h.xs = {0.0, 0.4, 0.6, 1.0};
    h.ys = {0.0, 0.4, 0.4, 0.8};
    ms.push_back(pushforward(Measure1D::uniform(0, 1), h)); // grid with an atom overlay
    for (std::size_t i = 0; i < ms.size(); ++i) {
        CAPTURE(i);
        const Measure1D back = measure_from_json(measure_to_json(ms[i]));
        CHECK(back.kind() == ms[i].kind());
        CHECK(levy_distance(back, ms[i]) < 1e-12);
        CHECK(back.atom_list().size() == ms[i].atom_list().size());
    }
}

TEST_CASE("measure JSON rejects malformed input naming the field") {
    CHECK_THROWS_AS(measure_from_json("not json"), SchemaError);
    CHECK_THROWS_AS(measure_from_json(R"({"kind": "gaussian", "mean": 0})"), SchemaError);
    CHECK_THROWS_AS(measure_from_json(R"({"kind": "nope"})"), SchemaError);
    CHECK_THROWS_AS(measure_from_json(R"({"kind": "uniform", "a": 1, "b": 0})"), SchemaError);
    try {
        measure_from_json(R"({"kind": "gaussian", "mean": 0, "sd": 1, "bogus": 3})");
        FAIL("expected a schema error");
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }
    CHECK_THROWS_AS(
        measure_from_json(R"({"schema": "other/9", "kind": "gaussian", "mean": 0, "sd": 1})"),
        SchemaError);
}

TEST_CASE("space JSON round trips and validates") {
    const FiniteMMSpace X({{0.0, 1.0, 2.0}, {1.0, 0.0, 1.0}, {2.0, 1.0, 0.0}},
                          {0.25, 0.5, 0.25});
    const FiniteMMSpace back = space_from_json(space_to_json(X));
    REQUIRE(back.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(back.weight(i) == X.weight(i));
        for (int j = 0; j < 3; ++j) CHECK(back.dist(i, j) == X.dist(i, j));
    }
    CHECK_THROWS_AS(space_from_json(R"({"n": 2, "dist": [[0, 1]], "weight": [0.5, 0.5]})"),
                    SchemaError);
    // a broken metric surfaces as a schema error on load
    CHECK_THROWS_AS(
        space_from_json(R"({"n": 2, "dist": [[0, 1], [2, 0]], "weight": [0.5, 0.5]})"),
        SchemaError);
}

TEST_CASE("inline measure shorthand") {
    CHECK(parse_measure_arg("gaussian").kind() == Measure1D::Kind::Gaussian);
    CHECK(parse_measure_arg("gaussian:1,2").gaussian_sd() == 2.0);
    CHECK(parse_measure_arg("uniform:0,2").uniform_b() == 2.0);
    CHECK(parse_measure_arg("sigma2").kind() == Measure1D::Kind::Spherical);
    CHECK(parse_measure_arg("spherical:3.5").spherical_dim() == 3.5);
    CHECK_THROWS_AS(parse_measure_arg("gaussian:1"), SchemaError);
    CHECK_THROWS_AS(parse_measure_arg("/nonexistent/file.json"), SchemaError);
}

TEST_CASE("report serialization carries the verdict vocabulary") {
    const auto rep = build_monotone_transport(Measure1D::gaussian(0, 1),
                                              Measure1D::gaussian(0, 0.5));
    const std::string j = domination_report_to_json(rep);
    CHECK(j.find("dominates-monotone") != std::string::npos);
    CHECK(j.find("breakpoints") != std::string::npos);
    const auto bad = build_monotone_transport(Measure1D::uniform(0, 1),
                                              Measure1D::uniform(0, 2));
    const std::string jb = domination_report_to_json(bad);
    CHECK(jb.find("\"fails\"") != std::string::npos);
    CHECK(jb.find("witness") != std::string::npos);
}
