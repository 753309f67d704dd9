#include <cmath>
#include <random>

#include <doctest.h>

#include "mmr/domination.hpp"
#include "mmr/errors.hpp"
#include "mmr/mmspace.hpp"

using namespace mmr;

namespace {

const double pi = kPi;
using Verdict = DominationReport::Verdict;

} // namespace

TEST_CASE("monotone transport between gaussians scales quantiles") {
    const Measure1D g1 = Measure1D::gaussian(0, 1);
    const auto ok = build_monotone_transport(g1, Measure1D::gaussian(0, 0.5));
    REQUIRE(ok.verdict == Verdict::DominatesMonotone);
    REQUIRE(ok.map.has_value());
    CHECK(ok.max_slope == doctest::Approx(0.5).epsilon(1e-9));
    CHECK((*ok.map)(1.0) == doctest::Approx(0.5).epsilon(1e-6));

    const auto id = build_monotone_transport(g1, g1);
    CHECK(id.verdict == Verdict::DominatesMonotone);
    CHECK(id.max_slope == doctest::Approx(1.0).epsilon(1e-12));

    const auto bad = build_monotone_transport(g1, Measure1D::gaussian(0, 1.5));
    REQUIRE(bad.verdict == Verdict::Fails);
    REQUIRE(bad.witness.has_value());
    CHECK(bad.witness->slope == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("monotone transport between uniforms") {
    const auto expand = build_monotone_transport(Measure1D::uniform(0, 1),
                                                 Measure1D::uniform(0, 2));
    REQUIRE(expand.verdict == Verdict::Fails);
    CHECK(expand.witness->slope == doctest::Approx(2.0).epsilon(1e-9));

    const auto shrink = build_monotone_transport(Measure1D::uniform(0, 2),
                                                 Measure1D::uniform(0, 1));
    REQUIRE(shrink.verdict == Verdict::DominatesMonotone);
    CHECK(shrink.max_slope == doctest::Approx(0.5).epsilon(1e-9));
    CHECK((*shrink.map)(1.0) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("atomic sources are rejected") {
    CHECK_THROWS_AS(build_monotone_transport(Measure1D::atoms({{0.0, 1.0}}),
                                             Measure1D::uniform(0, 1)),
                    ContractError);
}

TEST_CASE("transport soundness: certified maps land within the Levy tolerance") {
    const Measure1D src = Measure1D::gaussian(0.5, 1.3);
    for (const Measure1D& target :
         {Measure1D::gaussian(-1, 0.7), Measure1D::uniform(-0.25, 0.75),
          Measure1D::spherical(3)}) {
        const auto rep = build_monotone_transport(src, target);
        REQUIRE(rep.verdict == Verdict::DominatesMonotone);
        const Measure1D pushed = pushforward(src, *rep.map);
        CHECK(levy_distance(pushed, target) <= 3.0 * rep.levy_tol);
    }
}

TEST_CASE("transport composition keeps the slope certificate") {
    const Measure1D a = Measure1D::gaussian(0, 1);
    const Measure1D b = Measure1D::gaussian(0, 0.6);
    const Measure1D c = Measure1D::gaussian(0, 0.3);
    const auto ab = build_monotone_transport(a, b);
    const auto bc = build_monotone_transport(b, c);
    REQUIRE(ab.verdict == Verdict::DominatesMonotone);
    REQUIRE(bc.verdict == Verdict::DominatesMonotone);
    const TransportMap composed = bc.map->compose_after(*ab.map);
    CHECK(composed.max_slope() <= ab.max_slope * bc.max_slope + 1e-6);
    CHECK(levy_distance(pushforward(a, composed), c) < 5e-3);
}

TEST_CASE("separation necessary checks") {
    const std::vector<double> kappas{0.1, 0.2, 0.25, 0.3, 0.4};
    // scaling down passes everywhere
    for (const auto& row : sep_necessary_check(Measure1D::gaussian(0, 1),
                                               Measure1D::gaussian(0, 0.5), kappas))
        CHECK(row.pass);
    // identity passes with equality
    for (const auto& row :
         sep_necessary_check(Measure1D::uniform(0, 1), Measure1D::uniform(0, 1), kappas)) {
        CHECK(row.pass);
        CHECK(row.sep_target == doctest::Approx(row.sep_source).epsilon(1e-9));
    }
    // the expanding pair fails at (1/4, 1/4): 1.0 > 0.5
    const auto rows = sep_necessary_check(Measure1D::uniform(0, 1),
                                          Measure1D::uniform(0, 2), {0.25});
    REQUIRE(rows.size() == 1);
    CHECK_FALSE(rows[0].pass);
    CHECK(rows[0].sep_target == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(rows[0].sep_source == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("a failed separation check implies the constructor fails too") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(0.2, 2.5);
    const std::vector<double> kappas{0.1, 0.2, 0.3, 0.4};
    for (int trial = 0; trial < 20; ++trial) {
        const Measure1D src = Measure1D::uniform(0, u(rng));
        const Measure1D dst = Measure1D::uniform(0, u(rng));
        bool sep_failed = false;
        for (const auto& row : sep_necessary_check(src, dst, kappas))
            if (!row.pass) sep_failed = true;
        if (sep_failed) {
            CAPTURE(trial);
            CHECK(build_monotone_transport(src, dst).verdict != Verdict::DominatesMonotone);
        }
    }
}

TEST_CASE("profile comparison ic_check") {
    const Measure1D g1 = Measure1D::gaussian(0, 1);
    const ProfileCurve gauss_prof = half_line_profile(g1, 1024);

    // same curve: equality within the curve's interpolation resolution
    const ICReport self = ic_check(gauss_prof, g1, 1e-4);
    CHECK(self.pass);
    CHECK(std::abs(self.min_margin) < 1e-4);

    // a narrower target density exceeds the profile at its center
    const ICReport narrow = ic_check(gauss_prof, Measure1D::gaussian(0, 0.5), 1e-6);
    CHECK_FALSE(narrow.pass);
    CHECK(narrow.min_margin < -0.3);
    CHECK(std::abs(narrow.argmin_t) < 0.2);

    // a wider target density stays below the profile everywhere
    CHECK(ic_check(gauss_prof, Measure1D::gaussian(0, 2), 1e-6).pass);

    // constant profile of the uniform model
    ProfileCurve flat;
    flat.samples = {{1e-4, 1.0}, {1.0 - 1e-4, 1.0}};
    CHECK(ic_check(flat, Measure1D::uniform(0, 1), 1e-9).pass);
}

TEST_CASE("Levy-type check on a discretized interval") {
    const int n = 64;
    std::vector<std::vector<double>> d(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n)));
    std::vector<double> coord(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) coord[static_cast<std::size_t>(i)] = i / 63.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                std::abs(coord[static_cast<std::size_t>(i)] - coord[static_cast<std::size_t>(j)]);
    const FiniteMMSpace X(std::move(d), std::vector<double>(n, 1.0 / n));
    const LipschitzFunction f = make_lipschitz(X, coord);

    std::vector<std::pair<double, double>> ab;
    for (double a : {0.1, 0.3, 0.5})
        for (double b : {0.5, 0.7, 0.9})
            if (a <= b) ab.emplace_back(a, b);
    const ICLReport rep = icl_check(X, Measure1D::uniform(0, 1), ab, ICLMode::Sublevel, &f,
                                    2.0 / 64.0);
    CHECK(rep.pass);
    CHECK_FALSE(rep.resolution_warning);
}

TEST_CASE("Levy-type check fails on the two-point space below its pitch") {
    const FiniteMMSpace X({{0.0, 1.0}, {1.0, 0.0}}, {0.5, 0.5});
    const ICLReport rep = icl_check(X, Measure1D::uniform(0, 1), {{0.4, 0.6}},
                                    ICLMode::Exhaustive, nullptr, 0.01);
    CHECK_FALSE(rep.pass);
    REQUIRE(rep.has_counterexample);
    CHECK(rep.counterexample_A.count() == 1);
    CHECK(rep.counterexample_a == doctest::Approx(0.4));
    CHECK(rep.counterexample_b == doctest::Approx(0.6));
    CHECK(rep.resolution_warning); // b - a below the metric pitch
}

TEST_CASE("Levy-type check degenerates gracefully at a = b") {
    const FiniteMMSpace X({{0.0, 1.0}, {1.0, 0.0}}, {0.5, 0.5});
    const ICLReport rep = icl_check(X, Measure1D::uniform(0.2, 0.4),
                                    {{0.25, 0.25}, {0.3, 0.3}}, ICLMode::Exhaustive, nullptr,
                                    1e-9);
    CHECK(rep.pass);
}

TEST_CASE("Levy-type check on the discretized model measures") {
    const auto md = discretize_sphere_angle(2.0, 48);
    const LipschitzFunction coord = make_lipschitz(md.space, md.coordinate);
    std::vector<std::pair<double, double>> ab;
    for (double a : {0.5, 1.0, 1.6})
        for (double b : {1.6, 2.2, 2.6})
            if (a <= b) ab.emplace_back(a, b);
    const ICLReport rep = icl_check(md.space, Measure1D::spherical(2), ab, ICLMode::Sublevel,
                                    &coord, 2.0 * md.pitch);
    CHECK(rep.pass);

    // gaussian family on its truncated path, default tolerance (2x pitch)
    const auto gp = discretize_interval(Measure1D::gaussian(0, 1), 64);
    const LipschitzFunction gc = make_lipschitz(gp.space, gp.coordinate);
    std::vector<std::pair<double, double>> gab;
    for (double a : {-2.0, -1.0, 0.0})
        for (double b : {0.0, 1.0, 2.0})
            if (a <= b) gab.emplace_back(a, b);
    const ICLReport grep = icl_check(gp.space, Measure1D::gaussian(0, 1), gab,
                                     ICLMode::Sublevel, &gc);
    CHECK(grep.pass);
    CHECK(grep.tol == doctest::Approx(2.0 * gp.space.max_nearest_neighbor_dist()));
}

TEST_CASE("iso-dominance of the model measure over its own discretization") {
    const int n = 33;
    const auto md = discretize_sphere_angle(2.0, n);
    const Measure1D sigma2 = Measure1D::spherical(2);
    std::vector<LipschitzFunction> family;
    family.push_back(make_lipschitz(md.space, md.coordinate)); // coordinate
    std::vector<double> folded(md.coordinate);
    for (double& v : folded) v = std::abs(v - pi / 2.0); // distance to the midpoint
    family.push_back(make_lipschitz(md.space, folded));

    const IsoDominanceReport rep = iso_dominance_check(md.space, sigma2, family);
    REQUIRE(rep.entries.size() == 2);
    CHECK(rep.entries[0].verdict == Verdict::DominatesMonotone);
    CHECK(rep.entries[1].verdict == Verdict::DominatesMonotone);
    CHECK(rep.all_pass);
    // the folded map is a genuine contraction, well below slope 1
    CHECK(rep.entries[1].max_slope < 0.85);

    // same story for the gaussian family over its truncated path
    const auto gp = discretize_interval(Measure1D::gaussian(0, 1), n);
    const IsoDominanceReport grep = iso_dominance_check(
        gp.space, Measure1D::gaussian(0, 1),
        {make_lipschitz(gp.space, gp.coordinate)});
    CHECK(grep.all_pass);
}

TEST_CASE("transport onto a mixed target (grid density with an atom overlay)") {
    PiecewiseLinear h;
    h.xs = {0.0, 0.4, 0.6, 1.0};
    h.ys = {0.0, 0.4, 0.4, 0.8};
    const Measure1D mixed = pushforward(Measure1D::uniform(0, 1), h);
    REQUIRE(mixed.mass_at(0.4) == doctest::Approx(0.2).epsilon(1e-9));
    const auto rep = build_monotone_transport(Measure1D::gaussian(0, 1), mixed);
    CHECK(rep.verdict == DominationReport::Verdict::DominatesMonotone);
    // unit target density against gaussian quantile spreading: slope < 1
    CHECK(rep.max_slope < 1.0);
    const Measure1D pushed = pushforward(Measure1D::gaussian(0, 1), *rep.map);
    CHECK(pushed.mass_at(0.4) == doctest::Approx(0.2).epsilon(1e-2));
}

TEST_CASE("iso-dominance rejects spread-out targets and non-Lipschitz members") {
    const FiniteMMSpace X({{0.0, 1.0}, {1.0, 0.0}}, {0.5, 0.5});
    std::vector<LipschitzFunction> family{make_lipschitz(X, {0.0, 1.0})};
    const IsoDominanceReport rep =
        iso_dominance_check(X, Measure1D::uniform(0, 1), family);
    CHECK_FALSE(rep.all_pass);
    CHECK(rep.entries[0].verdict == Verdict::Fails);

    std::vector<LipschitzFunction> bad{make_lipschitz(X, {0.0, 2.0})};
    try {
        iso_dominance_check(X, Measure1D::uniform(0, 1), bad);
        FAIL("expected a contract error");
    } catch (const ContractError& e) {
        CHECK(std::string(e.what()).find("(0, 1)") != std::string::npos);
    }
}
