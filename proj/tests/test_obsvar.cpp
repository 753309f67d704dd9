#include <array>
#include <cmath>
#include <functional>
#include <random>

#include <doctest.h>

#include "mmr/errors.hpp"
#include "mmr/mmspace.hpp"
#include "mmr/obsvar.hpp"

using namespace mmr;

namespace {

const double pi = kPi;

FiniteMMSpace two_point(double d = 1.0) {
    return FiniteMMSpace({{0.0, d}, {d, 0.0}}, {0.5, 0.5});
}

FiniteMMSpace path3() {
    return FiniteMMSpace({{0.0, 0.5, 1.0}, {0.5, 0.0, 0.5}, {1.0, 0.5, 0.0}},
                         {1.0 / 3, 1.0 / 3, 1.0 / 3});
}

FiniteMMSpace euclidean_space(const std::vector<std::array<double, 3>>& pts,
                              std::vector<double> w) {
    const std::size_t n = pts.size();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            d[i][j] = std::sqrt((pts[i][0] - pts[j][0]) * (pts[i][0] - pts[j][0]) +
                                (pts[i][1] - pts[j][1]) * (pts[i][1] - pts[j][1]) +
                                (pts[i][2] - pts[j][2]) * (pts[i][2] - pts[j][2]));
    return FiniteMMSpace(std::move(d), std::move(w));
}

FiniteMMSpace seeded_five_point(unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    while (true) {
        std::vector<std::array<double, 3>> pts(5);
        for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
        bool ok = true;
        for (int i = 0; i < 5 && ok; ++i)
            for (int j = i + 1; j < 5 && ok; ++j) {
                const double dx = pts[static_cast<std::size_t>(i)][0] -
                                  pts[static_cast<std::size_t>(j)][0];
                const double dy = pts[static_cast<std::size_t>(i)][1] -
                                  pts[static_cast<std::size_t>(j)][1];
                const double dz = pts[static_cast<std::size_t>(i)][2] -
                                  pts[static_cast<std::size_t>(j)][2];
                if (std::sqrt(dx * dx + dy * dy + dz * dz) < 0.42) ok = false;
            }
        if (!ok) continue;
        std::vector<double> w(5);
        double s = 0.0;
        for (double& wi : w) {
            wi = 0.5 + u(rng);
            s += wi;
        }
        for (double& wi : w) wi /= s;
        return euclidean_space(pts, std::move(w));
    }
}

} // namespace

TEST_CASE("bruteforce observable variance on tiny spaces") {
    const ObsVarResult two = obsvar_bruteforce(two_point(), lambda_square(), 1.0 / 16.0);
    CHECK(two.value == doctest::Approx(0.5).epsilon(1e-12));
    REQUIRE(two.maximizer.values.size() == 2);
    CHECK(two.maximizer.values[0] == doctest::Approx(0.0));
    CHECK(two.maximizer.values[1] == doctest::Approx(1.0));

    const FiniteMMSpace single({{0.0}}, {1.0});
    CHECK(obsvar_bruteforce(single, lambda_square(), 0.1).value == 0.0);

    const ObsVarResult p3 = obsvar_bruteforce(path3(), lambda_square(), 1.0 / 64.0);
    CHECK(p3.value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(p3.maximizer.values[0] == doctest::Approx(0.0));
    CHECK(p3.maximizer.values[1] == doctest::Approx(0.5));
    CHECK(p3.maximizer.values[2] == doctest::Approx(1.0));

    CHECK_THROWS_AS(obsvar_bruteforce(discretize_interval(Measure1D::uniform(0, 1), 6).space,
                                      lambda_square(), 0.1),
                    SizeError);
    CHECK_THROWS_AS(obsvar_bruteforce(two_point(), lambda_square(), 0.0), std::domain_error);
    CHECK_THROWS_AS(obsvar_maximize(two_point(), lambda_square(), 0), std::domain_error);
}

TEST_CASE("bruteforce maximizer sits at a polytope vertex") {
    const double delta = 1.0 / 32.0;
    for (unsigned seed : {3u, 4u}) {
        const FiniteMMSpace X = seeded_five_point(seed);
        const ObsVarResult res = obsvar_bruteforce(X, lambda_square(), delta);
        // a spanning set of near-tight constraints pins the maximizer
        std::vector<int> comp(5);
        for (int i = 0; i < 5; ++i) comp[static_cast<std::size_t>(i)] = i;
        std::function<int(int)> find = [&](int x) {
            return comp[static_cast<std::size_t>(x)] == x
                       ? x
                       : comp[static_cast<std::size_t>(x)] =
                             find(comp[static_cast<std::size_t>(x)]);
        };
        for (int i = 0; i < 5; ++i)
            for (int j = i + 1; j < 5; ++j) {
                const double gap =
                    X.dist(i, j) - std::abs(res.maximizer.values[static_cast<std::size_t>(i)] -
                                            res.maximizer.values[static_cast<std::size_t>(j)]);
                if (gap <= 2.0 * delta) comp[static_cast<std::size_t>(find(i))] = find(j);
            }
        int roots = 0;
        for (int i = 0; i < 5; ++i)
            if (find(i) == i) ++roots;
        CAPTURE(seed);
        CHECK(roots == 1);
    }
}

TEST_CASE("projection onto the Lipschitz polytope") {
    const FiniteMMSpace X = path3();
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> f{u(rng), u(rng), u(rng)};
        const std::vector<double> proj = project_lipschitz(X, f);
        CAPTURE(trial);
        CHECK(max_pair_violation(X, proj) <= 1e-10);
        CHECK(max_pair_violation(X, proj) <= max_pair_violation(X, f) + 1e-12);
        // idempotent at the fixed point
        const std::vector<double> again = project_lipschitz(X, proj);
        for (int i = 0; i < 3; ++i)
            CHECK(again[static_cast<std::size_t>(i)] ==
                  doctest::Approx(proj[static_cast<std::size_t>(i)]).epsilon(1e-12));
    }
}

TEST_CASE("optimizer matches the node-measure variance on a path") {
    const auto md = discretize_interval(Measure1D::uniform(0, 1), 33);
    const LambdaFn t2 = lambda_square();
    const ObsVarResult res = obsvar_maximize(md.space, t2, 6, 0);
    // the coordinate is the exact maximizer: pointwise lambda(|f_i - f_j|)
    // is capped by lambda(d_ij)
    const Measure1D nodes = pushforward_function(
        md.space, make_lipschitz(md.space, md.coordinate));
    CHECK(res.value == doctest::Approx(var_lambda(nodes, t2)).epsilon(1e-10));
    CHECK(res.maximizer.lip <= 1.0 + 1e-9);
    // canonical form: translated to min 0, so it equals the coordinate
    for (int i = 0; i < 33; ++i)
        CHECK(res.maximizer.values[static_cast<std::size_t>(i)] ==
              doctest::Approx(md.coordinate[static_cast<std::size_t>(i)]).epsilon(1e-9));
}

TEST_CASE("optimizer recovers the two-cluster split") {
    // within-distance 0.1, between 10; masses 0.4 / 0.6
    std::vector<std::vector<double>> d{
        {0.0, 0.1, 10.0, 10.0}, {0.1, 0.0, 10.0, 10.0},
        {10.0, 10.0, 0.0, 0.1}, {10.0, 10.0, 0.1, 0.0}};
    const FiniteMMSpace X(std::move(d), {0.2, 0.2, 0.3, 0.3});
    const LambdaFn t2 = lambda_square();
    const ObsVarResult res = obsvar_maximize(X, t2, 8, 0);
    const double two_level = 2.0 * 0.4 * 0.6 * t2.value(10.0);
    CHECK(res.value >= two_level * (1.0 - 1e-7));
    CHECK(res.value <= two_level + 2.0 * t2.value(0.1) + 1e-9);
}

TEST_CASE("objective invariance under translation and negation") {
    const FiniteMMSpace X = seeded_five_point(9);
    const LambdaFn t2 = lambda_square();
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> f(5);
        for (double& v : f) v = u(rng);
        f = project_lipschitz(X, f);
        const double base = lambda_variance(X, f, t2);
        std::vector<double> shifted(f), negated(f);
        for (double& v : shifted) v += 2.7;
        for (double& v : negated) v = -v;
        CHECK(lambda_variance(X, shifted, t2) == doctest::Approx(base).epsilon(1e-12));
        CHECK(lambda_variance(X, negated, t2) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("optimizer dominates random polytope members") {
    const FiniteMMSpace X = seeded_five_point(12);
    for (const LambdaFn& lambda : {lambda_square(), lambda_abs(), lambda_capped(1.0)}) {
        const double best = obsvar_maximize(X, lambda, 10, 0).value;
        std::mt19937 rng(77);
        std::uniform_real_distribution<double> u(-1.5, 1.5);
        for (int trial = 0; trial < 40; ++trial) {
            std::vector<double> f(5);
            for (double& v : f) v = u(rng);
            f = project_lipschitz(X, f);
            CAPTURE(lambda.name);
            CAPTURE(trial);
            CHECK(lambda_variance(X, f, lambda) <= best + 1e-9);
        }
    }
}

TEST_CASE("observable variance is monotone under the Lipschitz-order quotient") {
    // quotient of a uniform path onto half the points with half the extent
    const int n_half = 8;
    const double pitch = 0.15;
    std::vector<std::vector<double>> dx(16, std::vector<double>(16));
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) dx[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            pitch * std::abs(i - j);
    std::vector<std::vector<double>> dy(static_cast<std::size_t>(n_half),
                                        std::vector<double>(static_cast<std::size_t>(n_half)));
    for (int i = 0; i < n_half; ++i)
        for (int j = 0; j < n_half; ++j)
            dy[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = pitch * std::abs(i - j);
    const FiniteMMSpace X(std::move(dx), std::vector<double>(16, 1.0 / 16));
    const FiniteMMSpace Y(std::move(dy), std::vector<double>(n_half, 1.0 / n_half));
    const LambdaFn t2 = lambda_square();
    CHECK(obsvar_maximize(Y, t2, 6, 0).value <= obsvar_maximize(X, t2, 6, 0).value + 1e-9);
}

TEST_CASE("bound verification flags genuine violations") {
    // two-point obsvar 1/2 exceeds var of uniform(0,1) = 1/6: the negative control
    const BoundReport bad = verify_bound(two_point(), Measure1D::uniform(0, 1),
                                         lambda_square(), 0.05);
    CHECK_FALSE(bad.pass);
    CHECK(bad.obsvar == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(bad.var_nu == doctest::Approx(1.0 / 6.0).epsilon(1e-9));

    const auto md = discretize_sphere_angle(2.0, 128);
    const BoundReport ok = verify_bound(md.space, Measure1D::spherical(2), lambda_square(),
                                        0.02, 6, 0);
    CHECK(ok.pass);
    CHECK(std::abs(ok.gap) <= 0.02);
}

TEST_CASE("foliation cases: path, ladder, star, tripod") {
    // model path: both identities hold exactly at the coordinate
    const auto md = discretize_sphere_angle(2.0, 33);
    const LipschitzFunction coord = make_lipschitz(md.space, md.coordinate);
    const FoliationReport path_rep = verify_foliation(md.space, coord, 2.0 * md.pitch);
    CHECK(path_rep.foliation_case == FoliationReport::Case::Bounded);
    CHECK(path_rep.unique_p);
    CHECK(path_rep.unique_q);
    CHECK(path_rep.max_residual_p == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(path_rep.max_residual_q == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(path_rep.max_alignment_defect <= 1e-12);

    // ladder: two parallel chains at cross-distance h; the chain coordinate
    // ties at both ends, so no anchor is unique, but residuals stay below h
    const int n = 6;
    const double h = 0.05;
    std::vector<std::vector<double>> dl(static_cast<std::size_t>(2 * n),
                                        std::vector<double>(static_cast<std::size_t>(2 * n)));
    std::vector<double> chain(static_cast<std::size_t>(2 * n));
    for (int r = 0; r < 2; ++r)
        for (int i = 0; i < n; ++i) chain[static_cast<std::size_t>(r * n + i)] = i * 0.3;
    for (int a = 0; a < 2 * n; ++a)
        for (int b = 0; b < 2 * n; ++b) {
            const double dxc = std::abs(chain[static_cast<std::size_t>(a)] -
                                        chain[static_cast<std::size_t>(b)]);
            dl[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                dxc + ((a < n) != (b < n) && a != b ? h : 0.0);
        }
    const FiniteMMSpace ladder(std::move(dl),
                               std::vector<double>(static_cast<std::size_t>(2 * n),
                                                   0.5 / n));
    const FoliationReport lrep =
        verify_foliation(ladder, make_lipschitz(ladder, chain), 2.0 * h);
    CHECK(lrep.foliation_case == FoliationReport::Case::None); // tied extrema
    CHECK(lrep.max_residual_p <= h + 1e-12);
    CHECK(lrep.max_residual_q <= h + 1e-12);

    // star: distance to the center anchors the minimum but the maximum ties
    std::vector<std::vector<double>> ds{{0, 1, 1, 1}, {1, 0, 2, 2}, {1, 2, 0, 2}, {1, 2, 2, 0}};
    const FiniteMMSpace star(std::move(ds), {0.25, 0.25, 0.25, 0.25});
    const FoliationReport srep =
        verify_foliation(star, make_lipschitz(star, {0.0, 1.0, 1.0, 1.0}), 0.05);
    CHECK(srep.foliation_case == FoliationReport::Case::None);
    CHECK(srep.max_residual_p <= 1e-12); // the one-sided identity does hold
    CHECK_FALSE(srep.unique_q);

    // asymmetric tripod: unique extrema, one-sided identity only
    std::vector<std::vector<double>> dt{{0.0, 1.0, 2.0, 1.0, 1.5},
                                        {1.0, 0.0, 1.0, 2.0, 2.5},
                                        {2.0, 1.0, 0.0, 3.0, 3.5},
                                        {1.0, 2.0, 3.0, 0.0, 2.5},
                                        {1.5, 2.5, 3.5, 2.5, 0.0}};
    const FiniteMMSpace tripod(std::move(dt), {0.2, 0.2, 0.2, 0.2, 0.2});
    const FoliationReport trep =
        verify_foliation(tripod, make_lipschitz(tripod, {2.0, 1.0, 0.0, 3.0, 3.5}), 0.05);
    CHECK(trep.foliation_case == FoliationReport::Case::Ray);
    CHECK(trep.unique_p);
    CHECK(trep.unique_q);
    CHECK(trep.max_residual_p <= 1e-12);
    CHECK(trep.max_residual_q > 0.05);
}

TEST_CASE("spectral gap snapshots") {
    const SpectralReport two = spectral_gap_check(two_point(), 1.0, 0.05, 6, 0);
    CHECK(two.lambda1 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(two.obsvar == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(two.product == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(two.pass);

    // complete graph on 4 points, unit distances
    std::vector<std::vector<double>> d(4, std::vector<double>(4, 1.0));
    for (int i = 0; i < 4; ++i) d[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 0.0;
    const FiniteMMSpace k4(std::move(d), {0.25, 0.25, 0.25, 0.25});
    const SpectralReport kr = spectral_gap_check(k4, 1.0, 0.05, 8, 0);
    CHECK(kr.lambda1 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(kr.pass);

    CHECK_THROWS_AS(spectral_gap_check(two_point(10.0), 1.0), ContractError);
}

TEST_CASE("jacobi eigensolver on a known matrix") {
    // path-graph Laplacian with unit weights: spectrum {0, 1, 3}
    std::vector<double> L{1, -1, 0, -1, 2, -1, 0, -1, 1};
    const std::vector<double> eig = symmetric_eigenvalues(L, 3);
    CHECK(eig[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(eig[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eig[2] == doctest::Approx(3.0).epsilon(1e-12));
}
