#include <cmath>
#include <random>

#include <doctest.h>

#include "mmr/domination.hpp"
#include "mmr/errors.hpp"
#include "mmr/mmspace.hpp"

using namespace mmr;

namespace {

FiniteMMSpace two_point(double d = 1.0) {
    return FiniteMMSpace({{0.0, d}, {d, 0.0}}, {0.5, 0.5});
}

FiniteMMSpace uniform_path(int n, double length = 1.0) {
    std::vector<std::vector<double>> dist(static_cast<std::size_t>(n),
                                          std::vector<double>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                length * std::abs(i - j) / (n - 1);
    return FiniteMMSpace(std::move(dist),
                         std::vector<double>(static_cast<std::size_t>(n), 1.0 / n));
}

FiniteMMSpace four_cycle() {
    // unit edges, shortest-path metric
    std::vector<std::vector<double>> d{{0, 1, 2, 1}, {1, 0, 1, 2}, {2, 1, 0, 1}, {1, 2, 1, 0}};
    return FiniteMMSpace(std::move(d), {0.25, 0.25, 0.25, 0.25});
}

FiniteMMSpace two_clusters() {
    // two pairs at internal distance 1, separated by 10
    std::vector<std::vector<double>> d{
        {0, 1, 10, 10}, {1, 0, 10, 10}, {10, 10, 0, 1}, {10, 10, 1, 0}};
    return FiniteMMSpace(std::move(d), {0.25, 0.25, 0.25, 0.25});
}

} // namespace

TEST_CASE("space validation catches broken metrics") {
    CHECK_THROWS_AS(FiniteMMSpace({{0.0, 1.0}, {1.0, 0.0}}, {0.7, 0.7}), ContractError);
    CHECK_THROWS_AS(FiniteMMSpace({{0.0, 1.0}, {2.0, 0.0}}, {0.5, 0.5}), ContractError);
    CHECK_THROWS_AS(FiniteMMSpace({{0.0, 0.0}, {0.0, 0.0}}, {0.5, 0.5}), ContractError);
    CHECK_THROWS_AS(FiniteMMSpace({{0.0, 1.0}, {1.0, 0.0}}, {1.0, 0.0}), ContractError);
    // triangle violation names the witness triple
    try {
        FiniteMMSpace({{0, 1, 5}, {1, 0, 1}, {5, 1, 0}}, {0.4, 0.3, 0.3});
        FAIL("expected a triangle violation");
    } catch (const ContractError& e) {
        CHECK(std::string(e.what()).find("triangle") != std::string::npos);
    }
}

TEST_CASE("lipschitz certification recomputes the constant") {
    const FiniteMMSpace X = uniform_path(5);
    const LipschitzFunction f = make_lipschitz(X, {0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(f.lip == doctest::Approx(1.0).epsilon(1e-12));
    const LipschitzFunction g = make_lipschitz(X, {0.0, 0.5, 0.5, 0.5, 1.0});
    CHECK(g.lip == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("closed neighborhoods") {
    const FiniteMMSpace X = two_point();
    const Subset A = make_subset(X, {0});
    CHECK(neighborhood(X, A, 0.5).count() == 1);
    CHECK(neighborhood(X, A, 1.0).count() == 2); // closed: distance exactly 1 is in
    const FiniteMMSpace P = uniform_path(3);     // nodes at 0, 1/2, 1
    CHECK(neighborhood(P, make_subset(P, {1}), 0.5).count() == 3);
}

TEST_CASE("neighborhood monotonicity and composition") {
    const FiniteMMSpace X = uniform_path(9);
    std::mt19937 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<int> idx;
        for (int i = 0; i < 9; ++i)
            if (rng() % 3 == 0) idx.push_back(i);
        if (idx.empty()) idx.push_back(static_cast<int>(rng() % 9));
        const Subset A = make_subset(X, idx);
        const double e1 = (rng() % 4) * 0.125, e2 = (rng() % 4) * 0.125;
        const Subset big = neighborhood(X, A, e1 + e2);
        const Subset two_step = neighborhood(X, neighborhood(X, A, e1), e2);
        CHECK(big.mass >= neighborhood(X, A, e1).mass - 1e-15);
        // path metric: iterated growth equals one-shot growth
        for (int i = 0; i < 9; ++i)
            CHECK(big.in[static_cast<std::size_t>(i)] ==
                  two_step.in[static_cast<std::size_t>(i)]);
    }
    // on a general space the one-shot neighborhood contains the two-step one
    const FiniteMMSpace C = four_cycle();
    for (int start = 0; start < 4; ++start) {
        const Subset A = make_subset(C, {start});
        const Subset big = neighborhood(C, A, 1.5);
        const Subset two_step = neighborhood(C, neighborhood(C, A, 1.0), 0.5);
        for (int i = 0; i < 4; ++i)
            if (two_step.in[static_cast<std::size_t>(i)])
                CHECK(big.in[static_cast<std::size_t>(i)]);
    }
}

TEST_CASE("eps-boundary measure") {
    const FiniteMMSpace X = two_point();
    CHECK(boundary_measure_eps(X, make_subset(X, {0}), 1.0) == doctest::Approx(0.5));
    CHECK(boundary_measure_eps(X, make_subset(X, {0, 1}), 0.7) == doctest::Approx(0.0));
    CHECK_THROWS_AS(boundary_measure_eps(X, make_subset(X, {0}), 0.0), std::domain_error);
    // path-64: the half interval absorbs one node of mass 1/64 at eps = pitch
    const FiniteMMSpace P = uniform_path(64);
    std::vector<int> half;
    for (int i = 0; i < 32; ++i) half.push_back(i);
    const double eps = 1.0 / 63.0;
    CHECK(boundary_measure_eps(P, make_subset(P, half), eps * 1.0000001) ==
          doctest::Approx((1.0 / 64.0) / (eps * 1.0000001)).epsilon(1e-9));
}

TEST_CASE("profile by enumeration") {
    const ProfileCurve two = profile_bruteforce(two_point(), 1.0);
    REQUIRE(two.samples.size() == 1);
    CHECK(two.samples[0].first == doctest::Approx(0.5));
    CHECK(two.samples[0].second == doctest::Approx(0.5));
    CHECK(two.convention == ProfileCurve::Convention::DiscreteEps);

    const ProfileCurve cyc = profile_bruteforce(four_cycle(), 1.0);
    CHECK(cyc.eval(0.5) == doctest::Approx(0.5).epsilon(1e-12));

    // on a path, interval sets minimize: one absorbed node per eps
    const int n = 10;
    const FiniteMMSpace P = uniform_path(n);
    const double eps = (1.0 / (n - 1)) * 1.0000001;
    const ProfileCurve prof = profile_bruteforce(P, eps);
    for (int k = 1; k < n; ++k)
        CHECK(prof.eval(static_cast<double>(k) / n) ==
              doctest::Approx((1.0 / n) / eps).epsilon(1e-9));
    CHECK_THROWS_AS(profile_bruteforce(uniform_path(21), 0.1), SizeError);
}

TEST_CASE("greedy profile fallback is labeled and upper-bounds") {
    const FiniteMMSpace P = uniform_path(24);
    const double eps = (1.0 / 23.0) * 1.0000001;
    const ProfileCurve g = profile_bruteforce(P, eps, true);
    CHECK(g.upper_bound_only);
    for (const auto& [v, b] : g.samples) CHECK(b >= (1.0 / 24.0) / eps - 1e-9);
}

TEST_CASE("separation distance by enumeration") {
    CHECK(separation(two_point(), {0.5, 0.5}) == doctest::Approx(1.0));
    CHECK(separation(two_point(), {0.5, 0.6}) == 0.0);
    CHECK(separation(uniform_path(3), {1.0 / 3.0 - 1e-12, 1.0 / 3.0 - 1e-12}) ==
          doctest::Approx(1.0));
    CHECK(separation(two_point(), {0.5, 1.5}) == 0.0); // kappa > 1
    // three parts on a path of five
    const FiniteMMSpace P = uniform_path(5);
    CHECK(separation(P, {0.2, 0.2, 0.2}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(separation(uniform_path(17), {0.2, 0.2}), SizeError);
    CHECK_THROWS_AS(separation(two_point(), {0.5, -0.1}), std::domain_error);
}

TEST_CASE("separation heuristic lower-bounds the exact value") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.2, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 6;
        std::vector<double> xs(n);
        for (double& x : xs) x = u(rng) * 3.0;
        std::sort(xs.begin(), xs.end());
        for (int i = 1; i < n; ++i) xs[static_cast<std::size_t>(i)] += 0.05 * i;
        std::vector<std::vector<double>> d(n, std::vector<double>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    std::abs(xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(j)]);
        const FiniteMMSpace X(std::move(d), std::vector<double>(n, 1.0 / n));
        const double exact = separation(X, {0.3, 0.3});
        const double greedy = separation(X, {0.3, 0.3}, true);
        CHECK(greedy <= exact + 1e-12);
    }
}

TEST_CASE("cheeger constant") {
    CHECK(cheeger_constant(two_point(), 1.0) == doctest::Approx(1.0));
    CHECK(cheeger_constant(two_clusters(), 1.0) == doctest::Approx(0.0));
    const int n = 10;
    const FiniteMMSpace P = uniform_path(n);
    const double eps = (1.0 / 9.0) * 1.0000001;
    const double h = cheeger_constant(P, eps);
    const ProfileCurve prof = profile_bruteforce(P, eps);
    double expect = std::numeric_limits<double>::infinity();
    for (const auto& [v, b] : prof.samples) expect = std::min(expect, b / std::min(v, 1.0 - v));
    CHECK(h == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("size guards on the exhaustive algorithms") {
    const FiniteMMSpace big = discretize_interval(Measure1D::uniform(0, 1), 22).space;
    CHECK_THROWS_AS(cheeger_constant(big, 0.1), SizeError);
    CHECK_THROWS_AS(icl_check(big, Measure1D::uniform(0, 1), {{0.2, 0.4}},
                              ICLMode::Exhaustive),
                    SizeError);
    CHECK_NOTHROW(cheeger_constant(big, 0.1, true)); // greedy fallback
}

TEST_CASE("distribution of a function") {
    const FiniteMMSpace X = two_point();
    const Measure1D d1 = pushforward_function(X, make_lipschitz(X, {0.0, 1.0}));
    REQUIRE(d1.kind() == Measure1D::Kind::Atoms);
    CHECK(d1.mass_at(0.0) == doctest::Approx(0.5));
    CHECK(d1.mass_at(1.0) == doctest::Approx(0.5));
    const Measure1D d2 = pushforward_function(X, make_lipschitz(X, {0.7, 0.7}));
    CHECK(d2.atom_list().size() == 1);
    CHECK(d2.mass_at(0.7) == doctest::Approx(1.0));
    const FiniteMMSpace P = uniform_path(3);
    const Measure1D d3 = pushforward_function(P, make_lipschitz(P, {0.0, 0.5, 1.0}));
    CHECK(d3.atom_list().size() == 3);
    CHECK(d3.mass_at(0.5) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("interval discretization modes") {
    const auto md = discretize_interval(Measure1D::uniform(0, 1), 5);
    REQUIRE(md.space.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(md.space.weight(i) == doctest::Approx(0.2));
    CHECK(md.coordinate[1] == doctest::Approx(0.25));
    CHECK(md.space.dist(0, 4) == doctest::Approx(1.0));

    const auto q = discretize_interval(Measure1D::gaussian(0, 1), 8,
                                       IntervalNodeMode::Quantile);
    for (int i = 0; i < 8; ++i) CHECK(q.space.weight(i) == doctest::Approx(0.125));
    CHECK(q.coordinate[0] == doctest::Approx(-q.coordinate[7]).epsilon(1e-9));
}

TEST_CASE("sphere-angle discretization carries the model weights") {
    const int n = 64;
    const auto md = discretize_sphere_angle(2.0, n);
    REQUIRE(md.space.size() == n);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::sin(md.coordinate[static_cast<std::size_t>(i)]);
    for (int i = 0; i < n; ++i)
        CHECK(md.space.weight(i) ==
              doctest::Approx(std::sin(md.coordinate[static_cast<std::size_t>(i)]) / s));
    CHECK(md.space.diameter() == doctest::Approx(kPi - kPi / n).epsilon(1e-12));
}

TEST_CASE("warped product discretization") {
    const int res = 8, kf = 4;
    const auto md = discretize_warped([](double t) { return std::sin(t); }, 0.0, kPi, 1,
                                      make_circle(kf), res);
    REQUIRE(md.space.size() == res * kf);
    // row masses proportional to phi(t) * fiber mass
    double s = 0.0;
    std::vector<double> row(static_cast<std::size_t>(res), 0.0);
    for (int i = 0; i < res; ++i) {
        for (int x = 0; x < kf; ++x) row[static_cast<std::size_t>(i)] += md.space.weight(i * kf + x);
        s += std::sin(md.coordinate[static_cast<std::size_t>(i * kf)]);
    }
    for (int i = 0; i < res; ++i)
        CHECK(row[static_cast<std::size_t>(i)] ==
              doctest::Approx(std::sin(md.coordinate[static_cast<std::size_t>(i * kf)]) / s)
                  .epsilon(1e-9));
    // fiber circles shrink with phi: crossing the fiber is cheaper near the poles
    const double near_pole = md.space.dist(0 * kf + 0, 0 * kf + 2);
    const double near_equator = md.space.dist((res / 2) * kf + 0, (res / 2) * kf + 2);
    CHECK(near_pole < near_equator);
    // the t-coordinate is 1-Lipschitz
    const LipschitzFunction coord = make_lipschitz(md.space, md.coordinate);
    CHECK(coord.lip <= 1.0 + 1e-9);
    CHECK_THROWS_AS(discretize_warped([](double) { return -1.0; }, 0.0, 1.0, 1,
                                      make_circle(4), 4),
                    std::domain_error);
}

namespace {

// 1-Lipschitz measure-preserving quotient of a uniform path onto a path of
// half the point count and half the pitch
struct Quotient {
    FiniteMMSpace X;
    FiniteMMSpace Y;
};

Quotient path_quotient(int n_half, double pitch) {
    const int n = 2 * n_half;
    std::vector<std::vector<double>> dx(static_cast<std::size_t>(n),
                                        std::vector<double>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            dx[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                pitch * std::abs(i - j);
    std::vector<std::vector<double>> dy(static_cast<std::size_t>(n_half),
                                        std::vector<double>(static_cast<std::size_t>(n_half)));
    for (int i = 0; i < n_half; ++i)
        for (int j = 0; j < n_half; ++j)
            dy[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                pitch * std::abs(i - j);
    return {FiniteMMSpace(std::move(dx), std::vector<double>(n, 1.0 / n)),
            FiniteMMSpace(std::move(dy), std::vector<double>(n_half, 1.0 / n_half))};
}

} // namespace

TEST_CASE("quotient map: g(x_i) = y_(i/2) is 1-Lipschitz and measure-preserving") {
    const auto [X, Y] = path_quotient(8, 0.1);
    for (int i = 0; i < X.size(); ++i)
        for (int j = 0; j < X.size(); ++j)
            CHECK(Y.dist(i / 2, j / 2) <= X.dist(i, j) + 1e-12);
    std::vector<double> pulled(static_cast<std::size_t>(Y.size()), 0.0);
    for (int i = 0; i < X.size(); ++i) pulled[static_cast<std::size_t>(i / 2)] += X.weight(i);
    for (int k = 0; k < Y.size(); ++k) CHECK(pulled[static_cast<std::size_t>(k)] ==
                                             doctest::Approx(Y.weight(k)));
}

TEST_CASE("separation never grows under the quotient") {
    const auto [X, Y] = path_quotient(7, 0.2);
    for (double k0 : {0.15, 0.25, 0.4})
        for (double k1 : {0.15, 0.25, 0.4}) {
            CAPTURE(k0);
            CAPTURE(k1);
            CHECK(separation(Y, {k0, k1}) <= separation(X, {k0, k1}) + 1e-12);
        }
}

TEST_CASE("profile comparison across the quotient at shared masses") {
    const auto [X, Y] = path_quotient(8, 0.1);
    const double eps = 0.2000001; // two X-pitches = one Y-pitch
    const ProfileCurve px = profile_bruteforce(X, eps);
    const ProfileCurve py = profile_bruteforce(Y, eps);
    for (int k = 1; k < 8; ++k) {
        const double v = k / 8.0;
        CAPTURE(v);
        CHECK(px.eval(v) <= py.eval(v) + 1e-9);
    }
}

TEST_CASE("cheeger feeds the comparison-measure construction") {
    const FiniteMMSpace P = uniform_path(12);
    const double eps = (1.0 / 11.0) * 1.0000001;
    const double h = cheeger_constant(P, eps);
    REQUIRE(h > 0.0);
    const Measure1D nu = construct_from_phi(
        [h](double v) { return h * std::min(v, 1.0 - v); },
        GridSpec::uniform(1.0 / 2050.0, 1.0 - 1.0 / 2050.0, 1025));
    const ICReport ic = ic_check(profile_bruteforce(P, eps), nu, 2.0 * h / 12.0);
    CHECK(ic.pass);
}
