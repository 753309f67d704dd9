#include "mmr/mmspace.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "mmr/errors.hpp"

namespace mmr {

namespace {

constexpr double kTriangleTol = 1e-9;

} // namespace

FiniteMMSpace::FiniteMMSpace(std::vector<std::vector<double>> dist, std::vector<double> weight) {
    n_ = static_cast<int>(weight.size());
    if (n_ < 1) throw ContractError("space: need at least one point");
    if (dist.size() != weight.size()) throw ContractError("space: dist/weight size mismatch");
    d_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
    for (int i = 0; i < n_; ++i) {
        if (dist[static_cast<std::size_t>(i)].size() != static_cast<std::size_t>(n_))
            throw ContractError("space: dist matrix is not square");
        for (int j = 0; j < n_; ++j)
            d_[static_cast<std::size_t>(i) * n_ + j] = dist[static_cast<std::size_t>(i)]
                                                           [static_cast<std::size_t>(j)];
    }
    double wsum = 0.0;
    w_ = std::move(weight);
    for (int i = 0; i < n_; ++i) {
        if (!(w_[static_cast<std::size_t>(i)] > 0.0))
            throw ContractError("space: weights must be positive (full support)");
        wsum += w_[static_cast<std::size_t>(i)];
    }
    if (std::abs(wsum - 1.0) > 1e-12)
        throw ContractError("space: weights must sum to 1 within 1e-12");
    auto dd = [this](int i, int j) { return d_[static_cast<std::size_t>(i) * n_ + j]; };
    for (int i = 0; i < n_; ++i) {
        if (dd(i, i) != 0.0) throw ContractError("space: nonzero diagonal in metric");
        for (int j = i + 1; j < n_; ++j) {
            if (!(dd(i, j) > 0.0) || !std::isfinite(dd(i, j)))
                throw ContractError("space: off-diagonal distances must be positive and finite");
            if (std::abs(dd(i, j) - dd(j, i)) > 1e-12)
                throw ContractError("space: metric not symmetric");
        }
    }
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            for (int k = 0; k < n_; ++k)
                if (dd(i, j) > dd(i, k) + dd(k, j) + kTriangleTol) {
                    std::ostringstream os;
                    os << "space: triangle inequality violated at (" << i << ", " << j << ", "
                       << k << "): " << dd(i, j) << " > " << dd(i, k) + dd(k, j);
                    throw ContractError(os.str());
                }
}

double FiniteMMSpace::diameter() const {
    double d = 0.0;
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j) d = std::max(d, dist(i, j));
    return d;
}

double FiniteMMSpace::min_positive_dist() const {
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j) d = std::min(d, dist(i, j));
    return d;
}

double FiniteMMSpace::max_nearest_neighbor_dist() const {
    double worst = 0.0;
    for (int i = 0; i < n_; ++i) {
        double nn = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n_; ++j)
            if (j != i) nn = std::min(nn, dist(i, j));
        worst = std::max(worst, nn);
    }
    return worst;
}

int Subset::count() const {
    int c = 0;
    for (auto b : in) c += b ? 1 : 0;
    return c;
}

Subset subset_from_indicator(const FiniteMMSpace& X, std::vector<std::uint8_t> in) {
    if (in.size() != static_cast<std::size_t>(X.size()))
        throw ContractError("subset: indicator size mismatch");
    Subset s;
    s.in = std::move(in);
    s.mass = 0.0;
    for (int i = 0; i < X.size(); ++i)
        if (s.in[static_cast<std::size_t>(i)]) s.mass += X.weight(i);
    return s;
}

Subset make_subset(const FiniteMMSpace& X, const std::vector<int>& indices) {
    std::vector<std::uint8_t> in(static_cast<std::size_t>(X.size()), 0);
    for (int i : indices) {
        if (i < 0 || i >= X.size()) throw ContractError("subset: index out of range");
        in[static_cast<std::size_t>(i)] = 1;
    }
    return subset_from_indicator(X, std::move(in));
}

LipschitzFunction make_lipschitz(const FiniteMMSpace& X, std::vector<double> values) {
    if (values.size() != static_cast<std::size_t>(X.size()))
        throw ContractError("lipschitz: value vector size mismatch");
    double lip = 0.0;
    for (int i = 0; i < X.size(); ++i)
        for (int j = i + 1; j < X.size(); ++j)
            lip = std::max(lip, std::abs(values[static_cast<std::size_t>(i)] -
                                         values[static_cast<std::size_t>(j)]) /
                                    X.dist(i, j));
    return {std::move(values), lip};
}

Subset neighborhood(const FiniteMMSpace& X, const Subset& A, double eps) {
    if (eps < 0.0) throw std::domain_error("neighborhood: eps must be >= 0");
    std::vector<std::uint8_t> in(static_cast<std::size_t>(X.size()), 0);
    for (int x = 0; x < X.size(); ++x) {
        if (A.in[static_cast<std::size_t>(x)]) {
            in[static_cast<std::size_t>(x)] = 1;
            continue;
        }
        for (int a = 0; a < X.size(); ++a) {
            if (A.in[static_cast<std::size_t>(a)] && X.dist(x, a) <= eps) {
                in[static_cast<std::size_t>(x)] = 1;
                break;
            }
        }
    }
    return subset_from_indicator(X, std::move(in));
}

double boundary_measure_eps(const FiniteMMSpace& X, const Subset& A, double eps) {
    if (!(eps > 0.0)) throw std::domain_error("boundary_measure_eps: eps must be > 0");
    return (neighborhood(X, A, eps).mass - A.mass) / eps;
}

namespace {

// bitmask cover sets: cover[x] = { y : d(x, y) <= eps }
std::vector<std::uint32_t> cover_masks(const FiniteMMSpace& X, double eps) {
    const int n = X.size();
    std::vector<std::uint32_t> cover(static_cast<std::size_t>(n), 0);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (X.dist(x, y) <= eps) cover[static_cast<std::size_t>(x)] |= (1u << y);
    return cover;
}

// enumerate all proper nonempty subsets, reporting (mass, boundary) pairs
template <typename F>
void for_each_subset(const FiniteMMSpace& X, double eps, F&& visit) {
    const int n = X.size();
    const auto cover = cover_masks(X, eps);
    const std::uint32_t full = (n == 32) ? 0xffffffffu : ((1u << n) - 1u);
    for (std::uint32_t A = 1; A < full; ++A) {
        double massA = 0.0, massB = 0.0;
        for (int x = 0; x < n; ++x) {
            const bool inA = (A >> x) & 1u;
            if (inA) massA += X.weight(x);
            if (inA || (cover[static_cast<std::size_t>(x)] & A)) massB += X.weight(x);
        }
        visit(A, massA, (massB - massA) / eps);
    }
}

std::vector<std::pair<double, double>> greedy_profile_points(const FiniteMMSpace& X, double eps) {
    // grow from each singleton by minimum boundary increment
    const int n = X.size();
    std::vector<std::pair<double, double>> pts;
    for (int s = 0; s < n; ++s) {
        std::vector<std::uint8_t> in(static_cast<std::size_t>(n), 0);
        in[static_cast<std::size_t>(s)] = 1;
        Subset A = subset_from_indicator(X, in);
        while (A.count() < n) {
            pts.emplace_back(A.mass, boundary_measure_eps(X, A, eps));
            int best = -1;
            double best_b = std::numeric_limits<double>::infinity();
            for (int x = 0; x < n; ++x) {
                if (A.in[static_cast<std::size_t>(x)]) continue;
                Subset trial = A;
                trial.in[static_cast<std::size_t>(x)] = 1;
                trial.mass += X.weight(x);
                const double b = boundary_measure_eps(X, trial, eps);
                if (b < best_b) {
                    best_b = b;
                    best = x;
                }
            }
            A.in[static_cast<std::size_t>(best)] = 1;
            A.mass += X.weight(best);
        }
    }
    return pts;
}

ProfileCurve profile_from_points(std::vector<std::pair<double, double>> pts, double eps,
                                 bool upper_only) {
    // min boundary per achieved mass (masses matched to 1e-12)
    std::map<long long, std::pair<double, double>> best;
    for (const auto& [v, b] : pts) {
        const long long key = static_cast<long long>(std::llround(v * 1e12));
        auto it = best.find(key);
        if (it == best.end() || b < it->second.second) best[key] = {v, b};
    }
    ProfileCurve pc;
    pc.convention = ProfileCurve::Convention::DiscreteEps;
    pc.eps = eps;
    pc.upper_bound_only = upper_only;
    for (const auto& [key, vb] : best) pc.samples.push_back(vb);
    return pc;
}

} // namespace

ProfileCurve profile_bruteforce(const FiniteMMSpace& X, double eps, bool greedy) {
    if (!(eps > 0.0)) throw std::domain_error("profile: eps must be > 0");
    if (X.size() > 20 && !greedy)
        throw SizeError("profile: exhaustive enumeration limited to n <= 20 (pass greedy)");
    if (X.size() == 1) {
        ProfileCurve pc;
        pc.convention = ProfileCurve::Convention::DiscreteEps;
        pc.eps = eps;
        return pc;
    }
    if (X.size() > 20) return profile_from_points(greedy_profile_points(X, eps), eps, true);
    std::vector<std::pair<double, double>> pts;
    pts.reserve(1u << X.size());
    for_each_subset(X, eps, [&pts](std::uint32_t, double v, double b) { pts.emplace_back(v, b); });
    return profile_from_points(std::move(pts), eps, false);
}

double cheeger_constant(const FiniteMMSpace& X, double eps, bool greedy) {
    if (!(eps > 0.0)) throw std::domain_error("cheeger: eps must be > 0");
    if (X.size() < 2) throw ContractError("cheeger: need at least two points");
    if (X.size() > 20 && !greedy)
        throw SizeError("cheeger: exhaustive enumeration limited to n <= 20 (pass greedy)");
    double h = std::numeric_limits<double>::infinity();
    if (X.size() > 20) {
        for (const auto& [v, b] : greedy_profile_points(X, eps))
            h = std::min(h, b / std::min(v, 1.0 - v));
        return h;
    }
    for_each_subset(X, eps, [&h](std::uint32_t, double v, double b) {
        h = std::min(h, b / std::min(v, 1.0 - v));
    });
    return h;
}

namespace {

double separation_two(const FiniteMMSpace& X, double k0, double k1) {
    const int n = X.size();
    // dmin[mask][x] = d(x, set(mask)), built incrementally over the lattice
    const std::uint32_t total = 1u << n;
    std::vector<double> dmin(static_cast<std::size_t>(total) * n, 0.0);
    for (std::uint32_t mask = 1; mask < total; ++mask) {
        const int low = __builtin_ctz(mask);
        const std::uint32_t rest = mask & (mask - 1);
        for (int x = 0; x < n; ++x) {
            const double dl = X.dist(x, low);
            dmin[static_cast<std::size_t>(mask) * n + x] =
                rest ? std::min(dmin[static_cast<std::size_t>(rest) * n + x], dl) : dl;
        }
    }
    double best = 0.0;
    std::vector<std::pair<double, double>> byd(static_cast<std::size_t>(n));
    for (std::uint32_t A = 1; A < total - 1; ++A) {
        double massA = 0.0;
        for (int x = 0; x < n; ++x)
            if ((A >> x) & 1u) massA += X.weight(x);
        if (massA + 1e-15 < k0) continue;
        // pick A1 = { x : d(x, A) >= delta } for the largest workable delta
        int m = 0;
        for (int x = 0; x < n; ++x) {
            if ((A >> x) & 1u) continue;
            byd[static_cast<std::size_t>(m++)] = {
                dmin[static_cast<std::size_t>(A) * n + x], X.weight(x)};
        }
        std::sort(byd.begin(), byd.begin() + m,
                  [](const auto& a, const auto& b) { return a.first > b.first; });
        double acc = 0.0;
        for (int i = 0; i < m; ++i) {
            acc += byd[static_cast<std::size_t>(i)].second;
            // extend to the end of the tie run before testing the threshold
            while (i + 1 < m && byd[static_cast<std::size_t>(i + 1)].first ==
                                    byd[static_cast<std::size_t>(i)].first) {
                ++i;
                acc += byd[static_cast<std::size_t>(i)].second;
            }
            if (acc + 1e-15 >= k1) {
                best = std::max(best, byd[static_cast<std::size_t>(i)].first);
                break;
            }
        }
    }
    return best;
}

struct SepSearch {
    const FiniteMMSpace& X;
    const std::vector<double>& kappas;
    double delta;
    std::vector<int> assign; // -1 none, else part index
    std::vector<double> part_mass;
    std::vector<double> suffix_weight;

    bool feasible_from(int x) {
        if (x == X.size()) {
            for (std::size_t p = 0; p < kappas.size(); ++p)
                if (part_mass[p] + 1e-15 < kappas[p]) return false;
            return true;
        }
        // prune: remaining weight cannot fill the deficits
        double deficit = 0.0;
        for (std::size_t p = 0; p < kappas.size(); ++p)
            deficit += std::max(0.0, kappas[p] - part_mass[p]);
        if (deficit > suffix_weight[static_cast<std::size_t>(x)] + 1e-15) return false;
        for (std::size_t p = 0; p < kappas.size(); ++p) {
            bool ok = true;
            for (int y = 0; y < x && ok; ++y)
                if (assign[static_cast<std::size_t>(y)] >= 0 &&
                    assign[static_cast<std::size_t>(y)] != static_cast<int>(p) &&
                    X.dist(x, y) < delta)
                    ok = false;
            if (!ok) continue;
            assign[static_cast<std::size_t>(x)] = static_cast<int>(p);
            part_mass[p] += X.weight(x);
            if (feasible_from(x + 1)) {
                part_mass[p] -= X.weight(x);
                assign[static_cast<std::size_t>(x)] = -1;
                return true;
            }
            part_mass[p] -= X.weight(x);
            assign[static_cast<std::size_t>(x)] = -1;
        }
        assign[static_cast<std::size_t>(x)] = -1;
        return feasible_from(x + 1);
    }
};

bool separation_feasible(const FiniteMMSpace& X, const std::vector<double>& kappas,
                         double delta) {
    SepSearch s{X, kappas, delta, std::vector<int>(static_cast<std::size_t>(X.size()), -1),
                std::vector<double>(kappas.size(), 0.0),
                std::vector<double>(static_cast<std::size_t>(X.size()) + 1, 0.0)};
    for (int x = X.size() - 1; x >= 0; --x)
        s.suffix_weight[static_cast<std::size_t>(x)] =
            s.suffix_weight[static_cast<std::size_t>(x) + 1] + X.weight(x);
    return s.feasible_from(0);
}

double separation_greedy(const FiniteMMSpace& X, const std::vector<double>& kappas) {
    // farthest-point seeded mass-greedy; a lower bound on the supremum
    const int n = X.size();
    const std::size_t m = kappas.size();
    double best = 0.0;
    for (int seed = 0; seed < n; ++seed) {
        std::vector<int> anchors{seed};
        while (anchors.size() < m) {
            int far = -1;
            double fard = -1.0;
            for (int x = 0; x < n; ++x) {
                double dmin = std::numeric_limits<double>::infinity();
                for (int a : anchors) dmin = std::min(dmin, X.dist(x, a));
                if (dmin > fard) {
                    fard = dmin;
                    far = x;
                }
            }
            anchors.push_back(far);
        }
        // assign every point to its nearest anchor, then shrink parts to meet masses
        std::vector<double> pm(m, 0.0);
        std::vector<std::vector<int>> parts(m);
        for (int x = 0; x < n; ++x) {
            std::size_t bestp = 0;
            for (std::size_t p = 1; p < m; ++p)
                if (X.dist(x, anchors[p]) < X.dist(x, anchors[bestp])) bestp = p;
            parts[bestp].push_back(x);
            pm[bestp] += X.weight(x);
        }
        bool ok = true;
        for (std::size_t p = 0; p < m; ++p)
            if (pm[p] + 1e-15 < kappas[p]) ok = false;
        if (!ok) continue;
        double sep = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < m; ++p)
            for (std::size_t q = p + 1; q < m; ++q)
                for (int a : parts[p])
                    for (int b : parts[q]) sep = std::min(sep, X.dist(a, b));
        best = std::max(best, sep);
    }
    return best;
}

} // namespace

double separation(const FiniteMMSpace& X, const std::vector<double>& kappas, bool heuristic) {
    if (kappas.size() < 2) throw ContractError("separation: need at least two kappas");
    double ksum = 0.0;
    for (double k : kappas) {
        if (!(k > 0.0)) throw std::domain_error("separation: kappas must be > 0");
        if (k > 1.0) return 0.0;
        ksum += k;
    }
    if (ksum > 1.0 + 1e-15) return 0.0;
    if (heuristic) return separation_greedy(X, kappas);
    if (kappas.size() == 2) {
        if (X.size() > 16)
            throw SizeError("separation: exact search limited to n <= 16 for pairs");
        return separation_two(X, kappas[0], kappas[1]);
    }
    if (X.size() > 14)
        throw SizeError("separation: exact search limited to n <= 14 (pass heuristic)");
    // binary search over candidate separation values (the distinct distances)
    std::vector<double> cand{0.0};
    for (int i = 0; i < X.size(); ++i)
        for (int j = i + 1; j < X.size(); ++j) cand.push_back(X.dist(i, j));
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    int lo = 0, hi = static_cast<int>(cand.size()) - 1;
    if (!separation_feasible(X, kappas, cand[static_cast<std::size_t>(lo)])) return 0.0;
    while (lo < hi) {
        const int mid = (lo + hi + 1) / 2;
        if (separation_feasible(X, kappas, cand[static_cast<std::size_t>(mid)]))
            lo = mid;
        else
            hi = mid - 1;
    }
    return cand[static_cast<std::size_t>(lo)];
}

Measure1D pushforward_function(const FiniteMMSpace& X, const LipschitzFunction& f) {
    std::vector<Measure1D::Atom> atoms;
    atoms.reserve(f.values.size());
    for (int i = 0; i < X.size(); ++i)
        atoms.push_back({f.values[static_cast<std::size_t>(i)], X.weight(i)});
    std::sort(atoms.begin(), atoms.end(),
              [](const Measure1D::Atom& a, const Measure1D::Atom& b) { return a.x < b.x; });
    std::vector<Measure1D::Atom> merged;
    for (const auto& a : atoms) {
        if (!merged.empty() && std::abs(a.x - merged.back().x) <= 1e-12)
            merged.back().mass += a.mass;
        else
            merged.push_back(a);
    }
    return Measure1D::atoms(std::move(merged));
}

namespace {

FiniteMMSpace path_space(const std::vector<double>& coords, std::vector<double> weights) {
    const std::size_t n = coords.size();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d[i][j] = std::abs(coords[i] - coords[j]);
    return FiniteMMSpace(std::move(d), std::move(weights));
}

} // namespace

ModelDiscretization discretize_interval(const Measure1D& nu, int resolution,
                                        IntervalNodeMode mode) {
    if (resolution < 2) throw ContractError("discretize_interval: resolution must be >= 2");
    std::vector<double> x(static_cast<std::size_t>(resolution));
    std::vector<double> w(static_cast<std::size_t>(resolution));
    if (mode == IntervalNodeMode::Quantile) {
        for (int i = 0; i < resolution; ++i) {
            x[static_cast<std::size_t>(i)] = nu.quantile((i + 0.5) / resolution);
            w[static_cast<std::size_t>(i)] = 1.0 / resolution;
        }
    } else {
        const double lo = nu.effective_lo(1e-9);
        const double hi = nu.effective_hi(1e-9);
        double s = 0.0;
        for (int i = 0; i < resolution; ++i) {
            x[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (resolution - 1);
            w[static_cast<std::size_t>(i)] = nu.density(x[static_cast<std::size_t>(i)]);
            s += w[static_cast<std::size_t>(i)];
        }
        if (!(s > 0.0)) throw ContractError("discretize_interval: zero density at all nodes");
        for (double& wi : w) wi /= s;
    }
    ModelDiscretization md{path_space(x, std::move(w)), x,
                           (x.back() - x.front()) / (resolution - 1)};
    return md;
}

ModelDiscretization discretize_sphere_angle(double N, int resolution) {
    if (resolution < 2) throw ContractError("discretize_sphere_angle: resolution must be >= 2");
    if (!(N > 1.0)) throw std::domain_error("discretize_sphere_angle: N must be > 1");
    std::vector<double> theta(static_cast<std::size_t>(resolution));
    std::vector<double> w(static_cast<std::size_t>(resolution));
    double s = 0.0;
    for (int i = 0; i < resolution; ++i) {
        theta[static_cast<std::size_t>(i)] = (i + 0.5) * kPi / resolution;
        w[static_cast<std::size_t>(i)] =
            std::pow(std::sin(theta[static_cast<std::size_t>(i)]), N - 1.0);
        s += w[static_cast<std::size_t>(i)];
    }
    for (double& wi : w) wi /= s;
    return {path_space(theta, std::move(w)), theta, kPi / resolution};
}

FiniteMMSpace make_circle(int k, double circumference) {
    if (k < 3) throw ContractError("circle: need at least 3 points");
    std::vector<std::vector<double>> d(static_cast<std::size_t>(k),
                                       std::vector<double>(static_cast<std::size_t>(k), 0.0));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            const int steps = std::min(std::abs(i - j), k - std::abs(i - j));
            d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                circumference * steps / k;
        }
    return FiniteMMSpace(std::move(d),
                         std::vector<double>(static_cast<std::size_t>(k), 1.0 / k));
}

ModelDiscretization discretize_warped(const std::function<double(double)>& phi, double a,
                                      double b, int n_power, const FiniteMMSpace& fiber,
                                      int resolution) {
    if (resolution < 2) throw ContractError("warped: resolution must be >= 2");
    if (!(b > a)) throw ContractError("warped: need b > a");
    const int nf = fiber.size();
    const int n = resolution * nf;
    std::vector<double> t(static_cast<std::size_t>(resolution));
    std::vector<double> ph(static_cast<std::size_t>(resolution));
    const double dt = (b - a) / resolution;
    for (int i = 0; i < resolution; ++i) {
        t[static_cast<std::size_t>(i)] = a + (i + 0.5) * dt; // cell midpoints
        ph[static_cast<std::size_t>(i)] = phi(t[static_cast<std::size_t>(i)]);
        if (!(ph[static_cast<std::size_t>(i)] > 0.0))
            throw std::domain_error("warped: phi must be positive on the interval");
    }
    // graph edges: along the t-axis, within a fiber slice, and diagonal moves
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> D(static_cast<std::size_t>(n) * n, inf);
    auto idx = [nf](int i, int x) { return static_cast<std::size_t>(i * nf + x); };
    for (int i = 0; i < n; ++i) D[static_cast<std::size_t>(i) * n + i] = 0.0;
    for (int i = 0; i < resolution; ++i) {
        for (int x = 0; x < nf; ++x) {
            for (int y = 0; y < nf; ++y) {
                if (x != y) {
                    const double within = ph[static_cast<std::size_t>(i)] * fiber.dist(x, y);
                    auto& e = D[idx(i, x) * n + idx(i, y)];
                    e = std::min(e, within);
                }
                if (i + 1 < resolution) {
                    const double pm = 0.5 * (ph[static_cast<std::size_t>(i)] +
                                             ph[static_cast<std::size_t>(i) + 1]);
                    const double cross = std::hypot(dt, pm * fiber.dist(x, y));
                    auto& e = D[idx(i, x) * n + idx(i + 1, y)];
                    e = std::min(e, cross);
                    auto& e2 = D[idx(i + 1, y) * n + idx(i, x)];
                    e2 = std::min(e2, cross);
                }
            }
        }
    }
    // all-pairs shortest paths
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            const double dik = D[static_cast<std::size_t>(i) * n + k];
            if (dik == inf) continue;
            for (int j = 0; j < n; ++j) {
                const double v = dik + D[static_cast<std::size_t>(k) * n + j];
                if (v < D[static_cast<std::size_t>(i) * n + j])
                    D[static_cast<std::size_t>(i) * n + j] = v;
            }
        }
    std::vector<std::vector<double>> dist(static_cast<std::size_t>(n),
                                          std::vector<double>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                D[static_cast<std::size_t>(i) * n + j];
    std::vector<double> w(static_cast<std::size_t>(n));
    std::vector<double> coord(static_cast<std::size_t>(n));
    double s = 0.0;
    for (int i = 0; i < resolution; ++i)
        for (int x = 0; x < nf; ++x) {
            const double wi = std::pow(ph[static_cast<std::size_t>(i)], n_power) *
                              fiber.weight(x) * dt;
            w[idx(i, x)] = wi;
            coord[idx(i, x)] = t[static_cast<std::size_t>(i)];
            s += wi;
        }
    for (double& wi : w) wi /= s;
    return {FiniteMMSpace(std::move(dist), std::move(w)), coord, dt};
}

} // namespace mmr
