#include "mmr/obsvar.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <queue>
#include <random>
#include <sstream>

#include "mmr/errors.hpp"

namespace mmr {

double lambda_variance(const FiniteMMSpace& X, const std::vector<double>& values,
                       const LambdaFn& lambda) {
    const int n = X.size();
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            s += 2.0 * X.weight(i) * X.weight(j) *
                 lambda.value(std::abs(values[static_cast<std::size_t>(i)] -
                                       values[static_cast<std::size_t>(j)]));
    return s;
}

double max_pair_violation(const FiniteMMSpace& X, const std::vector<double>& values) {
    double v = 0.0;
    for (int i = 0; i < X.size(); ++i)
        for (int j = i + 1; j < X.size(); ++j)
            v = std::max(v, std::abs(values[static_cast<std::size_t>(i)] -
                                     values[static_cast<std::size_t>(j)]) -
                                X.dist(i, j));
    return v;
}

std::vector<double> project_lipschitz(const FiniteMMSpace& X, std::vector<double> f,
                                      int max_sweeps) {
    const int n = X.size();
    if (max_sweeps < 0) max_sweeps = 50 * n * n;
    const double tol = 1e-12 * (X.diameter() + 1.0);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double diff = f[static_cast<std::size_t>(i)] -
                                    f[static_cast<std::size_t>(j)];
                const double excess = std::abs(diff) - X.dist(i, j);
                if (excess > 0.0) {
                    const double shift = 0.5 * excess * (diff > 0.0 ? 1.0 : -1.0);
                    f[static_cast<std::size_t>(i)] -= shift;
                    f[static_cast<std::size_t>(j)] += shift;
                    worst = std::max(worst, excess);
                }
            }
        if (worst <= tol) return f;
    }
    std::ostringstream os;
    os << "project_lipschitz: clamping did not converge within " << max_sweeps
       << " sweeps; residual violation " << max_pair_violation(X, f);
    throw NumericalError(os.str());
}

namespace {

// translate so the minimum sits at 0; prefer the lexicographically smaller
// of the function and its reflection (the objective is invariant to both)
std::vector<double> canonical_values(std::vector<double> f) {
    const double lo = *std::min_element(f.begin(), f.end());
    const double hi = *std::max_element(f.begin(), f.end());
    std::vector<double> g(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double v = f[i] - lo;
        g[i] = (hi - lo) - v;
        f[i] = v;
    }
    return std::lexicographical_compare(g.begin(), g.end(), f.begin(), f.end()) ? g : f;
}

std::vector<int> farthest_point_anchors(const FiniteMMSpace& X, int count) {
    std::vector<int> anchors{0};
    while (static_cast<int>(anchors.size()) < count) {
        int far = -1;
        double fard = -1.0;
        for (int x = 0; x < X.size(); ++x) {
            double dmin = std::numeric_limits<double>::infinity();
            for (int a : anchors) dmin = std::min(dmin, X.dist(x, a));
            if (dmin > fard) {
                fard = dmin;
                far = x;
            }
        }
        if (far < 0 || fard <= 0.0) break;
        anchors.push_back(far);
    }
    return anchors;
}

std::vector<double> gradient(const FiniteMMSpace& X, const std::vector<double>& f,
                             const LambdaFn& lambda) {
    const int n = X.size();
    std::vector<double> g(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double gi = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double diff = f[static_cast<std::size_t>(i)] - f[static_cast<std::size_t>(j)];
            if (diff == 0.0) continue;
            gi += X.weight(j) * lambda.slope(std::abs(diff)) * (diff > 0.0 ? 1.0 : -1.0);
        }
        g[static_cast<std::size_t>(i)] = 2.0 * X.weight(i) * gi;
    }
    return g;
}

struct AscentResult {
    double value = -1.0;
    std::vector<double> values;
};

AscentResult ascend(const FiniteMMSpace& X, std::vector<double> f, const LambdaFn& lambda) {
    const int n = X.size();
    const double diam = X.diameter();
    f = project_lipschitz(X, std::move(f));
    double value = lambda_variance(X, f, lambda);
    double step = 0.25 * diam;
    for (int it = 0; it < 500 && step > 1e-10 * diam; ++it) {
        const std::vector<double> g = gradient(X, f, lambda);
        std::vector<double> trial(f);
        for (int i = 0; i < n; ++i)
            trial[static_cast<std::size_t>(i)] += step * g[static_cast<std::size_t>(i)];
        trial = project_lipschitz(X, std::move(trial));
        const double tv = lambda_variance(X, trial, lambda);
        if (tv > value + 1e-15) {
            f = std::move(trial);
            value = tv;
            step *= 1.2;
        } else {
            step *= 0.5;
        }
    }
    return {value, std::move(f)};
}

} // namespace

ObsVarResult obsvar_bruteforce(const FiniteMMSpace& X, const LambdaFn& lambda, double delta) {
    const int n = X.size();
    if (n > 5) throw SizeError("obsvar_bruteforce: exhaustive grid limited to n <= 5");
    if (!(delta > 0.0)) throw std::domain_error("obsvar_bruteforce: delta must be > 0");

    ObsVarResult res;
    res.method = ObsVarResult::Method::Bruteforce;
    if (n == 1) {
        res.maximizer = make_lipschitz(X, {0.0});
        res.certificate = 0.0;
        return res;
    }

    std::vector<int> radius(static_cast<std::size_t>(n), 0);
    for (int i = 1; i < n; ++i)
        radius[static_cast<std::size_t>(i)] = static_cast<int>(std::floor(X.dist(0, i) / delta));
    std::vector<int> k(static_cast<std::size_t>(n), 0);
    for (int i = 1; i < n; ++i) k[static_cast<std::size_t>(i)] = -radius[static_cast<std::size_t>(i)];
    std::vector<double> f(static_cast<std::size_t>(n), 0.0);
    std::vector<double> best_f;
    double best = -1.0;

    const auto feasible = [&](int upto) {
        // pair constraints among coordinates 0..upto (0 is pinned at 0)
        for (int j = 0; j < upto; ++j)
            if (std::abs(f[static_cast<std::size_t>(upto)] - f[static_cast<std::size_t>(j)]) >
                X.dist(upto, j) + 1e-12)
                return false;
        return true;
    };

    // depth-first over the integer box, pruning infeasible prefixes
    int level = 1;
    f[1] = k[1] * delta;
    while (level >= 1) {
        if (k[static_cast<std::size_t>(level)] > radius[static_cast<std::size_t>(level)]) {
            --level;
            if (level >= 1) {
                ++k[static_cast<std::size_t>(level)];
                f[static_cast<std::size_t>(level)] = k[static_cast<std::size_t>(level)] * delta;
            }
            continue;
        }
        f[static_cast<std::size_t>(level)] = k[static_cast<std::size_t>(level)] * delta;
        if (!feasible(level)) {
            ++k[static_cast<std::size_t>(level)];
            continue;
        }
        if (level == n - 1) {
            const double v = lambda_variance(X, f, lambda);
            if (v > best) {
                best = v;
                best_f = f;
            }
            ++k[static_cast<std::size_t>(level)];
        } else {
            ++level;
            k[static_cast<std::size_t>(level)] = -radius[static_cast<std::size_t>(level)];
        }
    }

    res.value = best;
    res.maximizer = make_lipschitz(X, canonical_values(best_f));

    // certificate: rounding any feasible point toward the pinned center and
    // onto the grid moves pair distances by at most 2 * Delta
    const double dmin = X.min_positive_dist();
    const double diam = X.diameter();
    const double shift = (delta / dmin) * diam + 0.5 * delta;
    double cert = 0.0;
    for (int s = 0; s <= 512; ++s) {
        const double t = diam * s / 512.0;
        cert = std::max(cert, lambda.value(t + 2.0 * shift) - lambda.value(t));
    }
    res.certificate = cert;
    return res;
}

ObsVarResult obsvar_maximize(const FiniteMMSpace& X, const LambdaFn& lambda, int restarts,
                             unsigned seed, int threads) {
    if (restarts < 1) throw std::domain_error("obsvar_maximize: restarts must be >= 1");
    const int n = X.size();
    ObsVarResult res;
    res.method = ObsVarResult::Method::VertexHeuristic;
    res.restarts = restarts;
    if (n == 1) {
        res.maximizer = make_lipschitz(X, {0.0});
        return res;
    }

    const std::vector<int> anchors = farthest_point_anchors(X, std::min(n, 8));
    const double diam = X.diameter();

    auto make_start = [&](int r) {
        std::vector<double> f(static_cast<std::size_t>(n), 0.0);
        const int na = static_cast<int>(anchors.size());
        if (r < 2 * na) {
            const int a = anchors[static_cast<std::size_t>(r / 2)];
            const double sign = (r % 2 == 0) ? 1.0 : -1.0;
            for (int i = 0; i < n; ++i) f[static_cast<std::size_t>(i)] = sign * X.dist(a, i);
        } else {
            std::mt19937 rng(seed + static_cast<unsigned>(r) * 7919u + 1u);
            std::uniform_real_distribution<double> u(-0.5 * diam, 0.5 * diam);
            for (int i = 0; i < n; ++i) f[static_cast<std::size_t>(i)] = u(rng);
        }
        return f;
    };

    std::vector<AscentResult> results(static_cast<std::size_t>(restarts));
    if (threads > 1) {
        std::vector<std::future<AscentResult>> futs;
        futs.reserve(static_cast<std::size_t>(restarts));
        for (int r = 0; r < restarts; ++r)
            futs.push_back(std::async(std::launch::async, [&X, &lambda, &make_start, r]() {
                return ascend(X, make_start(r), lambda);
            }));
        for (int r = 0; r < restarts; ++r) results[static_cast<std::size_t>(r)] = futs[static_cast<std::size_t>(r)].get();
    } else {
        for (int r = 0; r < restarts; ++r)
            results[static_cast<std::size_t>(r)] = ascend(X, make_start(r), lambda);
    }

    int best_r = 0;
    for (int r = 1; r < restarts; ++r)
        if (results[static_cast<std::size_t>(r)].value >
            results[static_cast<std::size_t>(best_r)].value + 1e-15)
            best_r = r; // ties keep the earliest restart

    res.value = results[static_cast<std::size_t>(best_r)].value;
    res.maximizer =
        make_lipschitz(X, canonical_values(results[static_cast<std::size_t>(best_r)].values));
    return res;
}

BoundReport verify_bound(const FiniteMMSpace& X, const Measure1D& nu, const LambdaFn& lambda,
                         double tol, int restarts, unsigned seed) {
    BoundReport rep;
    rep.tol = tol;
    rep.obsvar = obsvar_maximize(X, lambda, restarts, seed).value;
    rep.var_nu = var_lambda(nu, lambda);
    rep.gap = rep.var_nu - rep.obsvar;
    rep.pass = rep.obsvar <= rep.var_nu + tol;
    return rep;
}

FoliationReport verify_foliation(const FiniteMMSpace& X, const LipschitzFunction& f,
                                 double tol) {
    const int n = X.size();
    FoliationReport rep;
    rep.tol = tol;
    rep.p = static_cast<int>(std::min_element(f.values.begin(), f.values.end()) -
                             f.values.begin());
    rep.q = static_cast<int>(std::max_element(f.values.begin(), f.values.end()) -
                             f.values.begin());

    auto second_gap = [&](int ext, bool minimum) {
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (i == ext) continue;
            const double gap = minimum
                                   ? f.values[static_cast<std::size_t>(i)] -
                                         f.values[static_cast<std::size_t>(ext)]
                                   : f.values[static_cast<std::size_t>(ext)] -
                                         f.values[static_cast<std::size_t>(i)];
            best = std::min(best, gap);
        }
        return best;
    };
    // uniqueness is exact-tie detection at metric scale, not the identity tol:
    // on path discretizations the runner-up differs by one pitch, which must
    // still count as a unique extremum
    const double tie_eps = 1e-6 * (X.diameter() + 1.0);
    rep.unique_p = n > 1 && second_gap(rep.p, true) > tie_eps;
    rep.unique_q = n > 1 && second_gap(rep.q, false) > tie_eps;

    rep.residual_p.resize(static_cast<std::size_t>(n));
    rep.residual_q.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        rep.residual_p[static_cast<std::size_t>(i)] =
            std::abs(f.values[static_cast<std::size_t>(i)] - X.dist(rep.p, i) -
                     f.values[static_cast<std::size_t>(rep.p)]);
        rep.residual_q[static_cast<std::size_t>(i)] =
            std::abs(f.values[static_cast<std::size_t>(i)] + X.dist(rep.q, i) -
                     f.values[static_cast<std::size_t>(rep.q)]);
        rep.max_residual_p =
            std::max(rep.max_residual_p, rep.residual_p[static_cast<std::size_t>(i)]);
        rep.max_residual_q =
            std::max(rep.max_residual_q, rep.residual_q[static_cast<std::size_t>(i)]);
        rep.max_alignment_defect =
            std::max(rep.max_alignment_defect,
                     X.dist(rep.p, i) + X.dist(i, rep.q) - X.dist(rep.p, rep.q));
    }

    const bool id_p = rep.max_residual_p <= tol;
    const bool id_q = rep.max_residual_q <= tol;
    if (rep.unique_p && rep.unique_q && id_p && id_q)
        rep.foliation_case = FoliationReport::Case::Bounded;
    else if (rep.unique_p && rep.unique_q && (id_p != id_q))
        rep.foliation_case = FoliationReport::Case::Ray;
    else
        rep.foliation_case = FoliationReport::Case::None;
    return rep;
}

// ------------------------------------------------------------ eigensolver

std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n) {
    // cyclic Jacobi with a fixed sweep budget
    auto at = [&a, n](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
        if (off < 1e-26) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> eig(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) eig[static_cast<std::size_t>(i)] = at(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

SpectralReport spectral_gap_check(const FiniteMMSpace& X, double eps, double tol, int restarts,
                                  unsigned seed) {
    const int n = X.size();
    if (!(eps > 0.0)) throw std::domain_error("spectral_gap_check: eps must be > 0");

    // connectivity of the eps-graph
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::queue<int> bfs;
    bfs.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!bfs.empty()) {
        const int x = bfs.front();
        bfs.pop();
        for (int y = 0; y < n; ++y)
            if (!seen[static_cast<std::size_t>(y)] && y != x && X.dist(x, y) <= eps) {
                seen[static_cast<std::size_t>(y)] = 1;
                ++reached;
                bfs.push(y);
            }
    }
    if (reached < n)
        throw ContractError("spectral_gap_check: eps-neighborhood graph is disconnected");

    // mu-weighted Laplacian, symmetrized by B^{-1/2} A B^{-1/2}
    std::vector<double> M(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        double diag = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i || X.dist(i, j) > eps) continue;
            const double w = X.weight(i) * X.weight(j) / (X.dist(i, j) * X.dist(i, j));
            diag += w;
            M[static_cast<std::size_t>(i) * n + j] =
                -w / std::sqrt(X.weight(i) * X.weight(j));
        }
        M[static_cast<std::size_t>(i) * n + i] = diag / X.weight(i);
    }
    const std::vector<double> eig = symmetric_eigenvalues(std::move(M), n);

    SpectralReport rep;
    rep.tol = tol;
    rep.convention = "edge weights mu_i*mu_j/d_ij^2 for d_ij <= eps; (Lf)_i = "
                     "sum_j w_ij (f_i - f_j) / mu_i";
    const double lmax = eig.back();
    rep.lambda1 = 0.0;
    for (double l : eig)
        if (l > std::max(1e-9, 1e-10 * std::max(lmax, 1.0))) {
            rep.lambda1 = l;
            break;
        }
    rep.obsvar = obsvar_maximize(X, lambda_square(), restarts, seed).value;
    rep.product = rep.lambda1 * rep.obsvar;
    rep.pass = rep.product <= 1.0 + tol;
    return rep;
}

} // namespace mmr
