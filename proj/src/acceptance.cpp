#include "mmr/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>
#include <vector>

#include "mmr/domination.hpp"
#include "mmr/errors.hpp"
#include "mmr/measure1d.hpp"
#include "mmr/mmspace.hpp"
#include "mmr/models.hpp"
#include "mmr/obsvar.hpp"

namespace mmr {

namespace {

struct Check {
    std::ostream& out;
    int failures = 0;

    void run(const char* name, double time_limit_s,
             const std::function<std::string()>& body) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string problem;
        try {
            problem = body();
        } catch (const std::exception& e) {
            problem = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (problem.empty() && time_limit_s > 0.0 && secs > time_limit_s) {
            std::ostringstream os;
            os << "exceeded time budget of " << time_limit_s << " s";
            problem = os.str();
        }
        char head[64];
        std::snprintf(head, sizeof(head), "(%.2f s)", secs);
        if (problem.empty()) {
            out << "[PASS] " << name << " " << head << "\n";
        } else {
            out << "[FAIL] " << name << " " << head << ": " << problem << "\n";
            ++failures;
        }
    }
};

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

// path nodes of gamma^1 restricted to [-4, 4], weights by density
ModelDiscretization gaussian_path(int n) {
    GridSpec g = GridSpec::uniform(-4.0, 4.0, n);
    std::vector<double> x = g.nodes;
    std::vector<double> w(x.size());
    const Measure1D gamma = Measure1D::gaussian(0.0, 1.0);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        w[i] = gamma.density(x[i]);
        s += w[i];
    }
    for (double& wi : w) wi /= s;
    std::vector<std::vector<double>> d(x.size(), std::vector<double>(x.size(), 0.0));
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) d[i][j] = std::abs(x[i] - x[j]);
    return {FiniteMMSpace(std::move(d), std::move(w)), x, 8.0 / (n - 1)};
}

FiniteMMSpace star_space(int leaves) {
    const int n = leaves + 1;
    std::vector<std::vector<double>> d(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int i = 1; i < n; ++i) {
        d[0][static_cast<std::size_t>(i)] = d[static_cast<std::size_t>(i)][0] = 1.0;
        for (int j = 1; j < n; ++j)
            if (i != j) d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 2.0;
    }
    return FiniteMMSpace(std::move(d),
                         std::vector<double>(static_cast<std::size_t>(n), 1.0 / n));
}

// deterministic 5-point metric spaces from Euclidean point clouds
FiniteMMSpace random_five_point(unsigned seed, double min_sep) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        double pts[5][3];
        for (auto& p : pts)
            for (double& c : p) c = u(rng);
        bool ok = true;
        for (int i = 0; i < 5 && ok; ++i)
            for (int j = i + 1; j < 5 && ok; ++j) {
                const double dx = pts[i][0] - pts[j][0];
                const double dy = pts[i][1] - pts[j][1];
                const double dz = pts[i][2] - pts[j][2];
                if (std::sqrt(dx * dx + dy * dy + dz * dz) < min_sep) ok = false;
            }
        if (!ok) continue;
        std::vector<std::vector<double>> d(5, std::vector<double>(5, 0.0));
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                const double dx = pts[i][0] - pts[j][0];
                const double dy = pts[i][1] - pts[j][1];
                const double dz = pts[i][2] - pts[j][2];
                d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    std::sqrt(dx * dx + dy * dy + dz * dz);
            }
        std::vector<double> w(5);
        double s = 0.0;
        for (double& wi : w) {
            wi = 0.5 + u(rng);
            s += wi;
        }
        for (double& wi : w) wi /= s;
        return FiniteMMSpace(std::move(d), std::move(w));
    }
    throw NumericalError("random_five_point: rejection sampling failed");
}

} // namespace

int run_acceptance(std::ostream& out, int threads) {
    Check ck{out};
    const double pi = kPi;

    ck.run("1. spherical closed forms at N = 2, 3", 1.0, [&]() -> std::string {
        const double e2 = std::abs(spherical_variance_closed_form(2.0) - (pi * pi / 4.0 - 2.0));
        const double e3 = std::abs(spherical_variance_closed_form(3.0) - (pi * pi / 12.0 - 0.5));
        if (e2 > 1e-10) return "N=2 error " + fmt(e2);
        if (e3 > 1e-10) return "N=3 error " + fmt(e3);
        return {};
    });

    ck.run("2. closed form vs quadrature moment", 5.0, [&]() -> std::string {
        for (double N : {1.5, 2.0, 3.0, 4.0, 8.0, 10.5}) {
            const double cf = spherical_variance_closed_form(N);
            const double qm = centered_second_moment(Measure1D::spherical(N));
            if (std::abs(cf - qm) > 1e-8)
                return "N=" + fmt(N) + " |closed - quadrature| = " + fmt(std::abs(cf - qm));
        }
        return {};
    });

    ck.run("3. recurrence identity and upper bound", 10.0, [&]() -> std::string {
        for (double N : {0.5, 1.0, 2.0, 3.0, 7.0}) {
            const double lhs = 2.0 * recurrence_K(N) / recurrence_I(N);
            const double rhs = spherical_variance_closed_form(N + 1.0);
            if (std::abs(lhs - rhs) > 1e-8)
                return "N=" + fmt(N) + " |2K/I - closed| = " + fmt(std::abs(lhs - rhs));
        }
        for (int N = 1; N <= 500; ++N) {
            const double v = spherical_variance_closed_form(N + 1.0);
            const double bound = (pi * pi / 4.0) / (N + 2.0);
            if (v > bound + 1e-12)
                return "bound violated at N=" + fmt(N) + ": " + fmt(v) + " > " + fmt(bound);
        }
        return {};
    });

    ck.run("4. asymptotic normalization N * value -> 1", 1.0, [&]() -> std::string {
        const double d200 = std::abs(200.0 * spherical_variance_closed_form(200.0) - 1.0);
        const double d1000 = std::abs(1000.0 * spherical_variance_closed_form(1000.0) - 1.0);
        if (d200 > 0.02) return "N=200 deviation " + fmt(d200);
        if (d1000 > 0.005) return "N=1000 deviation " + fmt(d1000);
        return {};
    });

    ck.run("5. quantile machinery on 6 measures", 10.0, [&]() -> std::string {
        std::vector<Measure1D> ms;
        ms.push_back(Measure1D::gaussian(0.0, 1.0));
        ms.push_back(Measure1D::gaussian(-1.0, 2.0));
        ms.push_back(Measure1D::uniform(0.0, 1.0));
        ms.push_back(Measure1D::spherical(2.0));
        ms.push_back(Measure1D::atoms({{0.0, 0.5}, {1.0, 0.5}}));
        ms.push_back(Measure1D::from_density(
            [](double x) {
                const double a = (x + 3.0) / 0.2, b = (x - 3.0) / 2.0;
                return 0.5 / 0.2 * std::exp(-0.5 * a * a) + 0.5 / 2.0 * std::exp(-0.5 * b * b);
            },
            GridSpec::uniform(-8.0, 8.0, 2048)));
        const Measure1D leb01 = Measure1D::uniform(0.0, 1.0);
        const int pts = 10000;
        for (std::size_t mi = 0; mi < ms.size(); ++mi) {
            const Measure1D& nu = ms[mi];
            for (int k = 1; k <= pts; ++k) {
                const double s = static_cast<double>(k) / pts;
                const double q = nu.quantile(s);
                if (nu.cdf(q) < s - 1e-12)
                    return "measure " + fmt(mi) + ": F(F~(s)) < s at s=" + fmt(s);
                if (std::isfinite(q) && nu.cdf(q) > 0.0 && nu.quantile(nu.cdf(q)) > q + 1e-9)
                    return "measure " + fmt(mi) + ": F~(F(t)) > t at t=" + fmt(q);
            }
            const Measure1D rebuilt = pushforward(leb01, quantile_map(nu, 2048));
            const double levy = levy_distance(rebuilt, nu);
            if (levy > 1e-3)
                return "measure " + fmt(mi) + ": decomposition round trip Levy " + fmt(levy);
            if (nu.absolutely_continuous()) {
                const Measure1D unif = pushforward(nu, cdf_map(nu, 2048));
                const double lu = levy_distance(unif, leb01);
                if (lu > 1e-3)
                    return "measure " + fmt(mi) + ": CDF pushforward Levy " + fmt(lu);
            }
        }
        return {};
    });

    ck.run("6. monotone transport: gaussian family and uniform pair", 5.0, [&]() -> std::string {
        const Measure1D g1 = Measure1D::gaussian(0.0, 1.0);
        for (double sd : {0.25, 0.5, 1.0}) {
            const auto rep = build_monotone_transport(g1, Measure1D::gaussian(0.0, sd));
            if (rep.verdict != DominationReport::Verdict::DominatesMonotone)
                return "gaussian sd=" + fmt(sd) + " did not certify (slope " +
                       fmt(rep.max_slope) + ", levy " + fmt(rep.roundtrip_levy) + ")";
        }
        const auto bad = build_monotone_transport(g1, Measure1D::gaussian(0.0, 1.5));
        if (bad.verdict != DominationReport::Verdict::Fails || !bad.witness ||
            !(bad.witness->slope > 1.0))
            return "gaussian sd=1.5 should fail with a slope witness";
        const Measure1D u1 = Measure1D::uniform(0.0, 1.0);
        const Measure1D u2 = Measure1D::uniform(0.0, 2.0);
        const auto rep = build_monotone_transport(u1, u2);
        if (rep.verdict != DominationReport::Verdict::Fails)
            return "uniform(0,1) -> uniform(0,2) should fail in the constructor";
        bool sep_fail = false;
        for (const auto& row :
             sep_necessary_check(u1, u2, {0.1, 0.2, 0.25, 0.3, 0.4, 0.45}))
            if (!row.pass) sep_fail = true;
        if (!sep_fail) return "uniform(0,1) -> uniform(0,2) passed every separation check";
        return {};
    });

    // criterion 7 table is reused by criterion 10
    struct SweepRow {
        int n;
        double diam, obsvar, var, gap;
    };
    std::vector<SweepRow> sigma_rows;

    ck.run("7. observable variance bound on path discretizations", 60.0, [&]() -> std::string {
        const LambdaFn t2 = lambda_square();
        const std::vector<int> sizes{33, 65, 129};
        // the gamma^1 comparison measure is the restriction the paths
        // discretize, so the gap is pure discretization error
        const Measure1D gamma_trunc = Measure1D::from_density(
            [](double x) { return std::exp(-0.5 * x * x); }, GridSpec::uniform(-4.0, 4.0, 4097));
        for (int family = 0; family < 2; ++family) {
            double prev_gap = std::numeric_limits<double>::infinity();
            for (int n : sizes) {
                ModelDiscretization md =
                    family == 0 ? discretize_sphere_angle(2.0, n) : gaussian_path(n);
                const Measure1D nu = family == 0 ? Measure1D::spherical(2.0) : gamma_trunc;
                const ObsVarResult ov = obsvar_maximize(md.space, t2, 6, 0, threads);
                const double var = var_lambda(nu, t2);
                const double gap = var - ov.value;
                if (ov.value > var + 0.05)
                    return (family == 0 ? std::string("sigma^2") : std::string("gamma^1")) +
                           " n=" + fmt(n) + ": obsvar " + fmt(ov.value) + " > var " +
                           fmt(var) + " + 0.05";
                if (std::abs(gap) >= std::abs(prev_gap))
                    return (family == 0 ? std::string("sigma^2") : std::string("gamma^1")) +
                           " n=" + fmt(n) + ": gap " + fmt(gap) +
                           " did not shrink (previous " + fmt(prev_gap) + ")";
                prev_gap = gap;
                if (family == 0)
                    sigma_rows.push_back({n, md.space.diameter(), ov.value, var, gap});
            }
        }
        return {};
    });

    ck.run("8. optimizer vs bruteforce oracle on 20 seeded spaces", 120.0, [&]() -> std::string {
        const LambdaFn t2 = lambda_square();
        const double delta = 1.0 / 24.0;
        double worst = 0.0;
        for (unsigned seed = 1; seed <= 20; ++seed) {
            const FiniteMMSpace X = random_five_point(1000u + seed, 0.42);
            const ObsVarResult brute = obsvar_bruteforce(X, t2, delta);
            const ObsVarResult opt = obsvar_maximize(X, t2, 10, seed, threads);
            const double diff = std::abs(opt.value - brute.value);
            worst = std::max(worst, diff);
            if (diff > *brute.certificate)
                return "seed " + fmt(seed) + ": |optimizer - grid| = " + fmt(diff) +
                       " exceeds certificate " + fmt(*brute.certificate);
        }
        out << "       (worst optimizer-vs-grid deviation " << fmt(worst) << ")\n";
        return {};
    });

    ck.run("9. foliation predicate: bounded on the model path, none on the star", 30.0,
           [&]() -> std::string {
               const LambdaFn t2 = lambda_square();
               const int n = 65;
               ModelDiscretization md = discretize_sphere_angle(2.0, n);
               const ObsVarResult ov = obsvar_maximize(md.space, t2, 6, 0, threads);
               const FoliationReport fol =
                   verify_foliation(md.space, ov.maximizer, 2.0 * md.pitch);
               if (fol.foliation_case != FoliationReport::Case::Bounded)
                   return "model path returned case != bounded";
               if (fol.max_residual_p > 2.0 * md.pitch || fol.max_residual_q > 2.0 * md.pitch)
                   return "model path residuals " + fmt(fol.max_residual_p) + ", " +
                          fmt(fol.max_residual_q) + " exceed 2 * pitch";
               const FiniteMMSpace star = star_space(4);
               const ObsVarResult ovs = obsvar_maximize(star, t2, 10, 0, threads);
               const FoliationReport fs = verify_foliation(star, ovs.maximizer, 0.05);
               if (fs.foliation_case != FoliationReport::Case::None)
                   return "star graph returned case != none";
               return {};
           });

    ck.run("10. diameter comparison on the model path", 5.0, [&]() -> std::string {
        if (sigma_rows.empty()) return "criterion 7 table unavailable";
        for (const auto& r : sigma_rows) {
            const double pitch = pi / r.n;
            if (std::abs(r.diam - (pi - pitch)) > 1e-9)
                return "n=" + fmt(r.n) + ": diameter " + fmt(r.diam) + " != pi - pitch";
            if (r.diam > pi) return "diameter exceeds diam supp sigma^2";
        }
        out << "       n-sweep (n, diam, obsvar, var, gap):\n";
        for (const auto& r : sigma_rows) {
            out << "       " << r.n << ", " << fmt(r.diam) << ", " << fmt(r.obsvar) << ", "
                << fmt(r.var) << ", " << fmt(r.gap) << "\n";
        }
        return {};
    });

    ck.run("11. spectral gap against observable variance", 60.0, [&]() -> std::string {
        const int n = 129;
        ModelDiscretization md = gaussian_path(n);
        const SpectralReport sr =
            spectral_gap_check(md.space, 2.0 * md.pitch, 0.05, 6, 0);
        if (!sr.pass)
            return "lambda1 * obsvar = " + fmt(sr.product) + " > 1.05 (lambda1 " +
                   fmt(sr.lambda1) + ", obsvar " + fmt(sr.obsvar) + ")";
        out << "       (lambda1 " << fmt(sr.lambda1) << ", obsvar " << fmt(sr.obsvar)
            << ", product " << fmt(sr.product) << ")\n";
        return {};
    });

    ck.run("12. Cheeger pipeline on a path space", 30.0, [&]() -> std::string {
        const int n = 16;
        ModelDiscretization md = discretize_interval(Measure1D::uniform(0.0, 1.0), n);
        const double eps = md.pitch * (1.0 + 1e-9); // node gaps can exceed the mean by 1 ulp
        const double h = cheeger_constant(md.space, eps);
        if (!(h > 0.0)) return "cheeger constant is not positive";
        const Measure1D nu = construct_from_phi(
            [h](double v) { return h * std::min(v, 1.0 - v); },
            GridSpec::uniform(1.0 / 2050.0, 1.0 - 1.0 / 2050.0, 1025));
        const ProfileCurve prof = profile_bruteforce(md.space, eps);
        const ICReport ic = ic_check(prof, nu, 2.0 * h / n);
        if (!ic.pass)
            return "ic_check margin " + fmt(ic.min_margin) + " below -tol (" +
                   fmt(2.0 * h / n) + ")";
        return {};
    });

    out << (ck.failures == 0 ? "acceptance: all criteria passed\n"
                             : "acceptance: FAILURES present\n");
    return ck.failures;
}

} // namespace mmr
