#include "mmr/domination.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mmr/errors.hpp"

namespace mmr {

namespace {

bool is_grid_like(const Measure1D& m) {
    return m.kind() == Measure1D::Kind::Grid || m.kind() == Measure1D::Kind::Atoms;
}

// largest gap between consecutive atoms (0 if fewer than 2)
double atom_pitch(const Measure1D& m) {
    const auto& a = m.atom_list();
    double g = 0.0;
    for (std::size_t i = 0; i + 1 < a.size(); ++i) g = std::max(g, a[i + 1].x - a[i].x);
    return g;
}

} // namespace

DominationReport build_monotone_transport(const Measure1D& source, const Measure1D& target,
                                          TransportOptions opts) {
    if (source.kind() == Measure1D::Kind::Atoms)
        throw ContractError("build_monotone_transport: source must have a continuous CDF");

    DominationReport rep;

    // quantile levels: uniform fill, except that every atom of the target
    // owns a mass slab (a plateau of F~) sampled only at its endpoints, so
    // the jump onto the atom is stretched over the full preceding slab
    // instead of one fill step. Atoms far below the dominant mass scale get
    // no slab: a ramp confined to a near-empty slab would fake a steep
    // slope, while ignoring the atom costs only its own mass in Levy
    // distance, well under the tolerance.
    double max_atom_mass = 0.0;
    for (const auto& a : target.atom_list()) max_atom_mass = std::max(max_atom_mass, a.mass);
    const double mass_floor = 1e-3 * max_atom_mass;
    std::vector<std::pair<double, double>> slabs;
    for (const auto& a : target.atom_list()) {
        if (a.mass < mass_floor) continue;
        const double after = target.cdf(a.x);
        slabs.emplace_back(after - a.mass, after);
    }
    std::vector<double> us;
    us.reserve(static_cast<std::size_t>(opts.samples) + 2 * slabs.size() + 1);
    for (int k = 1; k <= opts.samples; ++k) {
        const double u = static_cast<double>(k) / (opts.samples + 1);
        bool interior = false;
        for (const auto& [lo_s, hi_s] : slabs)
            if (u > lo_s + 1e-14 && u < hi_s - 1e-14) interior = true;
        if (!interior) us.push_back(u);
    }
    const double tiny = std::min(1e-3 / opts.samples, 1e-6);
    for (const auto& [lo_s, hi_s] : slabs) {
        // the lead-in and lead-out levels must stay inside their own slab
        us.push_back(lo_s > 0.0 ? lo_s : std::min(tiny, 0.5 * hi_s));
        us.push_back(std::min(hi_s, 1.0));
        if (hi_s >= 1.0 - 1e-15)
            us.push_back(1.0 - std::min(tiny, 0.5 * (hi_s - lo_s)));
    }
    std::sort(us.begin(), us.end());
    us.erase(std::unique(us.begin(), us.end(), [](double a, double b) { return b - a < 1e-14; }),
             us.end());

    TransportMap G;
    std::vector<double> levels;
    for (double u : us) {
        const double x = source.quantile(u);
        const double y = target.quantile(u);
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        if (!G.xs.empty() && x - G.xs.back() < 1e-14 * (std::abs(x) + 1.0)) continue;
        G.xs.push_back(x);
        G.ys.push_back(y);
        levels.push_back(u);
    }
    if (G.xs.size() < 2) throw NumericalError("build_monotone_transport: degenerate sampling");

    rep.slope_tol = opts.slope_tol;
    rep.levy_tol = opts.levy_tol;
    if (rep.slope_tol < 0.0)
        rep.slope_tol = (is_grid_like(source) || is_grid_like(target))
                            ? 2.0 / static_cast<double>(G.xs.size())
                            : 1e-9;
    if (rep.levy_tol < 0.0)
        rep.levy_tol = 3.0 / opts.samples +
                       (target.kind() == Measure1D::Kind::Atoms ? 1.5 * atom_pitch(target) : 0.0);

    rep.max_slope = 0.0;
    std::size_t worst = 0;
    for (std::size_t k = 0; k + 1 < G.xs.size(); ++k) {
        const double s = G.slope(k);
        if (s > rep.max_slope) {
            rep.max_slope = s;
            worst = k;
        }
    }

    if (rep.max_slope > 1.0 + rep.slope_tol) {
        rep.verdict = DominationReport::Verdict::Fails;
        rep.witness = SlopeWitness{levels[worst], levels[worst + 1], G.xs[worst],
                                   G.xs[worst + 1], rep.max_slope};
        return rep;
    }

    const Measure1D pushed = pushforward(source, G);
    rep.roundtrip_levy = levy_distance(pushed, target);
    if (rep.roundtrip_levy <= rep.levy_tol) {
        rep.verdict = DominationReport::Verdict::DominatesMonotone;
        rep.map = std::move(G);
    } else {
        // slope certified but mass transport failed to land: no monotone map
        // at this resolution, and non-monotone maps are not explored
        rep.verdict = DominationReport::Verdict::Undecided;
    }
    return rep;
}

std::vector<SepCheckRow> sep_necessary_check(const Measure1D& source, const Measure1D& target,
                                             const std::vector<double>& kappas, double tol) {
    std::vector<SepCheckRow> rows;
    for (double k0 : kappas)
        for (double k1 : kappas) {
            SepCheckRow r;
            r.k0 = k0;
            r.k1 = k1;
            r.sep_target = sep_measure(target, k0, k1);
            r.sep_source = sep_measure(source, k0, k1);
            r.pass = r.sep_target <= r.sep_source + tol;
            rows.push_back(r);
        }
    return rows;
}

ICReport ic_check(const ProfileCurve& profile, const Measure1D& nu, double tol, int t_samples) {
    if (!nu.absolutely_continuous())
        throw ContractError("ic_check: nu must be absolutely continuous");
    const double v_eps = 1e-4;
    const double vlo = std::max(profile.v_min(), v_eps);
    const double vhi = std::min(profile.v_max(), 1.0 - v_eps);
    if (!(vlo < vhi))
        throw CoverageError("ic_check: profile mass range does not meet the support of nu");
    ICReport rep;
    rep.tol = tol;
    rep.min_margin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < t_samples; ++k) {
        const double v = vlo + (vhi - vlo) * (k + 0.5) / t_samples;
        const double t = nu.quantile(v);
        const double margin = profile.eval(nu.cdf(t)) - nu.density(t);
        if (margin < rep.min_margin) {
            rep.min_margin = margin;
            rep.argmin_t = t;
        }
    }
    rep.pass = rep.min_margin >= -tol;
    return rep;
}

namespace {

// mass of B_r(A) as a step function of r: sorted (distance-to-A, weight)
std::vector<std::pair<double, double>> growth_profile(const FiniteMMSpace& X,
                                                      const std::vector<std::uint8_t>& in) {
    std::vector<std::pair<double, double>> g;
    g.reserve(static_cast<std::size_t>(X.size()));
    for (int x = 0; x < X.size(); ++x) {
        double d = std::numeric_limits<double>::infinity();
        if (in[static_cast<std::size_t>(x)]) {
            d = 0.0;
        } else {
            for (int a = 0; a < X.size(); ++a)
                if (in[static_cast<std::size_t>(a)]) d = std::min(d, X.dist(x, a));
        }
        g.emplace_back(d, X.weight(x));
    }
    std::sort(g.begin(), g.end());
    return g;
}

double mass_within(const std::vector<std::pair<double, double>>& g, double r) {
    double m = 0.0;
    for (const auto& [d, w] : g) {
        if (d <= r)
            m += w;
        else
            break;
    }
    return m;
}

} // namespace

ICLReport icl_check(const FiniteMMSpace& X, const Measure1D& nu,
                    const std::vector<std::pair<double, double>>& ab_grid, ICLMode mode,
                    const LipschitzFunction* sublevel_f, double tol) {
    ICLReport rep;
    rep.tol = tol >= 0.0 ? tol : 2.0 * X.max_nearest_neighbor_dist();
    const double min_gap = X.min_positive_dist();
    for (const auto& [a, b] : ab_grid) {
        if (a > b) throw ContractError("icl_check: need a <= b in every pair");
        if (b > a && b - a < min_gap) rep.resolution_warning = true;
    }

    std::vector<std::vector<std::uint8_t>> family;
    if (mode == ICLMode::Sublevel) {
        if (sublevel_f == nullptr)
            throw ContractError("icl_check: sublevel mode needs a function");
        std::vector<double> cuts = sublevel_f->values;
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        for (double c : cuts) {
            std::vector<std::uint8_t> in(static_cast<std::size_t>(X.size()), 0);
            for (int i = 0; i < X.size(); ++i)
                if (sublevel_f->values[static_cast<std::size_t>(i)] <= c)
                    in[static_cast<std::size_t>(i)] = 1;
            family.push_back(std::move(in));
        }
    } else {
        if (X.size() > 20)
            throw SizeError("icl_check: exhaustive mode limited to n <= 20");
        const std::uint32_t total = 1u << X.size();
        for (std::uint32_t A = 1; A < total; ++A) {
            std::vector<std::uint8_t> in(static_cast<std::size_t>(X.size()), 0);
            for (int i = 0; i < X.size(); ++i)
                if ((A >> i) & 1u) in[static_cast<std::size_t>(i)] = 1;
            family.push_back(std::move(in));
        }
    }

    rep.pass = true;
    for (const auto& in : family) {
        const auto growth = growth_profile(X, in);
        const double massA = mass_within(growth, 0.0);
        if (!(massA > 0.0)) continue;
        for (const auto& [a, b] : ab_grid) {
            if (nu.cdf(a) > massA + 1e-15) continue;
            const double needed = nu.cdf(b);
            const double got = mass_within(growth, b - a);
            if (needed > got + rep.tol) {
                rep.pass = false;
                rep.has_counterexample = true;
                rep.counterexample_A = subset_from_indicator(X, in);
                rep.counterexample_a = a;
                rep.counterexample_b = b;
                return rep;
            }
        }
    }
    return rep;
}

IsoDominanceReport iso_dominance_check(const FiniteMMSpace& X, const Measure1D& nu,
                                       const std::vector<LipschitzFunction>& f_family,
                                       TransportOptions opts) {
    IsoDominanceReport rep;
    rep.all_pass = true;
    for (std::size_t k = 0; k < f_family.size(); ++k) {
        const auto& f = f_family[k];
        if (f.lip > 1.0 + 1e-9) {
            // name the offending pair
            for (int i = 0; i < X.size(); ++i)
                for (int j = i + 1; j < X.size(); ++j) {
                    const double s = std::abs(f.values[static_cast<std::size_t>(i)] -
                                              f.values[static_cast<std::size_t>(j)]) /
                                     X.dist(i, j);
                    if (s > 1.0 + 1e-9) {
                        std::ostringstream os;
                        os << "iso_dominance_check: family member " << k
                           << " is not 1-Lipschitz at pair (" << i << ", " << j
                           << "): slope " << s;
                        throw ContractError(os.str());
                    }
                }
        }
        const Measure1D dist_f = pushforward_function(X, f);
        const DominationReport r = build_monotone_transport(nu, dist_f, opts);
        rep.entries.push_back({static_cast<int>(k), r.verdict, r.max_slope, r.roundtrip_levy});
        if (r.verdict != DominationReport::Verdict::DominatesMonotone) rep.all_pass = false;
    }
    return rep;
}

} // namespace mmr
