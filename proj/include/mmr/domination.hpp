#pragma once

#include <optional>
#include <vector>

#include "mmr/measure1d.hpp"
#include "mmr/mmspace.hpp"

namespace mmr {

// Monotone transport candidate, stored piecewise-linearly. Certification
// (slope bound, pushforward round trip) lives in the report that carries it.
using TransportMap = PiecewiseLinear;

struct SlopeWitness {
    double s0 = 0.0, s1 = 0.0; // quantile levels of the offending increment
    double x0 = 0.0, x1 = 0.0; // source quantiles at those levels
    double slope = 0.0;
};

struct SepCheckRow {
    double k0 = 0.0, k1 = 0.0;
    double sep_target = 0.0;
    double sep_source = 0.0;
    bool pass = false;
};

struct DominationReport {
    enum class Verdict { DominatesMonotone, Fails, Undecided };
    Verdict verdict = Verdict::Undecided;
    std::optional<TransportMap> map;
    std::optional<SlopeWitness> witness;
    std::vector<SepCheckRow> sep_checks;
    double max_slope = 0.0;
    double roundtrip_levy = 0.0;
    double slope_tol = 0.0;
    double levy_tol = 0.0;
};

struct TransportOptions {
    int samples = 2048;
    // negative values mean "derive from the kinds involved": 1e-9 for
    // analytic measures, 2/samples-scaled for grid or atomic ones, with the
    // Levy tolerance widened to the atom pitch for atomic targets.
    double slope_tol = -1.0;
    double levy_tol = -1.0;
};

// Monotone transport source -> target along matched quantiles. Succeeds when
// the certified max slope stays within 1 + slope_tol and the pushforward of
// the source lands within levy_tol of the target; fails with the worst
// quantile increment as witness otherwise. ContractError for atomic sources.
DominationReport build_monotone_transport(const Measure1D& source, const Measure1D& target,
                                          TransportOptions opts = {});

// Necessary condition for source to dominate target: separation of the
// target never exceeds that of the source. Any failing pair certifies
// non-domination.
std::vector<SepCheckRow> sep_necessary_check(const Measure1D& source, const Measure1D& target,
                                             const std::vector<double>& kappas,
                                             double tol = 1e-9);

struct ICReport {
    bool pass = false;
    double min_margin = 0.0; // min over the grid of I(V(t)) - V'(t)
    double argmin_t = 0.0;
    double tol = 0.0;
};

// profile-vs-density comparison I(V(t)) >= V'(t) - tol on a t-grid over the
// support of nu restricted to the profile's mass range.
ICReport ic_check(const ProfileCurve& profile, const Measure1D& nu, double tol,
                  int t_samples = 1024);

enum class ICLMode { Exhaustive, Sublevel };

struct ICLReport {
    bool pass = false;
    bool has_counterexample = false;
    Subset counterexample_A;
    double counterexample_a = 0.0, counterexample_b = 0.0;
    double tol = 0.0;
    bool resolution_warning = false;
};

// Levy-type comparison on a finite space: for every set A of the chosen
// family and every pair a <= b from the grid, V(a) <= mu(A) must force
// V(b) <= mu(B_{b-a}(A)) + tol. Exhaustive mode enumerates all subsets
// (n <= 20); Sublevel mode uses the sublevel sets of the given function.
// tol < 0 selects the default 2 * max nearest-neighbor distance.
ICLReport icl_check(const FiniteMMSpace& X, const Measure1D& nu,
                    const std::vector<std::pair<double, double>>& ab_grid, ICLMode mode,
                    const LipschitzFunction* sublevel_f = nullptr, double tol = -1.0);

struct IsoDominanceEntry {
    int f_index = 0;
    DominationReport::Verdict verdict = DominationReport::Verdict::Undecided;
    double max_slope = 0.0;
    double roundtrip_levy = 0.0;
};

struct IsoDominanceReport {
    std::vector<IsoDominanceEntry> entries;
    bool all_pass = false;
};

// For each 1-Lipschitz f, tries the monotone transport nu -> distribution(f).
// All passing supports "nu is an iso-dominant" over the tested family.
// ContractError naming the offending pair if some f is not 1-Lipschitz.
IsoDominanceReport iso_dominance_check(const FiniteMMSpace& X, const Measure1D& nu,
                                       const std::vector<LipschitzFunction>& f_family,
                                       TransportOptions opts = {});

} // namespace mmr
