#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mmr/numerics.hpp"

namespace mmr {

// Node set for grid-backed measures. Mass is always integrated by the
// trapezoid rule on these nodes.
struct GridSpec {
    std::vector<double> nodes; // strictly increasing, size >= 2

    static GridSpec uniform(double a, double b, int n);
    void validate() const;
};

// lambda cost for variance functionals: lambda(0) = 0, strictly increasing.
// The slope handle is the a.e. derivative, used by the polytope optimizer.
struct LambdaFn {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> slope;
};

LambdaFn lambda_square();          // t^2
LambdaFn lambda_abs();             // t
LambdaFn lambda_capped(double c);  // min(t, c)
LambdaFn lambda_exp_saturating();  // 1 - exp(-t)
// by CLI name: t2 | t | min1 | expsat
LambdaFn lambda_by_name(const std::string& name);

// Sampled isoperimetric-profile curve v -> I(v). HalfLine curves come from
// V' o V^{-1}; DiscreteEps curves from the eps-boundary surrogate on a
// finite space and record their eps.
struct ProfileCurve {
    enum class Convention { HalfLine, DiscreteEps };

    std::vector<std::pair<double, double>> samples; // (v, value), v strictly increasing
    Convention convention = Convention::HalfLine;
    double eps = 0.0;
    bool upper_bound_only = false; // greedy enumeration fallback

    double v_min() const;
    double v_max() const;
    double eval(double v) const; // linear interpolation; CoverageError outside [v_min, v_max]
    void write_csv(std::ostream& os) const;
};

// Borel probability measure on R. Atoms carry exact point masses; the Grid
// kind holds a trapezoid-integrated density and may carry an atom overlay
// (produced by pushforwards whose map has plateaus).
class Measure1D {
public:
    enum class Kind { Gaussian, Spherical, Uniform, Atoms, Grid };

    struct Atom {
        double x;
        double mass;
    };

    static Measure1D gaussian(double mean, double sd);
    static Measure1D spherical(double N); // density sin^{N-1}(theta)/C_N on [0, pi], N > 1
    static Measure1D uniform(double a, double b);
    static Measure1D atoms(std::vector<Atom> pts);
    static Measure1D point_mass(double x) { return atoms({{x, 1.0}}); }
    static Measure1D grid(std::vector<double> nodes, std::vector<double> density,
                          std::vector<Atom> overlay = {});
    // grid measure sampled from a density handle, normalized to mass one
    static Measure1D from_density(const std::function<double(double)>& rho, const GridSpec& g);

    Kind kind() const { return kind_; }
    const char* kind_name() const;

    double gaussian_mean() const { return p0_; }
    double gaussian_sd() const { return p1_; }
    double spherical_dim() const { return p0_; }
    double uniform_a() const { return p0_; }
    double uniform_b() const { return p1_; }
    const std::vector<double>& grid_nodes() const { return nodes_; }
    const std::vector<double>& grid_density() const { return density_; }
    const std::vector<Atom>& atom_list() const { return atoms_; } // Atoms kind or Grid overlay

    // right-continuous CDF, total on R
    double cdf(double t) const;
    // F~(s) = inf{ t : s <= F(t) } for s in (0,1]; at s = 0 returns inf supp
    // (-inf for the Gaussian). Domain error outside [0,1].
    double quantile(double s) const;
    // Lebesgue density; ContractError for purely atomic measures. The Grid
    // overlay's atoms are not part of the density.
    double density(double t) const;
    double mass_at(double x) const;   // exact atom mass at x (0 for continuous kinds)
    double tail_mass(double t) const; // nu([t, +inf))

    bool absolutely_continuous() const; // no atoms anywhere
    double support_lo() const;          // may be -inf
    double support_hi() const;          // may be +inf
    // finite working bounds: quantiles at eps / 1-eps when support is unbounded
    double effective_lo(double eps = 1e-9) const;
    double effective_hi(double eps = 1e-9) const;

    double mean() const;
    double second_moment() const;
    double total_mass() const; // recomputed; 1 within tolerance by invariant

private:
    Measure1D() = default;
    void validate() const;

    Kind kind_ = Kind::Uniform;
    double p0_ = 0.0, p1_ = 1.0;    // kind parameters
    std::vector<double> nodes_;     // Grid
    std::vector<double> density_;   // Grid
    std::vector<Atom> atoms_;       // Atoms, or Grid overlay
    std::vector<double> cum_;       // prefix masses (atoms: inclusive; grid: at nodes)
    struct SphericalTable;
    std::shared_ptr<const SphericalTable> sph_;
};

// spec-shaped free wrappers
inline double cdf_eval(const Measure1D& nu, double t) { return nu.cdf(t); }
inline double quantile_eval(const Measure1D& nu, double s) { return nu.quantile(s); }

// Quantile function object: owner measure plus the value used at s = 0.
struct QuantileFn {
    const Measure1D* owner;
    double c0;
    double operator()(double s) const { return s == 0.0 ? c0 : owner->quantile(s); }
};
QuantileFn quantile_fn(const Measure1D& nu);

// Distribution of h under nu for a monotone nondecreasing piecewise-linear h.
// Plateaus of h (and constant extensions over unbounded tails) become atoms;
// the continuous part is resampled onto a grid spanning the image with total
// mass corrected to 1 - (atom mass). ContractError if h is not monotone.
Measure1D pushforward(const Measure1D& nu, const PiecewiseLinear& h, int grid_nodes = 2049);

// double integral of lambda(|x - x'|); exact for lambda = t^2 and for atoms,
// tensor quadrature otherwise. DivergenceError if tail truncation does not
// converge.
double var_lambda(const Measure1D& nu, const LambdaFn& lambda);
// E[(x - mean)^2]; equals var_lambda(nu, t^2) / 2
double centered_second_moment(const Measure1D& nu);

// sup{ t : nu([t, inf)) >= alpha } and inf{ t : nu((-inf, t]) >= alpha }
double t_plus(const Measure1D& nu, double alpha);
double t_minus(const Measure1D& nu, double alpha);
// max(t_plus(nu; k0) - t_minus(nu; k1), 0); zero when k0 + k1 > 1
double sep_measure(const Measure1D& nu, double k0, double k1);

// v -> V'(V^{-1}(v)) sampled on an interior v-grid (convention HalfLine).
ProfileCurve half_line_profile(const Measure1D& nu, int samples = 512);

// Restricted isoperimetric profile: minimum total endpoint density over
// unions of <= k_max grid intervals of mass v (within the grid's mass
// tolerance). Upper-bounds the true profile; exact for log-concave
// measures with k_max = 1. Half-infinite intervals are in the family and
// cost nothing at their unbounded end.
double interval_profile_1d(const Measure1D& nu, double v, int k_max, int grid_points = 1025);

// Reusable search state for interval_profile_1d over many v values.
class IntervalProfiler {
public:
    IntervalProfiler(const Measure1D& nu, int grid_points, int max_k = 2);
    double value(double v, int k_max) const;
    double mass_tolerance() const { return mass_tol_; }

private:
    struct Interval {
        int i, j;    // node indices; i = -1 means a left half-line
        double mass;
        double cost;
    };
    double best_single(double v) const;
    double best_multi(double v, const std::vector<double>& table) const;

    std::vector<double> t_, rho_, cum_;
    std::vector<Interval> singles_;
    // [node p][bucket b] -> min cost of <=1 (resp. <=2) disjoint pieces lying
    // strictly left of node p with total mass in bucket b
    std::vector<double> best_left1_, best_left2_;
    int n_ = 0, buckets_ = 0, max_k_ = 2;
    double mass_tol_ = 0.0;
};

struct IsoSimpleReport {
    bool simple = false;
    double max_deviation = 0.0; // max over grid of V'(t) - I_est(V(t))
    double worst_t = 0.0;
    double worst_v = 0.0;
    double tol = 0.0;
};

// Checks I_nu(V(t)) = V'(t) on a finite t-grid, estimating I_nu by the
// interval-family search. ContractError for measures with atoms.
IsoSimpleReport is_iso_simple(const Measure1D& nu, double tol, int t_samples = 33,
                              int grid_points = 513, int k_max = 2);

// Measure whose CDF is the inverse of rho(x) = int_{1/2}^x dt/phi(t), i.e.
// density phi o V. ConstructionError if 1/phi is not integrable on the grid.
Measure1D construct_from_phi(const std::function<double(double)>& phi, const GridSpec& grid);

// Levy metric between two measures, via bisection on the epsilon-corridor
// condition over a merged evaluation set.
double levy_distance(const Measure1D& a, const Measure1D& b);
// sup_t |F_a(t) - F_b(t)| over the same evaluation set (upper bound on Levy)
double kolmogorov_distance(const Measure1D& a, const Measure1D& b);

// F~ sampled as a piecewise-linear map on [0,1] (plateaus of atomic targets
// resolved at their exact cumulative masses).
PiecewiseLinear quantile_map(const Measure1D& nu, int samples = 2048);
// V sampled as a piecewise-linear map (continuous-CDF measures only).
PiecewiseLinear cdf_map(const Measure1D& nu, int samples = 2048);

} // namespace mmr
