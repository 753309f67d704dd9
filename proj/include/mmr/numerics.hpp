#pragma once

#include <functional>
#include <vector>

namespace mmr {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Adaptive Simpson with Richardson acceptance. Handles endpoint cusps
// (e.g. sin^{1/2}) by recursing until the local estimate stabilizes.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int min_depth = 6, int max_depth = 52);

// Smallest x in [lo, hi] with pred(x) true, assuming pred is monotone
// (false below some threshold, true above). Requires pred(hi) true.
// Returns the true-side end of the final bracket.
double bisect_first_true(const std::function<bool(double)>& pred, double lo, double hi,
                         double xtol = 1e-12, int max_iter = 200);

// Largest x in [lo, hi] with pred(x) true, pred monotone true -> false.
// Requires pred(lo) true. Returns the true-side end of the final bracket.
double bisect_last_true(const std::function<bool(double)>& pred, double lo, double hi,
                        double xtol = 1e-12, int max_iter = 200);

// Monotone piecewise-linear map on the real line. Breakpoints xs are
// strictly increasing; ys nondecreasing for a valid monotone map.
// Outside [xs.front(), xs.back()] the map is constant unless the
// extension is Affine, in which case the end segment slopes continue.
struct PiecewiseLinear {
    enum class Extension { Constant, Affine };

    std::vector<double> xs;
    std::vector<double> ys;
    Extension extension = Extension::Constant;

    double operator()(double x) const;
    std::size_t segments() const { return xs.size() < 2 ? 0 : xs.size() - 1; }
    double slope(std::size_t seg) const { return (ys[seg + 1] - ys[seg]) / (xs[seg + 1] - xs[seg]); }
    double max_slope() const;
    bool nondecreasing() const;
    // Single effective slope everywhere (all segments equal, affine extension).
    bool is_affine(double rel_tol = 1e-12) const;

    // y = a*x + b as a two-breakpoint map with affine extension.
    static PiecewiseLinear affine_map(double a, double b);

    // this(inner(x)); breakpoints are inner's plus preimages of this's.
    PiecewiseLinear compose_after(const PiecewiseLinear& inner) const;
};

} // namespace mmr
