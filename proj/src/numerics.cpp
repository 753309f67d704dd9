#include "mmr/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmr/errors.hpp"

namespace mmr {

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double S, double tol, int depth, int min_depth,
                   int max_depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double Sl = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double Sr = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double S2 = Sl + Sr;
    if (depth >= max_depth) return S2;
    if (depth >= min_depth && std::abs(S2 - S) <= 15.0 * tol) return S2 + (S2 - S) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, Sl, 0.5 * tol, depth + 1, min_depth, max_depth) +
           simpson_rec(f, m, b, fm, frm, fb, Sr, 0.5 * tol, depth + 1, min_depth, max_depth);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int min_depth, int max_depth) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double fb = f(b);
    const double S = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, S, tol, 0, min_depth, max_depth);
}

double bisect_first_true(const std::function<bool(double)>& pred, double lo, double hi,
                         double xtol, int max_iter) {
    // invariant: pred(hi) true, pred(lo) false (after the first probe)
    if (pred(lo)) return lo;
    for (int it = 0; it < max_iter && hi - lo > xtol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (pred(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double bisect_last_true(const std::function<bool(double)>& pred, double lo, double hi,
                        double xtol, int max_iter) {
    if (pred(hi)) return hi;
    for (int it = 0; it < max_iter && hi - lo > xtol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (pred(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

double PiecewiseLinear::operator()(double x) const {
    if (xs.empty()) throw ContractError("piecewise-linear map has no breakpoints");
    if (xs.size() == 1) return ys[0];
    if (x <= xs.front()) {
        if (extension == Extension::Affine) return ys.front() + slope(0) * (x - xs.front());
        return ys.front();
    }
    if (x >= xs.back()) {
        if (extension == Extension::Affine)
            return ys.back() + slope(segments() - 1) * (x - xs.back());
        return ys.back();
    }
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - xs.begin()) - 1;
    const double t = (x - xs[k]) / (xs[k + 1] - xs[k]);
    return ys[k] + t * (ys[k + 1] - ys[k]);
}

double PiecewiseLinear::max_slope() const {
    double s = 0.0;
    for (std::size_t k = 0; k < segments(); ++k) s = std::max(s, slope(k));
    return s;
}

bool PiecewiseLinear::nondecreasing() const {
    for (std::size_t k = 0; k + 1 < ys.size(); ++k)
        if (ys[k + 1] < ys[k]) return false;
    return true;
}

bool PiecewiseLinear::is_affine(double rel_tol) const {
    if (extension != Extension::Affine || segments() == 0) return false;
    const double s0 = slope(0);
    for (std::size_t k = 1; k < segments(); ++k)
        if (std::abs(slope(k) - s0) > rel_tol * (1.0 + std::abs(s0))) return false;
    return true;
}

PiecewiseLinear PiecewiseLinear::affine_map(double a, double b) {
    PiecewiseLinear h;
    h.xs = {0.0, 1.0};
    h.ys = {b, a + b};
    h.extension = Extension::Affine;
    return h;
}

PiecewiseLinear PiecewiseLinear::compose_after(const PiecewiseLinear& inner) const {
    // knots: inner's breakpoints plus inner-preimages of this's breakpoints
    std::vector<double> knots = inner.xs;
    for (double bx : xs) {
        // find any x with inner(x) = bx by scanning inner's segments
        for (std::size_t k = 0; k < inner.segments(); ++k) {
            const double y0 = inner.ys[k], y1 = inner.ys[k + 1];
            if (bx >= std::min(y0, y1) && bx <= std::max(y0, y1) && y1 != y0) {
                const double t = (bx - y0) / (y1 - y0);
                knots.push_back(inner.xs[k] + t * (inner.xs[k + 1] - inner.xs[k]));
            }
        }
    }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-15; }),
                knots.end());
    PiecewiseLinear out;
    out.xs = knots;
    out.ys.reserve(knots.size());
    for (double x : knots) out.ys.push_back((*this)(inner(x)));
    out.extension = (extension == Extension::Affine && inner.extension == Extension::Affine)
                        ? Extension::Affine
                        : Extension::Constant;
    return out;
}

} // namespace mmr
