#include "mmr/measure1d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <set>

#include "mmr/errors.hpp"

namespace mmr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = 1.41421356237309504880168872420969808;
constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438187;

double trapz(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        s += 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
    return s;
}

} // namespace

// ---------------------------------------------------------------- GridSpec

GridSpec GridSpec::uniform(double a, double b, int n) {
    if (!(b > a) || n < 2) throw ContractError("grid: need b > a and at least 2 nodes");
    GridSpec g;
    g.nodes.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        g.nodes[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    g.nodes.back() = b;
    return g;
}

void GridSpec::validate() const {
    if (nodes.size() < 2) throw ContractError("grid: need at least 2 nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!std::isfinite(nodes[i])) throw ContractError("grid: nodes must be finite");
        if (i > 0 && !(nodes[i] > nodes[i - 1]))
            throw ContractError("grid: nodes must be strictly increasing");
    }
}

// ---------------------------------------------------------------- LambdaFn

LambdaFn lambda_square() {
    return {"t2", [](double t) { return t * t; }, [](double t) { return 2.0 * t; }};
}

LambdaFn lambda_abs() {
    return {"t", [](double t) { return t; }, [](double) { return 1.0; }};
}

LambdaFn lambda_capped(double c) {
    return {"min1", [c](double t) { return std::min(t, c); },
            [c](double t) { return t < c ? 1.0 : 0.0; }};
}

LambdaFn lambda_exp_saturating() {
    return {"expsat", [](double t) { return 1.0 - std::exp(-t); },
            [](double t) { return std::exp(-t); }};
}

LambdaFn lambda_by_name(const std::string& name) {
    if (name == "t2") return lambda_square();
    if (name == "t") return lambda_abs();
    if (name == "min1") return lambda_capped(1.0);
    if (name == "expsat") return lambda_exp_saturating();
    throw SchemaError("unknown lambda name '" + name + "' (expected t2, t, min1 or expsat)");
}

// ------------------------------------------------------------ ProfileCurve

double ProfileCurve::v_min() const {
    if (samples.empty()) throw CoverageError("profile curve is empty");
    return samples.front().first;
}

double ProfileCurve::v_max() const {
    if (samples.empty()) throw CoverageError("profile curve is empty");
    return samples.back().first;
}

double ProfileCurve::eval(double v) const {
    if (samples.empty()) throw CoverageError("profile curve is empty");
    if (v < v_min() - 1e-12 || v > v_max() + 1e-12)
        throw CoverageError("profile curve does not cover v = " + std::to_string(v));
    v = std::clamp(v, v_min(), v_max());
    auto it = std::lower_bound(samples.begin(), samples.end(), v,
                               [](const std::pair<double, double>& s, double x) {
                                   return s.first < x;
                               });
    if (it == samples.begin()) return it->second;
    if (it == samples.end()) return samples.back().second;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double t = (v - lo.first) / (hi.first - lo.first);
    return lo.second + t * (hi.second - lo.second);
}

void ProfileCurve::write_csv(std::ostream& os) const {
    os << "v,value\n";
    char buf[80];
    for (const auto& [v, val] : samples) {
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g\n", v, val);
        os << buf;
    }
}

// ------------------------------------------------------- spherical backing

// Prefix integrals of sin^{N-1} on [0, pi], one Boole panel per cell.
// Normalized by the final prefix so cdf(pi) == 1 exactly.
struct Measure1D::SphericalTable {
    double N = 2.0;
    int cells = 8192;
    std::vector<double> prefix; // size cells + 1
    double C = 0.0;             // prefix.back()

    double node(int k) const { return kPi * k / cells; }

    double raw_density(double t) const {
        if (t <= 0.0 || t >= kPi) return 0.0;
        return std::pow(std::sin(t), N - 1.0);
    }

    static double boole(const std::function<double(double)>& f, double a, double b) {
        const double h = (b - a) / 4.0;
        return (b - a) / 90.0 *
               (7.0 * f(a) + 32.0 * f(a + h) + 12.0 * f(a + 2 * h) + 32.0 * f(a + 3 * h) +
                7.0 * f(b));
    }

    explicit SphericalTable(double dim) : N(dim) {
        prefix.resize(static_cast<std::size_t>(cells) + 1);
        prefix[0] = 0.0;
        auto f = [this](double t) { return raw_density(t); };
        for (int k = 0; k < cells; ++k)
            prefix[static_cast<std::size_t>(k) + 1] =
                prefix[static_cast<std::size_t>(k)] + boole(f, node(k), node(k + 1));
        C = prefix.back();
    }

    double cdf(double t) const {
        if (t <= 0.0) return 0.0;
        if (t >= kPi) return 1.0;
        int k = static_cast<int>(t / kPi * cells);
        k = std::clamp(k, 0, cells - 1);
        auto f = [this](double x) { return raw_density(x); };
        const double part = boole(f, node(k), t);
        return std::min(1.0, (prefix[static_cast<std::size_t>(k)] + part) / C);
    }
};

// ---------------------------------------------------------- Measure1D base

const char* Measure1D::kind_name() const {
    switch (kind_) {
        case Kind::Gaussian: return "gaussian";
        case Kind::Spherical: return "spherical";
        case Kind::Uniform: return "uniform";
        case Kind::Atoms: return "atoms";
        case Kind::Grid: return "grid";
    }
    return "?";
}

Measure1D Measure1D::gaussian(double mean, double sd) {
    Measure1D m;
    m.kind_ = Kind::Gaussian;
    m.p0_ = mean;
    m.p1_ = sd;
    m.validate();
    return m;
}

Measure1D Measure1D::spherical(double N) {
    Measure1D m;
    m.kind_ = Kind::Spherical;
    m.p0_ = N;
    m.validate();
    m.sph_ = std::make_shared<const SphericalTable>(N);
    return m;
}

Measure1D Measure1D::uniform(double a, double b) {
    Measure1D m;
    m.kind_ = Kind::Uniform;
    m.p0_ = a;
    m.p1_ = b;
    m.validate();
    return m;
}

Measure1D Measure1D::atoms(std::vector<Atom> pts) {
    Measure1D m;
    m.kind_ = Kind::Atoms;
    std::sort(pts.begin(), pts.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
    // merge exact duplicates
    std::vector<Atom> merged;
    for (const Atom& a : pts) {
        if (!merged.empty() && merged.back().x == a.x)
            merged.back().mass += a.mass;
        else
            merged.push_back(a);
    }
    m.atoms_ = std::move(merged);
    m.cum_.resize(m.atoms_.size());
    double c = 0.0;
    for (std::size_t i = 0; i < m.atoms_.size(); ++i) {
        c += m.atoms_[i].mass;
        m.cum_[i] = c;
    }
    m.validate();
    return m;
}

Measure1D Measure1D::grid(std::vector<double> nodes, std::vector<double> density,
                          std::vector<Atom> overlay) {
    Measure1D m;
    m.kind_ = Kind::Grid;
    m.nodes_ = std::move(nodes);
    m.density_ = std::move(density);
    std::sort(overlay.begin(), overlay.end(),
              [](const Atom& a, const Atom& b) { return a.x < b.x; });
    m.atoms_ = std::move(overlay);
    m.cum_.resize(m.nodes_.size());
    m.cum_[0] = 0.0;
    for (std::size_t i = 0; i + 1 < m.nodes_.size(); ++i)
        m.cum_[i + 1] = m.cum_[i] + 0.5 * (m.nodes_[i + 1] - m.nodes_[i]) *
                                        (m.density_[i] + m.density_[i + 1]);
    m.validate();
    return m;
}

Measure1D Measure1D::from_density(const std::function<double(double)>& rho, const GridSpec& g) {
    g.validate();
    std::vector<double> d(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        d[i] = rho(g.nodes[i]);
        if (!(d[i] >= 0.0) || !std::isfinite(d[i]))
            throw ContractError("from_density: density must be finite and nonnegative");
    }
    const double total = trapz(g.nodes, d);
    if (!(total > 0.0)) throw ContractError("from_density: zero total mass");
    for (double& v : d) v /= total;
    return grid(g.nodes, std::move(d));
}

void Measure1D::validate() const {
    switch (kind_) {
        case Kind::Gaussian:
            if (!(p1_ > 0.0) || !std::isfinite(p0_) || !std::isfinite(p1_))
                throw ContractError("gaussian: sd must be positive and parameters finite");
            break;
        case Kind::Spherical:
            if (!(p0_ > 1.0) || !std::isfinite(p0_))
                throw ContractError("spherical: N must be a finite real > 1");
            break;
        case Kind::Uniform:
            if (!(p1_ > p0_) || !std::isfinite(p0_) || !std::isfinite(p1_))
                throw ContractError("uniform: need finite a < b");
            break;
        case Kind::Atoms: {
            if (atoms_.empty()) throw ContractError("atoms: need at least one atom");
            double s = 0.0;
            for (const Atom& a : atoms_) {
                if (!(a.mass > 0.0) || !std::isfinite(a.x))
                    throw ContractError("atoms: masses must be positive, locations finite");
                s += a.mass;
            }
            if (std::abs(s - 1.0) > 1e-12)
                throw ContractError("atoms: total mass differs from 1 by more than 1e-12");
            break;
        }
        case Kind::Grid: {
            if (nodes_.size() < 2 || nodes_.size() != density_.size())
                throw ContractError("grid: need >= 2 nodes with matching density");
            for (std::size_t i = 0; i < nodes_.size(); ++i) {
                if (!std::isfinite(nodes_[i]) || !(density_[i] >= 0.0))
                    throw ContractError("grid: nodes finite, density nonnegative");
                if (i > 0 && !(nodes_[i] > nodes_[i - 1]))
                    throw ContractError("grid: nodes must be strictly increasing");
            }
            double s = cum_.back();
            for (const Atom& a : atoms_) {
                if (!(a.mass > 0.0)) throw ContractError("grid: overlay masses must be positive");
                s += a.mass;
            }
            if (std::abs(s - 1.0) > 1e-9)
                throw ContractError("grid: total mass differs from 1 by more than 1e-9");
            break;
        }
    }
}

double Measure1D::support_lo() const {
    switch (kind_) {
        case Kind::Gaussian: return -kInf;
        case Kind::Spherical: return 0.0;
        case Kind::Uniform: return p0_;
        case Kind::Atoms: return atoms_.front().x;
        case Kind::Grid:
            return atoms_.empty() ? nodes_.front() : std::min(nodes_.front(), atoms_.front().x);
    }
    return 0.0;
}

double Measure1D::support_hi() const {
    switch (kind_) {
        case Kind::Gaussian: return kInf;
        case Kind::Spherical: return kPi;
        case Kind::Uniform: return p1_;
        case Kind::Atoms: return atoms_.back().x;
        case Kind::Grid:
            return atoms_.empty() ? nodes_.back() : std::max(nodes_.back(), atoms_.back().x);
    }
    return 0.0;
}

double Measure1D::effective_lo(double eps) const {
    const double lo = support_lo();
    return std::isfinite(lo) ? lo : quantile(eps);
}

double Measure1D::effective_hi(double eps) const {
    const double hi = support_hi();
    return std::isfinite(hi) ? hi : quantile(1.0 - eps);
}

bool Measure1D::absolutely_continuous() const {
    if (kind_ == Kind::Atoms) return false;
    if (kind_ == Kind::Grid && !atoms_.empty()) return false;
    return true;
}

double Measure1D::cdf(double t) const {
    if (std::isnan(t)) throw std::domain_error("cdf: t is NaN");
    switch (kind_) {
        case Kind::Gaussian: {
            if (t == kInf) return 1.0;
            if (t == -kInf) return 0.0;
            const double z = (t - p0_) / p1_;
            return 0.5 * std::erfc(-z / kSqrt2);
        }
        case Kind::Spherical: return sph_->cdf(t);
        case Kind::Uniform:
            if (t <= p0_) return 0.0;
            if (t >= p1_) return 1.0;
            return (t - p0_) / (p1_ - p0_);
        case Kind::Atoms: {
            auto it = std::upper_bound(atoms_.begin(), atoms_.end(), t,
                                       [](double x, const Atom& a) { return x < a.x; });
            if (it == atoms_.begin()) return 0.0;
            return cum_[static_cast<std::size_t>(it - atoms_.begin()) - 1];
        }
        case Kind::Grid: {
            double c = 0.0;
            if (t >= nodes_.back()) {
                c = cum_.back();
            } else if (t > nodes_.front()) {
                auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
                const std::size_t k = static_cast<std::size_t>(it - nodes_.begin()) - 1;
                const double dx = nodes_[k + 1] - nodes_[k];
                const double u = t - nodes_[k];
                const double slope = (density_[k + 1] - density_[k]) / dx;
                c = cum_[k] + density_[k] * u + 0.5 * slope * u * u;
            }
            for (const Atom& a : atoms_) {
                if (a.x <= t)
                    c += a.mass;
                else
                    break;
            }
            return std::min(c, 1.0);
        }
    }
    return 0.0;
}

double Measure1D::quantile(double s) const {
    if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("quantile: s must lie in [0, 1]");
    if (s == 0.0) return support_lo();
    if (kind_ == Kind::Atoms) {
        auto it = std::lower_bound(cum_.begin(), cum_.end(), s);
        if (it == cum_.end()) return atoms_.back().x;
        return atoms_[static_cast<std::size_t>(it - cum_.begin())].x;
    }
    if (s == 1.0 && !std::isfinite(support_hi())) return kInf;
    double lo, hi;
    switch (kind_) {
        case Kind::Gaussian:
            lo = p0_ - 45.0 * p1_;
            hi = p0_ + 45.0 * p1_;
            break;
        case Kind::Spherical:
            lo = 0.0;
            hi = kPi;
            break;
        case Kind::Uniform: return p0_ + s * (p1_ - p0_);
        default:
            lo = support_lo();
            hi = support_hi();
            break;
    }
    return bisect_first_true([this, s](double t) { return cdf(t) >= s; }, lo, hi, 1e-13);
}

double Measure1D::density(double t) const {
    switch (kind_) {
        case Kind::Gaussian: {
            const double z = (t - p0_) / p1_;
            return kInvSqrt2Pi / p1_ * std::exp(-0.5 * z * z);
        }
        case Kind::Spherical: return sph_->raw_density(t) / sph_->C;
        case Kind::Uniform: return (t >= p0_ && t <= p1_) ? 1.0 / (p1_ - p0_) : 0.0;
        case Kind::Atoms:
            throw ContractError("density: purely atomic measure has no Lebesgue density");
        case Kind::Grid: {
            if (t < nodes_.front() || t > nodes_.back()) return 0.0;
            auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
            if (it == nodes_.end()) return density_.back();
            const std::size_t k = std::max<std::size_t>(
                                      1, static_cast<std::size_t>(it - nodes_.begin())) - 1;
            const double u = (t - nodes_[k]) / (nodes_[k + 1] - nodes_[k]);
            return density_[k] + u * (density_[k + 1] - density_[k]);
        }
    }
    return 0.0;
}

double Measure1D::mass_at(double x) const {
    for (const Atom& a : atoms_)
        if (a.x == x) return a.mass;
    return 0.0;
}

double Measure1D::tail_mass(double t) const {
    // nu([t, +inf)) = 1 - F(t) + nu({t})
    return std::max(0.0, 1.0 - cdf(t) + mass_at(t));
}

double Measure1D::mean() const {
    switch (kind_) {
        case Kind::Gaussian: return p0_;
        case Kind::Spherical: return kPi / 2.0; // density symmetric about pi/2
        case Kind::Uniform: return 0.5 * (p0_ + p1_);
        case Kind::Atoms: {
            double m = 0.0;
            for (const Atom& a : atoms_) m += a.x * a.mass;
            return m;
        }
        case Kind::Grid: {
            std::vector<double> y(nodes_.size());
            for (std::size_t i = 0; i < y.size(); ++i) y[i] = nodes_[i] * density_[i];
            double m = trapz(nodes_, y);
            for (const Atom& a : atoms_) m += a.x * a.mass;
            return m;
        }
    }
    return 0.0;
}

double Measure1D::second_moment() const {
    switch (kind_) {
        case Kind::Gaussian: return p0_ * p0_ + p1_ * p1_;
        case Kind::Spherical: {
            const double mu = kPi / 2.0;
            const double N = p0_;
            auto f = [N](double t) { return std::pow(std::sin(t), N - 1.0); };
            const double den = adaptive_simpson(f, 0.0, kPi, 1e-13);
            const double num = adaptive_simpson(
                [&](double t) { return (t - mu) * (t - mu) * f(t); }, 0.0, kPi, 1e-13);
            return num / den + mu * mu; // E[x^2] = E[(x-mu)^2] + mu^2, mean is mu exactly
        }
        case Kind::Uniform: return (p0_ * p0_ + p0_ * p1_ + p1_ * p1_) / 3.0;
        case Kind::Atoms: {
            double m = 0.0;
            for (const Atom& a : atoms_) m += a.x * a.x * a.mass;
            return m;
        }
        case Kind::Grid: {
            std::vector<double> y(nodes_.size());
            for (std::size_t i = 0; i < y.size(); ++i)
                y[i] = nodes_[i] * nodes_[i] * density_[i];
            double m = trapz(nodes_, y);
            for (const Atom& a : atoms_) m += a.x * a.x * a.mass;
            return m;
        }
    }
    return 0.0;
}

double Measure1D::total_mass() const {
    switch (kind_) {
        case Kind::Gaussian:
        case Kind::Spherical:
        case Kind::Uniform: return 1.0;
        case Kind::Atoms: return cum_.back();
        case Kind::Grid: {
            double s = cum_.back();
            for (const Atom& a : atoms_) s += a.mass;
            return s;
        }
    }
    return 0.0;
}

QuantileFn quantile_fn(const Measure1D& nu) { return QuantileFn{&nu, nu.support_lo()}; }

// -------------------------------------------------------------- pushforward

namespace {

// continuous-part CDF of a measure (excludes atom overlay)
double cdf_cont(const Measure1D& nu, double t) {
    double c = nu.cdf(t);
    if (nu.kind() == Measure1D::Kind::Grid)
        for (const auto& a : nu.atom_list())
            if (a.x <= t) c -= a.mass;
    return std::max(0.0, c);
}

void merge_atoms(std::vector<Measure1D::Atom>& atoms) {
    if (atoms.empty()) return;
    std::sort(atoms.begin(), atoms.end(),
              [](const Measure1D::Atom& a, const Measure1D::Atom& b) { return a.x < b.x; });
    double scale = std::max(std::abs(atoms.front().x), std::abs(atoms.back().x)) + 1.0;
    std::vector<Measure1D::Atom> out;
    for (const auto& a : atoms) {
        if (!out.empty() && std::abs(a.x - out.back().x) <= 1e-12 * scale)
            out.back().mass += a.mass;
        else
            out.push_back(a);
    }
    atoms.swap(out);
}

} // namespace

Measure1D pushforward(const Measure1D& nu, const PiecewiseLinear& h, int grid_nodes) {
    if (h.xs.empty()) throw ContractError("pushforward: map has no breakpoints");
    if (!h.nondecreasing())
        throw ContractError("pushforward: map must be monotone nondecreasing");

    using Atom = Measure1D::Atom;

    if (nu.kind() == Measure1D::Kind::Atoms) {
        std::vector<Atom> out;
        for (const auto& a : nu.atom_list()) out.push_back({h(a.x), a.mass});
        merge_atoms(out);
        return Measure1D::atoms(std::move(out));
    }

    if (h.xs.size() == 1 ||
        (h.is_affine() && std::abs(h.slope(0)) < 1e-300)) {
        return Measure1D::point_mass(h.ys.front());
    }

    if (h.is_affine()) {
        const double a = h.slope(0);
        const double b = h.ys.front() - a * h.xs.front();
        if (nu.kind() == Measure1D::Kind::Gaussian)
            return Measure1D::gaussian(a * nu.gaussian_mean() + b, a * nu.gaussian_sd());
        if (nu.kind() == Measure1D::Kind::Uniform)
            return Measure1D::uniform(a * nu.uniform_a() + b, a * nu.uniform_b() + b);
        // spherical / grid fall through to the generic path
    }

    const double lo = nu.effective_lo(1e-9);
    const double hi = nu.effective_hi(1e-9);

    // effective breakpoints covering [lo, hi]
    std::vector<double> bx;
    bx.push_back(lo);
    for (double x : h.xs)
        if (x > lo && x < hi) bx.push_back(x);
    if (hi > bx.back()) bx.push_back(hi);
    if (bx.size() < 2) return Measure1D::point_mass(h(lo)); // constant over the support
    std::vector<double> by(bx.size());
    for (std::size_t i = 0; i < bx.size(); ++i) by[i] = h(bx[i]);

    const double yspan = std::abs(by.back() - by.front());
    const double plateau_eps = 1e-14 * (yspan + 1.0);

    struct Piece {
        double x0, x1, y0, y1, slope;
    };
    std::vector<Piece> pieces;
    std::vector<Atom> atoms;

    const double total_cont = cdf_cont(nu, kInf);
    for (std::size_t k = 0; k + 1 < bx.size(); ++k) {
        const double ml = (k == 0) ? 0.0 : cdf_cont(nu, bx[k]);
        const double mr = (k + 2 == bx.size()) ? total_cont : cdf_cont(nu, bx[k + 1]);
        const double mass = std::max(0.0, mr - ml);
        if (mass <= 0.0) continue;
        if (by[k + 1] - by[k] <= plateau_eps) {
            atoms.push_back({by[k], mass});
        } else {
            pieces.push_back({bx[k], bx[k + 1], by[k], by[k + 1],
                              (by[k + 1] - by[k]) / (bx[k + 1] - bx[k])});
        }
    }

    // overlay atoms of a grid input map pointwise
    if (nu.kind() == Measure1D::Kind::Grid)
        for (const auto& a : nu.atom_list()) atoms.push_back({h(a.x), a.mass});

    merge_atoms(atoms);

    if (pieces.empty()) {
        double s = 0.0;
        for (const auto& a : atoms) s += a.mass;
        if (std::abs(s - 1.0) > 1e-15)
            for (auto& a : atoms) a.mass /= s;
        return Measure1D::atoms(std::move(atoms));
    }

    // output nodes: piece endpoints plus a uniform fill
    double ymin = kInf, ymax = -kInf;
    std::set<double> node_set;
    for (const auto& p : pieces) {
        node_set.insert(p.y0);
        node_set.insert(p.y1);
        ymin = std::min(ymin, p.y0);
        ymax = std::max(ymax, p.y1);
    }
    for (int i = 0; i < grid_nodes; ++i)
        node_set.insert(ymin + (ymax - ymin) * i / (grid_nodes - 1));
    std::vector<double> nodes;
    const double min_gap = 1e-13 * (ymax - ymin) + 1e-300;
    for (double y : node_set)
        if (nodes.empty() || y - nodes.back() > min_gap) nodes.push_back(y);
    if (nodes.size() < 2) nodes = {ymin, ymax};

    // nodes shared by two abutting pieces take the average of the one-sided
    // densities; everything else sums (image intervals of a monotone map
    // only overlap at endpoints)
    std::vector<double> dens(nodes.size(), 0.0);
    std::vector<int> touching(nodes.size(), 0);
    for (const auto& p : pieces) {
        auto first = std::lower_bound(nodes.begin(), nodes.end(), p.y0 - min_gap);
        for (auto it = first; it != nodes.end() && *it <= p.y1 + min_gap; ++it) {
            const double y = std::clamp(*it, p.y0, p.y1);
            const double x = p.x0 + (y - p.y0) / p.slope;
            const std::size_t k = static_cast<std::size_t>(it - nodes.begin());
            dens[k] += nu.density(std::clamp(x, p.x0, p.x1)) / p.slope;
            ++touching[k];
        }
    }
    for (std::size_t k = 0; k < nodes.size(); ++k)
        if (touching[k] > 1) dens[k] /= touching[k];

    double atom_mass = 0.0;
    for (const auto& a : atoms) atom_mass += a.mass;
    const double target = 1.0 - atom_mass;
    const double got = trapz(nodes, dens);
    if (!(got > 0.0)) throw NumericalError("pushforward: degenerate continuous part");
    const double scale = target / got;
    for (double& d : dens) d *= scale;

    return Measure1D::grid(std::move(nodes), std::move(dens), std::move(atoms));
}

// ------------------------------------------------------------- var_lambda

double centered_second_moment(const Measure1D& nu) {
    switch (nu.kind()) {
        case Measure1D::Kind::Gaussian: return nu.gaussian_sd() * nu.gaussian_sd();
        case Measure1D::Kind::Uniform: {
            const double w = nu.uniform_b() - nu.uniform_a();
            return w * w / 12.0;
        }
        default: {
            const double m1 = nu.mean();
            return nu.second_moment() - m1 * m1;
        }
    }
}

namespace {

// discretize the measure into (location, mass) points for tensor quadrature
std::vector<std::pair<double, double>> mass_points(const Measure1D& nu, int n, double tail_eps) {
    std::vector<std::pair<double, double>> pts;
    if (nu.kind() == Measure1D::Kind::Atoms) {
        for (const auto& a : nu.atom_list()) pts.emplace_back(a.x, a.mass);
        return pts;
    }
    const double lo = nu.effective_lo(tail_eps);
    const double hi = nu.effective_hi(tail_eps);
    std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    double atom_mass = 0.0;
    for (const auto& a : nu.atom_list()) atom_mass += a.mass;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double cell = (hi - lo) / (n - 1);
        const double frac = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        w[static_cast<std::size_t>(i)] = nu.density(x[static_cast<std::size_t>(i)]) * cell * frac;
        s += w[static_cast<std::size_t>(i)];
    }
    if (s > 0.0)
        for (double& wi : w) wi *= (1.0 - atom_mass) / s;
    for (int i = 0; i < n; ++i)
        pts.emplace_back(x[static_cast<std::size_t>(i)], w[static_cast<std::size_t>(i)]);
    for (const auto& a : nu.atom_list()) pts.emplace_back(a.x, a.mass);
    return pts;
}

double double_integral(const std::vector<std::pair<double, double>>& pts, const LambdaFn& lambda) {
    double s = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            s += 2.0 * pts[i].second * pts[j].second *
                 lambda.value(std::abs(pts[i].first - pts[j].first));
    }
    return s; // lambda(0) = 0 kills the diagonal
}

} // namespace

double var_lambda(const Measure1D& nu, const LambdaFn& lambda) {
    if (std::abs(lambda.value(0.0)) > 1e-12)
        throw ContractError("var_lambda: lambda(0) must be 0");
    if (!(lambda.value(1.0) > 0.0) || lambda.value(2.0) < lambda.value(1.0))
        throw ContractError("var_lambda: lambda must be strictly increasing");
    if (lambda.name == "t2") return 2.0 * centered_second_moment(nu);
    if (nu.kind() == Measure1D::Kind::Atoms)
        return double_integral(mass_points(nu, 0, 0.0), lambda);
    const double v1 = double_integral(mass_points(nu, 1025, 1e-10), lambda);
    if (!std::isfinite(nu.support_lo()) || !std::isfinite(nu.support_hi())) {
        const double v2 = double_integral(mass_points(nu, 513, 1e-13), lambda);
        if (std::abs(v2 - v1) > 1e-3 * (1.0 + std::abs(v1)))
            throw DivergenceError("var_lambda: tail truncation did not converge");
    }
    return v1;
}

// ------------------------------------------------------------ t_plus/minus

double t_minus(const Measure1D& nu, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::domain_error("t_minus: alpha not in (0, 1]");
    return nu.quantile(alpha);
}

double t_plus(const Measure1D& nu, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::domain_error("t_plus: alpha not in (0, 1]");
    if (nu.kind() == Measure1D::Kind::Atoms) {
        const auto& atoms = nu.atom_list();
        double suffix = 0.0;
        for (std::size_t i = atoms.size(); i-- > 0;) {
            suffix += atoms[i].mass;
            if (suffix >= alpha) return atoms[i].x;
        }
        return atoms.front().x;
    }
    if (alpha == 1.0) return nu.support_lo();
    const double eps = std::min(alpha * 0.25, 1e-13);
    double lo = nu.effective_lo(1e-14);
    double hi = nu.effective_hi(eps);
    if (std::isfinite(nu.support_lo())) lo = nu.support_lo() - 1.0;
    return bisect_last_true([&nu, alpha](double t) { return nu.tail_mass(t) >= alpha; }, lo, hi,
                            1e-13);
}

double sep_measure(const Measure1D& nu, double k0, double k1) {
    if (!(k0 > 0.0) || !(k1 > 0.0)) throw std::domain_error("sep_measure: kappas must be > 0");
    if (k0 > 1.0 || k1 > 1.0 || k0 + k1 > 1.0) return 0.0;
    return std::max(0.0, t_plus(nu, k0) - t_minus(nu, k1));
}

// ------------------------------------------------------- half-line profile

ProfileCurve half_line_profile(const Measure1D& nu, int samples) {
    if (!nu.absolutely_continuous())
        throw ContractError("half_line_profile: measure has atoms (not absolutely continuous)");
    ProfileCurve pc;
    pc.convention = ProfileCurve::Convention::HalfLine;
    pc.samples.reserve(static_cast<std::size_t>(samples));
    for (int k = 0; k < samples; ++k) {
        const double v = static_cast<double>(k + 1) / (samples + 1);
        pc.samples.emplace_back(v, nu.density(nu.quantile(v)));
    }
    return pc;
}

// ---------------------------------------------------- interval profiler

IntervalProfiler::IntervalProfiler(const Measure1D& nu, int grid_points, int max_k) {
    if (!nu.absolutely_continuous())
        throw ContractError("interval profile: measure has atoms (not absolutely continuous)");
    const int m = std::max(grid_points, 16);
    max_k_ = std::clamp(max_k, 1, 3);
    const double lo = nu.effective_lo(1e-6);
    const double hi = nu.effective_hi(1e-6);
    // half quantile-spaced points (so every mass level is reachable) and
    // half uniform points (so cut locations exist in low-density stretches)
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(m));
    const int mq = m / 2;
    for (int k = 0; k < mq; ++k)
        pts.push_back(std::clamp(nu.quantile((k + 0.5) / mq), lo, hi));
    for (int k = 0; k < m - mq; ++k) pts.push_back(lo + (hi - lo) * k / (m - mq - 1));
    std::sort(pts.begin(), pts.end());
    const double gap_eps = 1e-12 * (hi - lo) + 1e-300;
    t_.clear();
    for (double t : pts)
        if (t_.empty() || t - t_.back() > gap_eps) t_.push_back(t);
    n_ = static_cast<int>(t_.size());
    rho_.resize(static_cast<std::size_t>(n_));
    cum_.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
        const std::size_t k = static_cast<std::size_t>(i);
        rho_[k] = nu.density(t_[k]);
        cum_[k] = nu.cdf(t_[k]);
    }
    mass_tol_ = 3.0 / m + 1e-9; // quantile spacing bounds the reachable-mass gap
    if (max_k_ < 2) return;

    // all single intervals usable as a left piece of a union
    buckets_ = 1024;
    singles_.clear();
    for (int j = 1; j < n_; ++j) {
        // left half-line (-inf, t_j]: free at the unbounded end
        singles_.push_back({-1, j, cum_[static_cast<std::size_t>(j)],
                            rho_[static_cast<std::size_t>(j)]});
    }
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j)
            singles_.push_back({i, j,
                                cum_[static_cast<std::size_t>(j)] -
                                    cum_[static_cast<std::size_t>(i)],
                                rho_[static_cast<std::size_t>(i)] +
                                    rho_[static_cast<std::size_t>(j)]});

    const double inf = std::numeric_limits<double>::infinity();
    auto prefix_min = [this, inf](const std::vector<double>& ending) {
        std::vector<double> table(static_cast<std::size_t>(n_ + 1) * buckets_, inf);
        for (int p = 1; p <= n_; ++p)
            for (int b = 0; b < buckets_; ++b)
                table[static_cast<std::size_t>(p) * buckets_ + b] =
                    std::min(table[static_cast<std::size_t>(p - 1) * buckets_ + b],
                             ending[static_cast<std::size_t>(p - 1) * buckets_ + b]);
        return table;
    };

    std::vector<double> ending1(static_cast<std::size_t>(n_) * buckets_, inf);
    for (const auto& s : singles_) {
        if (s.mass <= 0.0 || s.mass >= 1.0) continue;
        const int b = std::min(buckets_ - 1, static_cast<int>(s.mass * buckets_));
        auto& cell = ending1[static_cast<std::size_t>(s.j) * buckets_ + b];
        cell = std::min(cell, s.cost);
    }
    best_left1_ = prefix_min(ending1);

    if (max_k_ >= 3) {
        std::vector<double> ending2 = ending1; // a lone piece is also a <=2 union
        for (const auto& s : singles_) {
            if (s.i < 0 || s.mass <= 0.0 || s.mass >= 1.0) continue;
            const int b1 = std::min(buckets_ - 1, static_cast<int>(s.mass * buckets_));
            const std::size_t row = static_cast<std::size_t>(s.i) * buckets_;
            for (int b = b1; b < buckets_; ++b) {
                const double c = best_left1_[row + (b - b1)];
                if (!std::isfinite(c)) continue;
                auto& cell = ending2[static_cast<std::size_t>(s.j) * buckets_ + b];
                cell = std::min(cell, s.cost + c);
            }
        }
        best_left2_ = prefix_min(ending2);
    }
}

double IntervalProfiler::best_single(double v) const {
    double best = std::numeric_limits<double>::infinity();
    auto consider = [&](double mass, double cost) {
        if (std::abs(mass - v) <= mass_tol_) best = std::min(best, cost);
    };
    // half-lines
    for (int j = 0; j < n_; ++j) {
        consider(cum_[static_cast<std::size_t>(j)], rho_[static_cast<std::size_t>(j)]);
        consider(1.0 - cum_[static_cast<std::size_t>(j)], rho_[static_cast<std::size_t>(j)]);
    }
    // bounded intervals: binary search the right endpoint per left endpoint
    for (int i = 0; i < n_; ++i) {
        const double want = cum_[static_cast<std::size_t>(i)] + v;
        auto it = std::lower_bound(cum_.begin() + i + 1, cum_.end(), want);
        for (int d = -1; d <= 1; ++d) {
            auto jt = it + d;
            if (jt < cum_.begin() + i + 1 || jt >= cum_.end()) continue;
            const int j = static_cast<int>(jt - cum_.begin());
            consider(cum_[static_cast<std::size_t>(j)] - cum_[static_cast<std::size_t>(i)],
                     rho_[static_cast<std::size_t>(i)] + rho_[static_cast<std::size_t>(j)]);
        }
    }
    return best;
}

// min over { right piece [t_i, t_j] or [t_i, +inf) } + { <=k-1 pieces left of i }
double IntervalProfiler::best_multi(double v, const std::vector<double>& table) const {
    double best = std::numeric_limits<double>::infinity();
    auto scan_left = [&](int start, double need, double base_cost) {
        if (start <= 0 || need <= 0.0 || base_cost >= best) return;
        const int blo = std::max(0, static_cast<int>((need - mass_tol_) * buckets_) - 1);
        const int bhi = std::min(buckets_ - 1, static_cast<int>((need + mass_tol_) * buckets_) + 1);
        const std::size_t row = static_cast<std::size_t>(start) * buckets_;
        for (int b = blo; b <= bhi; ++b) {
            const double c = table[row + b];
            if (base_cost + c < best) best = base_cost + c;
        }
    };
    for (int i = 1; i < n_; ++i) {
        scan_left(i, v - (1.0 - cum_[static_cast<std::size_t>(i)]),
                  rho_[static_cast<std::size_t>(i)]);
        for (int j = i + 1; j < n_; ++j) {
            const double w = cum_[static_cast<std::size_t>(j)] - cum_[static_cast<std::size_t>(i)];
            if (w >= v + mass_tol_) break;
            scan_left(i, v - w,
                      rho_[static_cast<std::size_t>(i)] + rho_[static_cast<std::size_t>(j)]);
        }
    }
    return best;
}

double IntervalProfiler::value(double v, int k_max) const {
    if (!(v > 0.0 && v < 1.0)) throw std::domain_error("interval profile: v must lie in (0, 1)");
    if (k_max < 1 || k_max > 3)
        throw ContractError("interval profile: k_max must be 1, 2 or 3");
    if (k_max > max_k_)
        throw ContractError("interval profile: profiler was built with a smaller k");
    double best = best_single(v);
    if (k_max >= 2) best = std::min(best, best_multi(v, best_left1_));
    if (k_max >= 3) best = std::min(best, best_multi(v, best_left2_));
    if (!std::isfinite(best))
        throw ResolutionError("interval profile: no interval family of mass v on this grid");
    return best;
}

double interval_profile_1d(const Measure1D& nu, double v, int k_max, int grid_points) {
    IntervalProfiler prof(nu, grid_points, k_max);
    return prof.value(v, k_max);
}

IsoSimpleReport is_iso_simple(const Measure1D& nu, double tol, int t_samples, int grid_points,
                              int k_max) {
    IntervalProfiler prof(nu, grid_points, k_max);
    IsoSimpleReport rep;
    rep.tol = tol;
    rep.max_deviation = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < t_samples; ++k) {
        const double v = static_cast<double>(k + 1) / (t_samples + 1);
        const double t = nu.quantile(v);
        const double dev = nu.density(t) - prof.value(v, k_max);
        if (dev > rep.max_deviation) {
            rep.max_deviation = dev;
            rep.worst_t = t;
            rep.worst_v = v;
        }
    }
    rep.simple = rep.max_deviation <= tol;
    return rep;
}

// --------------------------------------------------------- construct_from_phi

Measure1D construct_from_phi(const std::function<double(double)>& phi, const GridSpec& grid) {
    grid.validate();
    const auto& x = grid.nodes;
    if (!(x.front() > 0.0) || !(x.back() < 1.0))
        throw ContractError("construct_from_phi: grid must lie inside (0, 1)");
    const std::size_t n = x.size();
    std::vector<double> inv(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double p = phi(x[i]);
        if (!(p > 0.0) || !std::isfinite(p))
            throw ConstructionError("construct_from_phi: phi must be positive on the grid");
        d[i] = p;
        inv[i] = 1.0 / p;
        if (inv[i] > 1e14)
            throw ConstructionError("construct_from_phi: 1/phi overflows on a grid cell");
    }
    // rho(x) = int_{1/2}^x dt/phi by cumulative trapezoid
    std::vector<double> pre(n);
    pre[0] = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        pre[i + 1] = pre[i] + 0.5 * (x[i + 1] - x[i]) * (inv[i] + inv[i + 1]);
    double at_half = pre.back();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (x[i] <= 0.5 && 0.5 <= x[i + 1]) {
            const double u = (0.5 - x[i]) / (x[i + 1] - x[i]);
            at_half = pre[i] + u * (pre[i + 1] - pre[i]);
            break;
        }
    }
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = pre[i] - at_half;
        if (!std::isfinite(t[i]))
            throw ConstructionError("construct_from_phi: node positions overflow");
    }
    // density phi o V; normalize the grid restriction to unit mass
    const double total = trapz(t, d);
    if (!(total > 0.0)) throw ConstructionError("construct_from_phi: zero mass");
    for (double& di : d) di /= total;
    return Measure1D::grid(std::move(t), std::move(d));
}

// ----------------------------------------------------------- levy distance

namespace {

std::vector<double> eval_points(const Measure1D& a, const Measure1D& b) {
    std::vector<double> pts;
    auto add_measure = [&pts](const Measure1D& m) {
        if (m.kind() == Measure1D::Kind::Atoms || m.kind() == Measure1D::Kind::Grid) {
            for (const auto& at : m.atom_list()) {
                pts.push_back(at.x);
                pts.push_back(at.x - 1e-11 * (std::abs(at.x) + 1.0));
            }
        }
        const int levels = 2048;
        for (int k = 1; k < levels; ++k) pts.push_back(m.quantile(static_cast<double>(k) / levels));
    };
    add_measure(a);
    add_measure(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

} // namespace

double kolmogorov_distance(const Measure1D& a, const Measure1D& b) {
    double d = 0.0;
    for (double t : eval_points(a, b)) d = std::max(d, std::abs(a.cdf(t) - b.cdf(t)));
    return d;
}

double levy_distance(const Measure1D& a, const Measure1D& b) {
    const std::vector<double> pts = eval_points(a, b);
    const double kol = kolmogorov_distance(a, b);
    auto feasible = [&](double eps) {
        for (double t : pts) {
            if (b.cdf(t) > a.cdf(t + eps) + eps + 1e-15) return false;
            if (a.cdf(t) > b.cdf(t + eps) + eps + 1e-15) return false;
        }
        return true;
    };
    if (feasible(0.0)) return 0.0;
    double lo = 0.0, hi = kol + 1e-12;
    for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

// -------------------------------------------------------------- PL samplers

PiecewiseLinear quantile_map(const Measure1D& nu, int samples) {
    std::vector<double> us;
    us.reserve(static_cast<std::size_t>(samples) + 8);
    for (int k = 1; k <= samples; ++k)
        us.push_back(static_cast<double>(k) / (samples + 1));
    if (nu.kind() == Measure1D::Kind::Atoms) {
        double c = 0.0;
        for (const auto& a : nu.atom_list()) {
            c += a.mass;
            us.push_back(std::min(c, 1.0));
        }
    }
    std::sort(us.begin(), us.end());
    us.erase(std::unique(us.begin(), us.end(),
                         [](double a, double b) { return b - a < 1e-15; }),
             us.end());
    PiecewiseLinear h;
    for (double u : us) {
        const double q = nu.quantile(u);
        if (!std::isfinite(q)) continue;
        if (!h.xs.empty() && u - h.xs.back() < 1e-15) continue;
        h.xs.push_back(u);
        h.ys.push_back(q);
    }
    if (h.xs.size() < 2) throw NumericalError("quantile_map: degenerate sample set");
    return h;
}

PiecewiseLinear cdf_map(const Measure1D& nu, int samples) {
    if (nu.kind() == Measure1D::Kind::Atoms)
        throw ContractError("cdf_map: requires a continuous CDF");
    PiecewiseLinear h;
    for (int k = 1; k <= samples; ++k) {
        const double u = static_cast<double>(k) / (samples + 1);
        const double t = nu.quantile(u);
        if (!std::isfinite(t)) continue;
        if (!h.xs.empty() && t - h.xs.back() < 1e-14 * (std::abs(t) + 1.0)) continue;
        h.xs.push_back(t);
        h.ys.push_back(nu.cdf(t));
    }
    if (h.xs.size() < 2) throw NumericalError("cdf_map: degenerate sample set");
    return h;
}

} // namespace mmr
