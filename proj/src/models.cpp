#include "mmr/models.hpp"

#include <cmath>
#include <stdexcept>

#include "mmr/numerics.hpp"

namespace mmr {

namespace {

// fractional base point of the step-2 recurrences: N/2 - ceil(N/2) + 1
double base_h(double N) {
    double h = N / 2.0 - std::ceil(N / 2.0) + 1.0;
    if (h <= 0.0) h += 1.0; // guard against ceil() rounding at integers
    if (h > 1.0) h = 1.0;
    return h;
}

double quad_I(double N) {
    return adaptive_simpson([N](double t) { return std::pow(std::cos(t), N); }, 0.0, kPi / 2.0,
                            1e-13);
}

double quad_K(double N) {
    return 0.5 * adaptive_simpson([N](double t) { return t * t * std::pow(std::cos(t), N); },
                                  0.0, kPi / 2.0, 1e-13);
}

} // namespace

double recurrence_I(double N) {
    if (!(N >= 0.0)) throw std::domain_error("recurrence_I: N must be >= 0");
    if (N <= 2.0) return quad_I(N);
    const double h = base_h(N);
    double I = quad_I(2.0 * h);
    for (double m = 2.0 * h + 2.0; m <= N + 1e-9; m += 2.0) I *= (m - 1.0) / m;
    return I;
}

double recurrence_K(double N) {
    if (!(N >= 0.0)) throw std::domain_error("recurrence_K: N must be >= 0");
    if (N <= 2.0) return quad_K(N);
    const double h = base_h(N);
    double I = quad_I(2.0 * h);
    double K = quad_K(2.0 * h);
    for (double m = 2.0 * h + 2.0; m <= N + 1e-9; m += 2.0) {
        I *= (m - 1.0) / m;
        K = -I / (m * m) + (m - 1.0) / m * K;
    }
    return K;
}

double spherical_s_sum(double N) {
    if (!(N >= 0.0)) throw std::domain_error("spherical_s_sum: N must be >= 0");
    const long long terms = static_cast<long long>(std::ceil(N / 2.0));
    double s = 0.0;
    for (long long i = terms - 1; i >= 0; --i) {
        const double d = N - 2.0 * static_cast<double>(i);
        s += 1.0 / (d * d);
    }
    return s;
}

double hurwitz_zeta2_tail(double h, long long m) {
    if (!(h > 0.0)) throw std::domain_error("hurwitz_zeta2: h must be > 0");
    const long long M = 20000;
    double s = 0.0;
    for (long long k = m + M - 1; k >= m; --k) { // smallest terms first
        const double d = h + static_cast<double>(k);
        s += 1.0 / (d * d);
    }
    const double a = h + static_cast<double>(m + M);
    return s + 1.0 / a + 0.5 / (a * a); // integral tail plus half-term correction
}

double hurwitz_zeta2(double h) {
    if (!(h > 0.0 && h <= 1.0)) throw std::domain_error("hurwitz_zeta2: h must lie in (0, 1]");
    return hurwitz_zeta2_tail(h, 0);
}

double spherical_variance_closed_form(double N) {
    if (!(N > 1.0)) throw std::domain_error("spherical_variance_closed_form: N must be > 1");
    const double half = (N - 1.0) / 2.0;
    const long long m = static_cast<long long>(std::ceil(half - 1e-12));
    const double h = half - static_cast<double>(m) + 1.0;
    return 0.5 * hurwitz_zeta2_tail(h, m);
}

SphericalRecurrenceState spherical_recurrence_state(double N) {
    SphericalRecurrenceState st;
    st.N = N;
    st.I = recurrence_I(N);
    st.K = recurrence_K(N);
    st.S = spherical_s_sum(N);
    st.h = base_h(N);
    return st;
}

std::vector<AsymptoticRow> spherical_asymptotic_check(const std::vector<double>& Ns) {
    std::vector<AsymptoticRow> rows;
    rows.reserve(Ns.size());
    for (double N : Ns) {
        AsymptoticRow r;
        r.N = N;
        r.value = spherical_variance_closed_form(N);
        r.n_times_value = N * r.value;
        r.deviation = std::abs(r.n_times_value - 1.0);
        r.sqrtn_ratio = r.value / std::sqrt(N);
        rows.push_back(r);
    }
    return rows;
}

} // namespace mmr
