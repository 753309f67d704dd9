#pragma once

#include <vector>

namespace mmr {

// Exact and asymptotic quantities for the spherical model measure
// (density sin^{N-1} on [0, pi]) and the reductions behind them. The
// recurrences run in the cosine-power variable:
//   I_N = int_0^{pi/2} cos^N t dt,      I_N = (N-1)/N * I_{N-2}
//   K_N = 1/2 int_0^{pi/2} t^2 cos^N t dt,  K_N = -I_N/N^2 + (N-1)/N * K_{N-2}
// with bases at the fractional part h = N/2 - ceil(N/2) + 1 in (0, 1]
// seeded by adaptive quadrature.

double recurrence_I(double N);
double recurrence_K(double N);

// S_N = sum_{i=0}^{ceil(N/2)-1} 1/(N-2i)^2
double spherical_s_sum(double N);

// zeta(2, h) = sum_{k>=0} 1/(h+k)^2 by direct summation with an
// Euler-Maclaurin tail correction; absolute error below 1e-12.
double hurwitz_zeta2(double h);
// sum_{k>=m} 1/(h+k)^2 (the same series with the first m terms dropped)
double hurwitz_zeta2_tail(double h, long long m);

// Centered second moment of the spherical model in dimension parameter N:
//   1/2 (zeta(2,h) - sum_{k=0}^{ceil((N-1)/2)-1} 1/(h+k)^2),
//   h = (N-1)/2 - ceil((N-1)/2) + 1.
// Equals 2 K_{N-1} / I_{N-1}; the double-integral variance of the same
// measure is twice this value.
double spherical_variance_closed_form(double N);

struct SphericalRecurrenceState {
    double N;
    double I;
    double K;
    double S;
    double h; // N/2 - ceil(N/2) + 1, in (0, 1]
};
SphericalRecurrenceState spherical_recurrence_state(double N);

struct AsymptoticRow {
    double N;
    double value;         // spherical_variance_closed_form(N)
    double n_times_value; // N * value -> 1
    double deviation;     // |N * value - 1|
    double sqrtn_ratio;   // value / sqrt(N); printed for comparison, not verified
};
// N * value -> 1 is the verified normalization; the value/sqrt(N) column is
// emitted alongside so the two candidate normalizations can be compared.
std::vector<AsymptoticRow> spherical_asymptotic_check(const std::vector<double>& Ns);

} // namespace mmr
