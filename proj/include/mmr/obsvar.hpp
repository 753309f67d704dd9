#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mmr/measure1d.hpp"
#include "mmr/mmspace.hpp"

namespace mmr {

struct ObsVarResult {
    double value = 0.0;
    LipschitzFunction maximizer;
    enum class Method { Bruteforce, VertexHeuristic } method = Method::VertexHeuristic;
    int restarts = 0;
    // Bruteforce only: bound on how far the grid optimum can sit below the
    // true polytope optimum.
    std::optional<double> certificate;
};

// lambda-variance of a value vector on the space (the double sum).
double lambda_variance(const FiniteMMSpace& X, const std::vector<double>& values,
                       const LambdaFn& lambda);

// Exhaustive delta-grid search over the Lipschitz polytope
// { |f_i - f_j| <= d_ij, f_0 = 0 }. SizeError for n > 5.
ObsVarResult obsvar_bruteforce(const FiniteMMSpace& X, const LambdaFn& lambda, double delta);

// Multistart projected-gradient ascent. Starts from signed distance
// functions of farthest-point anchors (then seeded random points), projects
// onto the polytope by cyclic pairwise clamping, and keeps the best value.
// Deterministic for a fixed seed; restarts run in parallel when threads > 1.
ObsVarResult obsvar_maximize(const FiniteMMSpace& X, const LambdaFn& lambda, int restarts = 8,
                             unsigned seed = 0, int threads = 1);

// Projection onto the Lipschitz polytope by repeated pairwise clamping.
// NumericalError if the sweep cap (50 n^2) is hit before the violations
// drop below tolerance.
std::vector<double> project_lipschitz(const FiniteMMSpace& X, std::vector<double> values,
                                      int max_sweeps = -1);
double max_pair_violation(const FiniteMMSpace& X, const std::vector<double>& values);

struct BoundReport {
    double obsvar = 0.0;
    double var_nu = 0.0;
    double gap = 0.0; // var_nu - obsvar
    bool pass = false;
    double tol = 0.0;
};

// Comparison obsvar(X) <= var_lambda(nu) + tol.
BoundReport verify_bound(const FiniteMMSpace& X, const Measure1D& nu, const LambdaFn& lambda,
                         double tol = 0.05, int restarts = 8, unsigned seed = 0);

struct FoliationReport {
    enum class Case { Bounded, Ray, None } foliation_case = Case::None;
    int p = -1; // argmin (ties broken to the smallest index)
    int q = -1; // argmax
    bool unique_p = false, unique_q = false;
    std::vector<double> residual_p; // |f(x) - d(p,x) - f(p)|
    std::vector<double> residual_q; // |f(x) + d(q,x) - f(q)|
    double max_residual_p = 0.0, max_residual_q = 0.0;
    // max over x of d(p,x) + d(x,q) - d(p,q); geodesic alignment when Bounded
    double max_alignment_defect = 0.0;
    double tol = 0.0;
};

// Distance-identity structure of a (near-)maximizer. Bounded needs unique
// extrema and both identities within tol; Ray needs both extrema unique with
// exactly one identity holding; anything else (including tied extrema) is
// None. Report-only: residuals are always filled in.
FoliationReport verify_foliation(const FiniteMMSpace& X, const LipschitzFunction& f, double tol);

struct SpectralReport {
    double lambda1 = 0.0;
    double obsvar = 0.0;
    double product = 0.0;
    bool pass = false;
    double tol = 0.0;
    std::string convention;
};

// First nonzero eigenvalue of the weighted graph Laplacian at scale eps
// (edge weights mu_i mu_j / d_ij^2, mu-weighted eigenproblem) against
// 1 / obsvar_{t^2}. ContractError if the eps-graph is disconnected.
SpectralReport spectral_gap_check(const FiniteMMSpace& X, double eps, double tol = 0.05,
                                  int restarts = 8, unsigned seed = 0);

// Eigenvalues of a dense symmetric matrix (cyclic Jacobi), ascending.
std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n);

} // namespace mmr
