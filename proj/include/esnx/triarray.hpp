#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "esnx/esn.hpp"
#include "esnx/skew_hr.hpp"

namespace esnx {

struct TriArraySpec {
    HrSkewParams hr;
    long n = 100;                       // sample size per row
    long replicates = 1000;
    std::uint64_t seed = 1;
    double max_scalar_normals = 1e9;    // simulation cost guard, overridable
};

struct NormingConstants {
    Eigen::VectorXd a;  // all equal 1/ell_n
    Eigen::VectorXd b;
    double ell_n;       // sqrt(2 ln n)
};

struct ConvergenceReport {
    Eigen::VectorXd ks_margin;  // KS distance of each normalized-max margin vs Gumbel
    double copula_sup;          // sup |empirical joint CDF - G| on the fixed grid
    long n = 0;
    long replicates = 0;
};

// Canonical row-n parameters: omega_n = 1 - lambda^2/ln n, alpha_n = alpha_circ sqrt(ln n).
// Throws invalid_lambda naming the smallest admissible n when the finite-n matrix fails.
EsnParams build_params_n(const SkewHrModel& hr, long n);

NormingConstants norming_constants(const EsnParams& params_n, long n);

double gumbel_cdf(double x);

// replicates x dim matrix of (M - b)/a; deterministic given spec.seed
Eigen::MatrixXd simulate_maxima(const TriArraySpec& spec);

ConvergenceReport convergence_report(const TriArraySpec& spec);

// KS distance of a sample against the standard Gumbel law
double ks_vs_gumbel(Eigen::VectorXd sample);

}  // namespace esnx
