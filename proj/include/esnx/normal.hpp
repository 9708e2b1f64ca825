#pragma once

namespace esnx {

inline constexpr double sqrt_2pi = 2.5066282746310005024;
inline constexpr double log_sqrt_2pi = 0.91893853320467274178;
inline constexpr double inv_sqrt_2pi = 0.39894228040143267794;

double std_normal_pdf(double x);
double log_std_normal_pdf(double x);

// Phi(x) with absolute error <= 1e-15; total on the extended reals.
double std_normal_cdf(double x);

// log Phi(x), stable for arbitrarily negative x (Mills-ratio expansion below -37).
double log_std_normal_cdf(double x);

// phi(x)/Phi(x); stable for arbitrarily negative x.
double std_normal_hazard_lower(double x);

// Inverse of Phi on (0,1); |Phi(result) - p| <= 1e-14.  Throws domain_error.
double std_normal_quantile(double p);

}  // namespace esnx
