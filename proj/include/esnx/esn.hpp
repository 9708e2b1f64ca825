#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "esnx/mvn.hpp"

namespace esnx {

struct UniEsnParams {
    double slant = 0.0;
    double extension = 0.0;
};

// Correlation-form extended skew-normal parameters (location 0, unit scales) with the
// hidden-truncation derivations cached: X =d (Z | W > -latent_thresh) for a (d+1)-variate
// normal (Z, W) with Cov(Z, W) = delta.
class EsnParams {
public:
    EsnParams(CorrelationMatrix corr, Eigen::VectorXd slant, double extension);

    static EsnParams univariate(double slant, double extension);
    static EsnParams bivariate(double omega, double slant1, double slant2, double extension);

    int dim() const { return corr_.dim(); }
    const CorrelationMatrix& corr() const { return corr_; }
    const Eigen::VectorXd& slant() const { return slant_; }
    double extension() const { return extension_; }

    double quad_form() const { return quad_form_; }          // alpha' Omega alpha
    double normalizer() const { return normalizer_; }        // Phi(latent_thresh)
    double log_normalizer() const { return log_normalizer_; }
    const Eigen::VectorXd& delta() const { return delta_; }  // Omega alpha / sqrt(1+Q)
    double latent_thresh() const { return latent_thresh_; }  // tau / sqrt(1+Q)

private:
    CorrelationMatrix corr_;
    Eigen::VectorXd slant_;
    double extension_;
    double quad_form_;
    double normalizer_;
    double log_normalizer_;
    double latent_thresh_;
    Eigen::VectorXd delta_;
};

struct MarginalMap {
    EsnParams params;        // law of the kept sub-vector
    std::vector<int> kept;   // indices, ascending
};

struct ConditionalMap {
    Eigen::VectorXd location;
    Eigen::MatrixXd scale_matrix;  // positive definite covariance
    Eigen::VectorXd slant;
    double extension;
    std::vector<int> kept;  // indices of the conditioned-on-the-rest sub-vector
};

double esn_log_pdf(const Eigen::VectorXd& x, const EsnParams& params);
double esn_pdf(const Eigen::VectorXd& x, const EsnParams& params);

// P(X <= x); entries of x may be +/-inf.
CdfResult esn_cdf(const std::vector<double>& x, const EsnParams& params, double target_abs_err,
                  std::uint64_t seed);

// P(X > q) componentwise, evaluated as one orthant probability of the hidden-truncation
// Gaussian (no inclusion-exclusion); target_rel_err as in mvn_cdf.
CdfResult esn_upper_orthant(const std::vector<double>& q, const EsnParams& params,
                            double target_abs_err, std::uint64_t seed,
                            double target_rel_err = 0.0);

MarginalMap marginal_params(const EsnParams& params, const std::vector<int>& keep);
ConditionalMap conditional_params(const EsnParams& params, const std::vector<int>& given,
                                  const Eigen::VectorXd& x_given);

// density of the conditional law (general location/scale ESN)
double conditional_log_pdf(const ConditionalMap& map, const Eigen::VectorXd& y);

// exact i.i.d. sampling: inverse-CDF truncated latent + conditional Gaussian
Eigen::MatrixXd esn_sample(const EsnParams& params, long n, std::uint64_t seed);

// univariate CDF / survival via the bivariate normal fast path; abs err ~ 5e-16/K
double uni_esn_cdf(double x, const UniEsnParams& p);
double uni_esn_survival(double x, const UniEsnParams& p);
double uni_esn_log_pdf(double x, const UniEsnParams& p);

// closed-form seed for the upper (1-u)-quantile, u in (0, 0.5)
double quantile_seed(double u, const UniEsnParams& p);

// bracketed quantile: |cdf(x) - p| <= tol
double esn_quantile(double p, const UniEsnParams& params, double tol = 1e-12);

}  // namespace esnx
