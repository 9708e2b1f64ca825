#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace esnx {

// Symmetric PSD matrix with unit diagonal. Construction validates; instances are
// immutable and safe to share across threads.
class CorrelationMatrix {
public:
    explicit CorrelationMatrix(Eigen::MatrixXd entries);

    static CorrelationMatrix identity(int dim);
    static CorrelationMatrix bivariate(double omega);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Eigen::MatrixXd& entries() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }
    double min_eigenvalue() const { return min_eig_; }

    // principal submatrix
    CorrelationMatrix submatrix(const std::vector<int>& keep) const;

private:
    Eigen::MatrixXd m_;
    double min_eig_;
};

struct CdfResult {
    double value = 0.0;           // in [0,1]
    double error_estimate = 0.0;  // 3-sigma bound over random shifts
    long points_used = 0;
    bool converged = true;
};

// Density of N_d(0, corr) at x; Cholesky with a single 1e-10 jitter retry.
double mvn_pdf(const Eigen::VectorXd& x, const CorrelationMatrix& corr);
double mvn_log_pdf(const Eigen::VectorXd& x, const CorrelationMatrix& corr);

// P(X > h, Y > k) and P(X <= b1, Y <= b2) for a standard bivariate normal;
// absolute error below 5e-16 (Drezner-Wesolowsky / Genz hybrid).
double bvn_upper(double h, double k, double rho);
double bvn_cdf(double b1, double b2, double rho);

// P(Z <= upper), Z ~ N_d(0, corr). Entries of `upper` may be +/-inf: +inf integrates
// the coordinate out, any -inf gives exactly 0. Deterministic given seed.
// target_rel_err = 0 disables the relative stopping criterion.
CdfResult mvn_cdf(std::vector<double> upper, const CorrelationMatrix& corr,
                  double target_abs_err, std::uint64_t seed, double target_rel_err = 0.0,
                  long max_points_per_shift = 1L << 22);

}  // namespace esnx
