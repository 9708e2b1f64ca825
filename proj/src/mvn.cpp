#include "esnx/mvn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "esnx/errors.hpp"
#include "esnx/normal.hpp"
#include "esnx/parallel.hpp"
#include "esnx/rng.hpp"

namespace esnx {

namespace {
constexpr double psd_tol = 1e-10;
constexpr double inf = std::numeric_limits<double>::infinity();
}  // namespace

CorrelationMatrix::CorrelationMatrix(Eigen::MatrixXd entries) : m_(std::move(entries)) {
    const auto n = m_.rows();
    if (n < 1 || m_.cols() != n) throw domain_error("correlation matrix must be square");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(std::fabs(m_(i, i) - 1.0) <= 1e-12))
            throw domain_error("correlation matrix must have unit diagonal");
        m_(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (!(std::fabs(m_(i, j) - m_(j, i)) <= 1e-12))
                throw domain_error("correlation matrix must be symmetric");
            double v = 0.5 * (m_(i, j) + m_(j, i));
            if (!(std::fabs(v) <= 1.0 + 1e-12))
                throw domain_error("correlation entries must lie in [-1,1]");
            v = std::clamp(v, -1.0, 1.0);
            m_(i, j) = m_(j, i) = v;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m_, Eigen::EigenvaluesOnly);
    min_eig_ = es.eigenvalues().minCoeff();
    if (min_eig_ < -psd_tol) throw singular_matrix("correlation matrix is not positive semi-definite");
}

CorrelationMatrix CorrelationMatrix::identity(int dim) {
    return CorrelationMatrix(Eigen::MatrixXd::Identity(dim, dim));
}

CorrelationMatrix CorrelationMatrix::bivariate(double omega) {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, omega, omega, 1.0;
    return CorrelationMatrix(m);
}

CorrelationMatrix CorrelationMatrix::submatrix(const std::vector<int>& keep) const {
    const int k = static_cast<int>(keep.size());
    Eigen::MatrixXd s(k, k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) s(a, b) = m_(keep[a], keep[b]);
    return CorrelationMatrix(std::move(s));
}

double mvn_log_pdf(const Eigen::VectorXd& x, const CorrelationMatrix& corr) {
    const int d = corr.dim();
    if (x.size() != d) throw domain_error("mvn_pdf: dimension mismatch");
    Eigen::LLT<Eigen::MatrixXd> llt(corr.entries());
    if (llt.info() != Eigen::Success) {
        Eigen::MatrixXd jittered = corr.entries();
        jittered.diagonal().array() += psd_tol;
        llt.compute(jittered);
        if (llt.info() != Eigen::Success)
            throw singular_matrix("mvn_pdf: Cholesky failed beyond jitter tolerance");
    }
    const Eigen::VectorXd y = llt.matrixL().solve(x);
    double log_det = 0.0;
    for (int i = 0; i < d; ++i) log_det += std::log(llt.matrixL()(i, i));
    return -0.5 * y.squaredNorm() - log_det - 0.5 * d * std::log(2.0 * M_PI);
}

double mvn_pdf(const Eigen::VectorXd& x, const CorrelationMatrix& corr) {
    return std::exp(mvn_log_pdf(x, corr));
}

// ---------------------------------------------------------------------------
// bivariate CDF, Drezner-Wesolowsky with Genz's |rho| > 0.925 treatment

namespace {

const double gl_w[3][10] = {
    {0.1713244923791705, 0.3607615730481384, 0.4679139345726904, 0, 0, 0, 0, 0, 0, 0},
    {0.04717533638651177, 0.1069393259953183, 0.1600783285433464, 0.2031674267230659,
     0.2334925365383547, 0.2491470458134029, 0, 0, 0, 0},
    {0.01761400713915212, 0.04060142980038694, 0.06267204833410906, 0.08327674157670475,
     0.1019301198172404, 0.1181945319615184, 0.1316886384491766, 0.1420961093183821,
     0.1491729864726037, 0.1527533871307259}};
const double gl_x[3][10] = {
    {0.9324695142031522, 0.6612093864662647, 0.2386191860831970, 0, 0, 0, 0, 0, 0, 0},
    {0.9815606342467191, 0.9041172563704750, 0.7699026741943050, 0.5873179542866171,
     0.3678314989981802, 0.1252334085114692, 0, 0, 0, 0},
    {0.9931285991850949, 0.9639719272779138, 0.9122344282513259, 0.8391169718222188,
     0.7463319064601508, 0.6360536807265150, 0.5108670019508271, 0.3737060887154196,
     0.2277858511416451, 0.07652652113349733}};

}  // namespace

double bvn_upper(double dh, double dk, double r) {
    if (std::isnan(dh) || std::isnan(dk)) return std::numeric_limits<double>::quiet_NaN();
    if (dh == inf || dk == inf) return 0.0;
    if (dh == -inf) return std_normal_cdf(-dk);
    if (dk == -inf) return std_normal_cdf(-dh);

    int ng, lg;
    const double ar = std::fabs(r);
    if (ar < 0.3) {
        ng = 0;
        lg = 3;
    } else if (ar < 0.75) {
        ng = 1;
        lg = 6;
    } else {
        ng = 2;
        lg = 10;
    }
    double h = dh, k = dk;
    double hk = h * k;
    double bvn = 0.0;
    if (ar < 0.925) {
        if (ar > 0.0) {
            const double hs = 0.5 * (h * h + k * k);
            const double asr = std::asin(r);
            for (int i = 0; i < lg; ++i) {
                for (int is = -1; is <= 1; is += 2) {
                    const double sn = std::sin(asr * (is * gl_x[ng][i] + 1.0) * 0.5);
                    bvn += gl_w[ng][i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
                }
            }
            bvn *= asr / (4.0 * M_PI);
        }
        bvn += std_normal_cdf(-h) * std_normal_cdf(-k);
    } else {
        if (r < 0.0) {
            k = -k;
            hk = -hk;
        }
        if (ar < 1.0) {
            const double as = (1.0 - r) * (1.0 + r);
            double a = std::sqrt(as);
            const double bs = (h - k) * (h - k);
            const double c = (4.0 - hk) / 8.0;
            const double d = (12.0 - hk) / 16.0;
            double asr = -0.5 * (bs / as + hk);
            if (asr > -100.0)
                bvn = a * std::exp(asr) *
                      (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
            if (-hk < 100.0) {
                const double b = std::sqrt(bs);
                bvn -= std::exp(-0.5 * hk) * sqrt_2pi * std_normal_cdf(-b / a) * b *
                       (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
            }
            a *= 0.5;
            for (int i = 0; i < lg; ++i) {
                for (int is = -1; is <= 1; is += 2) {
                    const double x = a * (is * gl_x[ng][i] + 1.0);
                    const double xs = x * x;
                    const double rs = std::sqrt(1.0 - xs);
                    asr = -0.5 * (bs / xs + hk);
                    if (asr > -100.0) {
                        bvn += a * gl_w[ng][i] * std::exp(asr) *
                               (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                                (1.0 + c * xs * (1.0 + d * xs)));
                    }
                }
            }
            bvn = -bvn / (2.0 * M_PI);
        }
        if (r > 0.0) {
            bvn += std_normal_cdf(-std::max(h, k));
        } else {
            bvn = -bvn;
            if (k > h) bvn += std_normal_cdf(k) - std_normal_cdf(h);
        }
    }
    return std::clamp(bvn, 0.0, 1.0);
}

double bvn_cdf(double b1, double b2, double rho) { return bvn_upper(-b1, -b2, rho); }

// ---------------------------------------------------------------------------
// general CDF: Cholesky with truncation-ordering, then randomized rank-1 lattice

namespace {

constexpr int n_shifts = 12;
constexpr int primes[64] = {2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,
                            43,  47,  53,  59,  61,  67,  71,  73,  79,  83,  89,  97,  101,
                            103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167,
                            173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229, 233, 239,
                            241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311};

struct GenzFactorization {
    Eigen::MatrixXd chol;       // lower triangular, possibly with zero pivots (singular dirs)
    std::vector<double> upper;  // reordered limits
    double e0 = 1.0;            // Phi of the first factor (deterministic)
};

double conditional_phi(double num, double sd) {
    if (sd > 0.0) return std_normal_cdf(num / sd);
    return num >= 0.0 ? 1.0 : 0.0;
}

// Greedy smallest-conditional-probability-first ordering fused with the Cholesky
// factorization (Genz-Bretz). Truncated expectations steer the ordering; exact-zero
// pivots (singular but PSD matrices) are kept and handled pathwise in the integrand.
GenzFactorization factorize_ordered(Eigen::MatrixXd c, std::vector<double> b) {
    const int d = static_cast<int>(b.size());
    GenzFactorization out;
    out.chol = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd& L = out.chol;
    std::vector<double> y(d, 0.0);

    for (int i = 0; i < d; ++i) {
        int best = -1;
        double best_p = 2.0;
        for (int j = i; j < d; ++j) {
            double s2 = c(j, j);
            double m = 0.0;
            for (int k = 0; k < i; ++k) {
                s2 -= L(j, k) * L(j, k);
                m += L(j, k) * y[k];
            }
            const double p = conditional_phi(b[j] - m, std::sqrt(std::max(s2, 0.0)));
            if (p < best_p) {
                best_p = p;
                best = j;
            }
        }
        if (best != i) {
            c.row(best).swap(c.row(i));
            c.col(best).swap(c.col(i));
            L.row(best).swap(L.row(i));
            std::swap(b[best], b[i]);
        }
        double s2 = c(i, i);
        double m = 0.0;
        for (int k = 0; k < i; ++k) {
            s2 -= L(i, k) * L(i, k);
            m += L(i, k) * y[k];
        }
        if (s2 < -1e-8) throw singular_matrix("mvn_cdf: Cholesky pivot went negative");
        const double s = std::sqrt(std::max(s2, 0.0));
        L(i, i) = s;
        const double a =
            s > 0.0 ? (b[i] - m) / s : ((b[i] - m) >= 0.0 ? inf : -inf);
        if (i == 0) out.e0 = std_normal_cdf(a);
        y[i] = -std_normal_hazard_lower(std::clamp(a, -15.0, 15.0));
        for (int j = i + 1; j < d; ++j) {
            double dot = c(j, i);
            for (int k = 0; k < i; ++k) dot -= L(j, k) * L(i, k);
            L(j, i) = s > 0.0 ? dot / s : 0.0;
        }
    }
    out.upper = std::move(b);
    return out;
}

GenzFactorization factorize_with_retry(const Eigen::MatrixXd& c, const std::vector<double>& b) {
    try {
        return factorize_ordered(c, b);
    } catch (const singular_matrix&) {
        // one diagonal jitter retry, then give up
        Eigen::MatrixXd j = c;
        j.diagonal().array() += psd_tol;
        try {
            return factorize_ordered(std::move(j), b);
        } catch (const singular_matrix&) {
            throw singular_matrix("mvn_cdf: Cholesky failed beyond jitter tolerance");
        }
    }
}

// Sequential conditioned integrand over the unit cube, log-free product form.
double genz_integrand(const GenzFactorization& f, const double* u, double* y_buf) {
    const int d = static_cast<int>(f.upper.size());
    double prod = f.e0;
    double e_prev = f.e0;
    for (int i = 1; i < d; ++i) {
        const double p = std::clamp(u[i - 1] * e_prev, 1e-300, 1.0 - 1e-16);
        y_buf[i - 1] = std_normal_quantile(p);
        double m = 0.0;
        for (int k = 0; k < i; ++k) m += f.chol(i, k) * y_buf[k];
        const double s = f.chol(i, i);
        double a;
        if (s > 0.0)
            a = (f.upper[i] - m) / s;
        else
            a = (f.upper[i] - m) >= 0.0 ? inf : -inf;
        e_prev = std_normal_cdf(a);
        prod *= e_prev;
        if (prod == 0.0) return 0.0;
    }
    return prod;
}

}  // namespace

CdfResult mvn_cdf(std::vector<double> upper, const CorrelationMatrix& corr, double target_abs_err,
                  std::uint64_t seed, double target_rel_err, long max_points_per_shift) {
    const int d = corr.dim();
    if (static_cast<int>(upper.size()) != d) throw domain_error("mvn_cdf: dimension mismatch");
    if (!(target_abs_err > 0.0)) throw domain_error("mvn_cdf: target_abs_err must be positive");

    // -inf -> exactly zero; +inf coordinates integrate out
    std::vector<int> keep;
    keep.reserve(d);
    for (int i = 0; i < d; ++i) {
        if (upper[i] == -inf) return {0.0, 0.0, 0, true};
        if (std::isnan(upper[i])) throw domain_error("mvn_cdf: NaN limit");
        if (upper[i] < inf) keep.push_back(i);
    }
    if (keep.empty()) return {1.0, 0.0, 0, true};
    if (keep.size() == 1) return {std_normal_cdf(upper[keep[0]]), 1e-16, 0, true};
    if (keep.size() == 2) {
        const double v = bvn_cdf(upper[keep[0]], upper[keep[1]], corr(keep[0], keep[1]));
        return {v, 5e-16, 25, true};
    }

    Eigen::MatrixXd c(keep.size(), keep.size());
    std::vector<double> b(keep.size());
    for (size_t a = 0; a < keep.size(); ++a) {
        b[a] = upper[keep[a]];
        for (size_t q = 0; q < keep.size(); ++q) c(a, q) = corr(keep[a], keep[q]);
    }
    const GenzFactorization f = factorize_with_retry(c, b);

    const int nd = static_cast<int>(keep.size()) - 1;  // integrand dimension
    CdfResult res;
    res.converged = false;
    for (long n = 1L << 10; n <= max_points_per_shift; n <<= 1) {
        // rank-1 generating vector: odd multiples closest to n*frac(sqrt(prime))
        std::vector<double> zdivn(nd);
        for (int j = 0; j < nd; ++j) {
            if (j >= 64) throw domain_error("mvn_cdf: dimension exceeds engine limit (50)");
            const double fr = std::sqrt(static_cast<double>(primes[j]));
            const double frac = fr - std::floor(fr);
            const long zj = (2 * static_cast<long>(std::floor(frac * n / 2.0)) + 1) % n;
            zdivn[j] = static_cast<double>(zj) / static_cast<double>(n);
        }
        const int level = static_cast<int>(std::log2(static_cast<double>(n)));
        std::vector<double> shift_mean(n_shifts, 0.0);
        parallel_for(n_shifts, [&](std::int64_t s) {
            Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(s), level);
            std::vector<double> delta(nd);
            for (int j = 0; j < nd; ++j) delta[j] = rng.uniform01();
            std::vector<double> u(nd), ybuf(nd);
            std::vector<double> lat(nd, 0.0);
            double acc = 0.0;
            for (long k = 0; k < n; ++k) {
                for (int j = 0; j < nd; ++j) {
                    double v = lat[j] + delta[j];
                    v -= std::floor(v);
                    u[j] = 1.0 - std::fabs(2.0 * v - 1.0);  // baker transform periodizes
                    lat[j] += zdivn[j];
                    if (lat[j] >= 1.0) lat[j] -= 1.0;
                }
                acc += (genz_integrand(f, u.data(), ybuf.data()) - acc) / (k + 1);
            }
            shift_mean[s] = acc;
        });
        double mean = 0.0;
        for (double v : shift_mean) mean += v;
        mean /= n_shifts;
        double var = 0.0;
        for (double v : shift_mean) var += (v - mean) * (v - mean);
        var /= (n_shifts - 1);
        res.value = mean;
        res.error_estimate = 3.0 * std::sqrt(var / n_shifts);
        res.points_used += n * n_shifts;
        const double tol = (target_rel_err > 0.0)
                               ? std::max(target_abs_err, target_rel_err * std::fabs(mean))
                               : target_abs_err;
        if (res.error_estimate <= tol) {
            res.converged = true;
            break;
        }
    }
    res.value = std::clamp(res.value, 0.0, 1.0);
    return res;
}

}  // namespace esnx
