#include "esnx/esn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "esnx/errors.hpp"
#include "esnx/normal.hpp"
#include "esnx/parallel.hpp"
#include "esnx/rng.hpp"

namespace esnx {

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();

void check_index_set(const std::vector<int>& I, int dim) {
    if (I.empty() || static_cast<int>(I.size()) >= dim)
        throw index_error("index set must be a non-empty strict subset");
    for (size_t a = 0; a < I.size(); ++a) {
        if (I[a] < 0 || I[a] >= dim) throw index_error("index out of range");
        if (a > 0 && I[a] <= I[a - 1]) throw index_error("index set must be strictly ascending");
    }
}

std::vector<int> complement(const std::vector<int>& I, int dim) {
    std::vector<int> out;
    out.reserve(dim - I.size());
    size_t p = 0;
    for (int i = 0; i < dim; ++i) {
        if (p < I.size() && I[p] == i)
            ++p;
        else
            out.push_back(i);
    }
    return out;
}

Eigen::MatrixXd block(const Eigen::MatrixXd& m, const std::vector<int>& rows,
                      const std::vector<int>& cols) {
    Eigen::MatrixXd out(rows.size(), cols.size());
    for (size_t a = 0; a < rows.size(); ++a)
        for (size_t b = 0; b < cols.size(); ++b) out(a, b) = m(rows[a], cols[b]);
    return out;
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<int>& idx) {
    Eigen::VectorXd out(idx.size());
    for (size_t a = 0; a < idx.size(); ++a) out(a) = v(idx[a]);
    return out;
}

}  // namespace

EsnParams::EsnParams(CorrelationMatrix corr, Eigen::VectorXd slant, double extension)
    : corr_(std::move(corr)), slant_(std::move(slant)), extension_(extension) {
    const int d = corr_.dim();
    if (slant_.size() != d) throw domain_error("EsnParams: slant length must equal dim");
    if (!slant_.allFinite() || !std::isfinite(extension_))
        throw domain_error("EsnParams: parameters must be finite");
    const Eigen::VectorXd oa = corr_.entries() * slant_;
    quad_form_ = std::max(slant_.dot(oa), 0.0);
    const double root = std::sqrt(1.0 + quad_form_);
    latent_thresh_ = extension_ / root;
    log_normalizer_ = log_std_normal_cdf(latent_thresh_);
    normalizer_ = std_normal_cdf(latent_thresh_);
    if (!(normalizer_ > 0.0))
        throw domain_error("EsnParams: normalizer underflows (extension too negative)");
    delta_ = oa / root;
}

EsnParams EsnParams::univariate(double slant, double extension) {
    Eigen::VectorXd a(1);
    a << slant;
    return EsnParams(CorrelationMatrix::identity(1), a, extension);
}

EsnParams EsnParams::bivariate(double omega, double slant1, double slant2, double extension) {
    Eigen::VectorXd a(2);
    a << slant1, slant2;
    return EsnParams(CorrelationMatrix::bivariate(omega), a, extension);
}

double esn_log_pdf(const Eigen::VectorXd& x, const EsnParams& p) {
    if (x.size() != p.dim()) throw domain_error("esn_pdf: dimension mismatch");
    return mvn_log_pdf(x, p.corr()) + log_std_normal_cdf(p.slant().dot(x) + p.extension()) -
           p.log_normalizer();
}

double esn_pdf(const Eigen::VectorXd& x, const EsnParams& p) { return std::exp(esn_log_pdf(x, p)); }

namespace {

// correlation matrix of (Z, -W) / (−Z, −W): appending the latent column with sign s
CorrelationMatrix augmented_corr(const EsnParams& p, double sign) {
    const int d = p.dim();
    Eigen::MatrixXd m(d + 1, d + 1);
    m.topLeftCorner(d, d) = p.corr().entries();
    for (int i = 0; i < d; ++i) {
        m(i, d) = sign * p.delta()(i);
        m(d, i) = m(i, d);
    }
    m(d, d) = 1.0;
    return CorrelationMatrix(std::move(m));
}

}  // namespace

CdfResult esn_cdf(const std::vector<double>& x, const EsnParams& p, double target_abs_err,
                  std::uint64_t seed) {
    if (static_cast<int>(x.size()) != p.dim()) throw domain_error("esn_cdf: dimension mismatch");
    std::vector<double> upper(x);
    upper.push_back(p.latent_thresh());
    const double k = p.normalizer();
    CdfResult r = mvn_cdf(std::move(upper), augmented_corr(p, -1.0),
                          std::max(target_abs_err * k, 1e-13), seed);
    r.value = std::min(r.value / k, 1.0);
    r.error_estimate /= k;
    return r;
}

CdfResult esn_upper_orthant(const std::vector<double>& q, const EsnParams& p,
                            double target_abs_err, std::uint64_t seed, double target_rel_err) {
    if (static_cast<int>(q.size()) != p.dim())
        throw domain_error("esn_upper_orthant: dimension mismatch");
    std::vector<double> upper(q.size() + 1);
    for (size_t i = 0; i < q.size(); ++i) upper[i] = -q[i];
    upper.back() = p.latent_thresh();
    const double k = p.normalizer();
    CdfResult r = mvn_cdf(std::move(upper), augmented_corr(p, +1.0),
                          std::max(target_abs_err * k, 1e-13), seed, target_rel_err);
    r.value = std::min(r.value / k, 1.0);
    r.error_estimate /= k;
    return r;
}

MarginalMap marginal_params(const EsnParams& p, const std::vector<int>& keep) {
    const int d = p.dim();
    check_index_set(keep, d);
    const std::vector<int> rest = complement(keep, d);
    const Eigen::MatrixXd o_ii = block(p.corr().entries(), keep, keep);
    const Eigen::MatrixXd o_ir = block(p.corr().entries(), keep, rest);
    const Eigen::MatrixXd o_rr = block(p.corr().entries(), rest, rest);
    const Eigen::VectorXd a_i = gather(p.slant(), keep);
    const Eigen::VectorXd a_r = gather(p.slant(), rest);

    Eigen::LLT<Eigen::MatrixXd> llt(o_ii);
    if (llt.info() != Eigen::Success)
        throw singular_matrix("marginal_params: kept block not positive definite");
    const Eigen::MatrixXd schur = o_rr - o_ir.transpose() * llt.solve(o_ir);
    const double q_res = std::max(a_r.dot(schur * a_r), 0.0);
    const double root = std::sqrt(1.0 + q_res);
    const Eigen::VectorXd a_star = (a_i + llt.solve(o_ir * a_r)) / root;
    const double tau_star = p.extension() / root;
    return MarginalMap{EsnParams(CorrelationMatrix(o_ii), a_star, tau_star), keep};
}

ConditionalMap conditional_params(const EsnParams& p, const std::vector<int>& given,
                                  const Eigen::VectorXd& x_given) {
    const int d = p.dim();
    check_index_set(given, d);
    if (x_given.size() != static_cast<Eigen::Index>(given.size()))
        throw index_error("conditional_params: x length must match index set");
    const std::vector<int> rest = complement(given, d);
    const Eigen::MatrixXd o_gg = block(p.corr().entries(), given, given);
    const Eigen::MatrixXd o_rg = block(p.corr().entries(), rest, given);
    const Eigen::MatrixXd o_rr = block(p.corr().entries(), rest, rest);
    const Eigen::VectorXd a_g = gather(p.slant(), given);
    const Eigen::VectorXd a_r = gather(p.slant(), rest);

    Eigen::LLT<Eigen::MatrixXd> llt(o_gg);
    if (llt.info() != Eigen::Success)
        throw singular_matrix("conditional_params: conditioning block not positive definite");
    const Eigen::VectorXd w = llt.solve(x_given);
    ConditionalMap out;
    out.location = o_rg * w;
    out.scale_matrix = o_rr - o_rg * llt.solve(o_rg.transpose());
    out.slant = out.scale_matrix.diagonal().cwiseSqrt().cwiseProduct(a_r);
    out.extension = a_r.dot(o_rg * w) + a_g.dot(x_given) + p.extension();
    out.kept = rest;
    return out;
}

double conditional_log_pdf(const ConditionalMap& map, const Eigen::VectorXd& y) {
    const auto dr = map.scale_matrix.rows();
    if (y.size() != dr) throw domain_error("conditional_log_pdf: dimension mismatch");
    const Eigen::VectorXd scales = map.scale_matrix.diagonal().cwiseSqrt();
    Eigen::MatrixXd corr = map.scale_matrix;
    for (Eigen::Index i = 0; i < dr; ++i)
        for (Eigen::Index j = 0; j < dr; ++j) corr(i, j) /= scales(i) * scales(j);
    const Eigen::VectorXd z = (y - map.location).cwiseQuotient(scales);
    const double q = std::max(map.slant.dot(corr * map.slant), 0.0);
    return mvn_log_pdf(z, CorrelationMatrix(corr)) - scales.array().log().sum() +
           log_std_normal_cdf(map.slant.dot(z) + map.extension) -
           log_std_normal_cdf(map.extension / std::sqrt(1.0 + q));
}

Eigen::MatrixXd esn_sample(const EsnParams& p, long n, std::uint64_t seed) {
    if (n < 1) throw domain_error("esn_sample: n must be >= 1");
    const int d = p.dim();
    const Eigen::MatrixXd cond_cov =
        p.corr().entries() - p.delta() * p.delta().transpose();
    Eigen::LLT<Eigen::MatrixXd> llt(cond_cov);
    if (llt.info() != Eigen::Success) {
        Eigen::MatrixXd j = cond_cov;
        j.diagonal().array() += 1e-10;
        llt.compute(j);
        if (llt.info() != Eigen::Success)
            throw singular_matrix("esn_sample: conditional covariance not positive definite");
    }
    const Eigen::MatrixXd chol = llt.matrixL();
    const double k = p.normalizer();

    Eigen::MatrixXd out(n, d);
    constexpr long block_rows = 4096;  // fixed blocks keep output independent of threads
    const long blocks = (n + block_rows - 1) / block_rows;
    parallel_for(blocks, [&](std::int64_t bi) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(bi));
        const long lo = bi * block_rows, hi = std::min(n, lo + block_rows);
        Eigen::VectorXd xi(d);
        for (long r = lo; r < hi; ++r) {
            // latent T ~ N(0,1) | T > -latent_thresh, by survival inversion
            const double t = -std_normal_quantile(
                std::clamp(rng.uniform01() * k, 1e-300, 1.0 - 1e-16));
            for (int c = 0; c < d; ++c) xi(c) = rng.normal();
            out.row(r) = (p.delta() * t + chol * xi).transpose();
        }
    });
    return out;
}

double uni_esn_log_pdf(double x, const UniEsnParams& p) {
    const double root = std::sqrt(1.0 + p.slant * p.slant);
    return log_std_normal_pdf(x) + log_std_normal_cdf(p.slant * x + p.extension) -
           log_std_normal_cdf(p.extension / root);
}

double uni_esn_cdf(double x, const UniEsnParams& p) {
    if (x == inf) return 1.0;
    if (x == -inf) return 0.0;
    const double root = std::sqrt(1.0 + p.slant * p.slant);
    const double delta = p.slant / root;
    const double t0 = p.extension / root;
    return std::min(bvn_cdf(x, t0, -delta) / std_normal_cdf(t0), 1.0);
}

double uni_esn_survival(double x, const UniEsnParams& p) {
    if (x == inf) return 0.0;
    if (x == -inf) return 1.0;
    const double root = std::sqrt(1.0 + p.slant * p.slant);
    const double delta = p.slant / root;
    const double t0 = p.extension / root;
    return std::min(bvn_cdf(-x, t0, delta) / std_normal_cdf(t0), 1.0);
}

double quantile_seed(double u, const UniEsnParams& p) {
    if (!(u > 0.0 && u < 0.5)) throw domain_error("quantile_seed: u must lie in (0, 0.5)");
    const double a = p.slant;
    const double ab2 = 1.0 + a * a;
    const double ab = std::sqrt(ab2);
    const double big_l = std::log(1.0 / u);
    const double l0 = std::sqrt(2.0 * big_l);
    const double x_u =
        l0 - (std::log(2.0 * std::sqrt(M_PI)) + 0.5 * std::log(big_l) +
              log_std_normal_cdf(p.extension / ab)) /
                 l0;
    if (a >= 0.0) return x_u;
    const double l_a = std::sqrt(2.0 * big_l * ab2);
    return x_u / ab - a * p.extension / ab2 -
           (std::log(2.0 * std::sqrt(M_PI)) + std::log(-a) + 0.5 * std::log(big_l) +
            0.5 * a * a) /
               l_a;
}

double esn_quantile(double p_target, const UniEsnParams& params, double tol) {
    if (!(p_target > 0.0 && p_target < 1.0))
        throw domain_error("esn_quantile: p must lie in (0,1)");
    tol = std::max(tol, 1e-14);

    double seed_x;
    if (p_target >= 0.5) {
        const double u = std::min(1.0 - p_target, 0.49);
        seed_x = quantile_seed(std::max(u, 1e-300), params);
    } else {
        const UniEsnParams flipped{-params.slant, params.extension};
        seed_x = -quantile_seed(std::max(std::min(p_target, 0.49), 1e-300), flipped);
    }

    // geometric bracket expansion around the seed
    double lo = seed_x - 2.0, hi = seed_x + 2.0;
    double flo = uni_esn_cdf(lo, params), fhi = uni_esn_cdf(hi, params);
    double step = 2.0;
    for (int it = 0; flo > p_target; ++it) {
        if (it >= 200) throw no_convergence("esn_quantile: lower bracket not found");
        step *= 2.0;
        lo -= step;
        flo = uni_esn_cdf(lo, params);
    }
    step = 2.0;
    for (int it = 0; fhi < p_target; ++it) {
        if (it >= 200) throw no_convergence("esn_quantile: upper bracket not found");
        step *= 2.0;
        hi += step;
        fhi = uni_esn_cdf(hi, params);
    }

    // bisection with a secant shortcut
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double fx = uni_esn_cdf(x, params);
        if (std::fabs(fx - p_target) <= tol) return x;
        if (fx < p_target) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        const double denom = fhi - flo;
        double cand = (denom > 0.0) ? lo + (p_target - flo) * (hi - lo) / denom : 0.5 * (lo + hi);
        const double margin = 0.1 * (hi - lo);
        if (!(cand > lo + margin && cand < hi - margin)) cand = 0.5 * (lo + hi);
        x = cand;
    }
    throw no_convergence("esn_quantile: iteration cap reached");
}

}  // namespace esnx
