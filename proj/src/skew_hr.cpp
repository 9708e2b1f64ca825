#include "esnx/skew_hr.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "esnx/errors.hpp"
#include "esnx/normal.hpp"
#include "esnx/rng.hpp"

namespace esnx {

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double nan = std::numeric_limits<double>::quiet_NaN();
}  // namespace

SkewHrModel SkewHrModel::validate(HrSkewParams p) {
    const auto d = p.lambda.rows();
    if (d < 2 || p.lambda.cols() != d) throw domain_error("lambda must be a square matrix, dim >= 2");
    if (p.alpha_circ.size() != d) throw domain_error("alpha_circ length must equal dim");
    if (!std::isfinite(p.tau)) throw domain_error("tau must be finite");
    int n_inf = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
        if (p.lambda(i, i) != 0.0) throw invalid_lambda("lambda must have zero diagonal");
        for (Eigen::Index j = i + 1; j < d; ++j) {
            const double v = p.lambda(i, j);
            if (!(v == p.lambda(j, i))) throw invalid_lambda("lambda must be symmetric");
            if (!(v > 0.0)) throw invalid_lambda("lambda entries must be strictly positive");
            if (v == inf) ++n_inf;
        }
    }
    SkewHrModel m;
    m.alpha_residual_ = p.alpha_circ.sum();
    if (std::fabs(m.alpha_residual_) > 1e-12 && !p.allow_invalid_alpha) {
        std::ostringstream os;
        os << "alpha_circ must sum to zero (residual " << m.alpha_residual_ << ")";
        throw constraint_violation(os.str(), m.alpha_residual_);
    }
    if (n_inf == d * (d - 1) / 2) {
        m.independent_ = true;
        m.p_ = std::move(p);
        return m;
    }

    // infinite lambda means the pair decouples in the limit; that is only coherent
    // when no skewness direction rides on the decoupled pair
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i + 1; j < d; ++j)
            if (p.lambda(i, j) == inf && (p.alpha_circ(i) != 0.0 || p.alpha_circ(j) != 0.0))
                throw invalid_lambda("infinite lambda with nonzero skewness on its endpoints",
                                     static_cast<int>(i), static_cast<int>(j), -1);

    const auto lam2 = [&](int a, int b) { return p.lambda(a, b) * p.lambda(a, b); };

    m.c_.resize(d);
    m.log_tilt_.resize(d);
    for (int i = 0; i < d; ++i) {
        double s_i = 0.0;
        double c2 = 1.0;
        for (int k = 0; k < d; ++k) {
            if (k == i || p.alpha_circ(k) == 0.0) continue;
            s_i += std::sqrt(2.0) * lam2(k, i) * p.alpha_circ(k);
            for (int q = 0; q < d; ++q) {
                if (q == i || p.alpha_circ(q) == 0.0) continue;
                c2 += p.alpha_circ(k) * p.alpha_circ(q) * (lam2(k, i) + lam2(q, i) - lam2(k, q));
            }
        }
        if (!(c2 > 0.0))
            throw invalid_lambda("tilt normalizer is not positive for margin", i, -1, -1);
        m.c_[i] = std::sqrt(c2);
        m.log_tilt_[i] = log_std_normal_cdf((p.tau - s_i) / m.c_[i]) -
                         log_std_normal_cdf(p.tau / m.c_[i]);
    }

    for (int j = 0; j < d; ++j) {
        DerivedMarginJ mj;
        mj.j = j;
        for (int i = 0; i < d; ++i)
            if (i != j && p.lambda(i, j) < inf) {
                mj.context.push_back(i);
                mj.lambda_col.push_back(p.lambda(i, j));
            }
        const int k = static_cast<int>(mj.context.size());
        if (k > 0) {
            Eigen::MatrixXd corr(k, k);
            Eigen::VectorXd slant(k);
            double ext = p.tau;
            for (int a = 0; a < k; ++a) {
                const int ia = mj.context[a];
                corr(a, a) = 1.0;
                slant(a) = std::sqrt(2.0) * p.alpha_circ(ia) * p.lambda(ia, j);
                ext -= slant(a);
                for (int b = a + 1; b < k; ++b) {
                    const int ib = mj.context[b];
                    if (p.lambda(ia, ib) == inf)
                        throw invalid_lambda("independent pair inside a dependent context", ia, ib,
                                             j);
                    const double e = (lam2(ia, j) + lam2(ib, j) - lam2(ia, ib)) /
                                     (2.0 * p.lambda(ia, j) * p.lambda(ib, j));
                    if (!(std::fabs(e) <= 1.0 + 1e-9))
                        throw invalid_lambda("context correlation outside [-1,1]", ia, ib, j);
                    corr(a, b) = corr(b, a) = std::clamp(e, -1.0, 1.0);
                }
            }
            try {
                mj.params.emplace(CorrelationMatrix(std::move(corr)), slant, ext);
            } catch (const singular_matrix&) {
                throw invalid_lambda("context matrix is not positive semi-definite for margin", -1,
                                     -1, j);
            }
        }
        m.margins_.push_back(std::move(mj));
    }
    m.p_ = std::move(p);
    return m;
}

CdfResult SkewHrModel::stable_tail_L(const std::vector<double>& z, double target_abs_err,
                                     std::uint64_t seed) const {
    const int d = dim();
    if (static_cast<int>(z.size()) != d) throw domain_error("stable_tail_L: dimension mismatch");
    double zsum = 0.0;
    for (double v : z) {
        if (!(v >= 0.0) || v == inf) throw domain_error("stable_tail_L: z must be finite, >= 0");
        zsum += v;
    }
    if (zsum == 0.0) return {0.0, 0.0, 0, true};
    if (independent_) {
        return {zsum, 0.0, 0, true};
    }
    CdfResult out{0.0, 0.0, 0, true};
    for (int j = 0; j < d; ++j) {
        if (z[j] == 0.0) continue;
        const DerivedMarginJ& mj = margins_[j];
        if (mj.context.empty()) {
            out.value += z[j];
            continue;
        }
        std::vector<double> args(mj.context.size());
        for (size_t a = 0; a < mj.context.size(); ++a) {
            const int i = mj.context[a];
            if (z[i] == 0.0) {
                args[a] = inf;
            } else {
                args[a] = mj.lambda_col[a] +
                          (std::log(z[j]) - std::log(z[i]) + log_tilt_[i] - log_tilt_[j]) /
                              (2.0 * mj.lambda_col[a]);
            }
        }
        const double term_target = std::max(target_abs_err / (d * std::max(z[j], 1.0)), 1e-13);
        Rng mix = Rng::stream(seed, static_cast<std::uint64_t>(j));
        const CdfResult r = esn_cdf(args, *mj.params, term_target, mix.next_u64());
        out.value += z[j] * r.value;
        out.error_estimate += z[j] * r.error_estimate;
        out.points_used += r.points_used;
        out.converged = out.converged && r.converged;
    }
    return out;
}

CdfResult SkewHrModel::pickands_A(const std::vector<double>& t, double target_abs_err,
                                  std::uint64_t seed) const {
    double sum = 0.0;
    for (double v : t) {
        if (!(v >= 0.0)) throw domain_error("pickands_A: t must be componentwise >= 0");
        sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-12) throw domain_error("pickands_A: t must lie on the unit simplex");
    return stable_tail_L(t, target_abs_err, seed);
}

CdfResult SkewHrModel::gev_cdf_G(const std::vector<double>& x, double target_abs_err,
                                 std::uint64_t seed) const {
    const int d = dim();
    if (static_cast<int>(x.size()) != d) throw domain_error("gev_cdf_G: dimension mismatch");
    std::vector<double> z(d);
    for (int i = 0; i < d; ++i) {
        if (std::isnan(x[i])) throw domain_error("gev_cdf_G: NaN coordinate");
        if (x[i] == -inf) return {0.0, 0.0, 0, true};
        z[i] = std::exp(-x[i]);
    }
    CdfResult l = stable_tail_L(z, target_abs_err, seed);
    const double g = std::exp(-l.value);
    return {g, g * l.error_estimate, l.points_used, l.converged};
}

ChiUpperDiagnostic SkewHrModel::chi_upper(double target_abs_err, std::uint64_t seed) const {
    if (dim() != 2) throw domain_error("chi_upper: requires dim == 2");
    ChiUpperDiagnostic out{};
    const CdfResult l = stable_tail_L({1.0, 1.0}, target_abs_err, seed);
    out.chi = 2.0 - l.value;
    out.err = l.error_estimate;

    // the two printed closed forms, transcribed literally (including the non-squared,
    // non-rooted denominators); reported, never used as ground truth
    const double lam = p_.lambda(0, 1);
    const double a1 = p_.alpha_circ(0), a2 = p_.alpha_circ(1), tau = p_.tau;
    const double sq2 = std::sqrt(2.0);
    if (lam == inf) {
        out.eq8_first = out.eq8_second = 0.0;
    } else {
        const double den1 = 1.0 + 2.0 * lam * lam * a1;
        const double den2 = 1.0 + 2.0 * lam * lam * a2;
        const double phi_num = std_normal_cdf((tau - sq2 * lam * lam * a2) / den1);
        const double phi_den = std_normal_cdf((tau + sq2 * lam * lam * a1) / den2);
        if (den1 == 0.0 || den2 == 0.0 || phi_num <= 0.0 || phi_den <= 0.0) {
            out.eq8_first = out.eq8_second = nan;
        } else {
            const double r = std::log(phi_num / phi_den) / (2.0 * lam);
            out.eq8_first =
                1.0 - uni_esn_cdf(lam + r, {-sq2 * lam * a2, tau + sq2 * lam * lam * a2});
            out.eq8_second =
                1.0 - uni_esn_cdf(lam - r, {sq2 * lam * a1, tau - sq2 * lam * lam * a1});
        }
    }
    out.printed_agree = std::fabs(out.eq8_first - out.eq8_second) <= 1e-10;
    out.matches_chi = std::fabs(out.eq8_first + out.eq8_second - out.chi) <= 1e-8;
    return out;
}

double SkewHrModel::angular_density_h(const std::vector<double>& w) const {
    const int d = dim();
    if (static_cast<int>(w.size()) != d) throw domain_error("angular_density_h: dimension mismatch");
    if (independent_)
        throw domain_error("angular_density_h: measure has no interior density under independence");
    double sum = 0.0;
    for (double v : w) {
        if (!(v > 0.0)) throw domain_error("angular_density_h: w must be strictly interior");
        sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw domain_error("angular_density_h: w must lie on the unit simplex");

    // interior density of the angular measure in the mass-d normalization: the full
    // mixed partial of L at z = 1/w. Each margin contributes its ESN density plus
    // the 1/(2 lambda)-weighted slope along every context direction.
    double out = 0.0;
    for (int j = 0; j < d; ++j) {
        const DerivedMarginJ& mj = margins_[j];
        const int k = static_cast<int>(mj.context.size());
        if (k != d - 1)
            throw domain_error("angular_density_h: undefined with an independent pair present");
        Eigen::VectorXd u(k);
        for (int a = 0; a < k; ++a) {
            const int i = mj.context[a];
            u(a) = mj.lambda_col[a] +
                   (std::log(w[i]) - std::log(w[j]) + log_tilt_[i] - log_tilt_[j]) /
                       (2.0 * mj.lambda_col[a]);
        }
        const EsnParams& pj = *mj.params;
        const double f = std::exp(esn_log_pdf(u, pj));
        const double s = pj.slant().dot(u) + pj.extension();
        const double haz = std::exp(log_std_normal_pdf(s) - log_std_normal_cdf(s));
        const Eigen::VectorXd prec_u =
            Eigen::LLT<Eigen::MatrixXd>(pj.corr().entries()).solve(u);
        double val = f;
        for (int a = 0; a < k; ++a) {
            const double grad_a = f * (-prec_u(a) + pj.slant()(a) * haz);
            val += grad_a / (2.0 * mj.lambda_col[a]);
        }
        double denom = w[j] * w[j] * std::pow(2.0, d - 1);
        for (int a = 0; a < k; ++a) denom *= mj.lambda_col[a] * w[mj.context[a]];
        out += val / denom;
    }
    return out;
}

}  // namespace esnx
