#include "esnx/tail.hpp"

#include <cmath>
#include <limits>

#include "esnx/errors.hpp"
#include "esnx/normal.hpp"
#include "esnx/parallel.hpp"
#include "esnx/rng.hpp"

namespace esnx {

namespace {
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

UniEsnParams margin_of(const EsnParams& p, int j) {
    const MarginalMap m = marginal_params(p, {j});
    return UniEsnParams{m.params.slant()(0), m.params.extension()};
}

double omega_of(const EsnParams& p) {
    if (p.dim() != 2) throw domain_error("operation requires a bivariate ESN");
    return p.corr()(0, 1);
}
}  // namespace

const char* to_string(TailCaseLabel label) {
    switch (label) {
        case TailCaseLabel::case_i: return "I";
        case TailCaseLabel::case_iia: return "IIa";
        case TailCaseLabel::case_iib: return "IIb";
        case TailCaseLabel::case_iii: return "III";
    }
    return "?";
}

std::array<double, 2> marginal_slants(double omega, double a1, double a2) {
    const double w2 = 1.0 - omega * omega;
    return {(a1 + omega * a2) / std::sqrt(1.0 + a2 * a2 * w2),
            (a2 + omega * a1) / std::sqrt(1.0 + a1 * a1 * w2)};
}

TailCase dispatch_case(double omega, double a1, double a2) {
    if (!(omega >= 0.0 && omega < 1.0)) throw domain_error("dispatch_case: omega must lie in [0,1)");
    const auto s = marginal_slants(omega, a1, a2);
    if (s[0] >= 0.0 && s[1] >= 0.0) return {TailCaseLabel::case_i, 1};
    if (s[0] < 0.0 && s[1] < 0.0) return {TailCaseLabel::case_iii, s[0] <= s[1] ? 0 : 1};
    const int j = s[0] < 0.0 ? 0 : 1;  // pivot: the margin with negative slant
    const double aj = (j == 0) ? a1 : a2;
    const double a3j = (j == 0) ? a2 : a1;
    const double abar_j = std::sqrt(1.0 + s[j] * s[j]);
    const double split = a3j + aj / abar_j;
    if (split == 0.0)
        throw boundary_case("dispatch_case: parameters sit on the IIa/IIb boundary");
    return {split > 0.0 ? TailCaseLabel::case_iia : TailCaseLabel::case_iib, j};
}

namespace {

// Corner/Mills approximation of the joint survival of the tilted Gaussian at
// thresholds (b1, b2); log value, or NaN outside the corner-dominance regime.
double log_corner_survival(double b1, double b2, double omega, double a1, double a2, double tau,
                           double log_k) {
    const double w2 = 1.0 - omega * omega;
    const double tc = a1 * b1 + a2 * b2 + tau;
    const double q = (b1 * b1 - 2.0 * omega * b1 * b2 + b2 * b2) / w2;
    const double mills = std::exp(log_std_normal_pdf(tc) - log_std_normal_cdf(tc));
    const double r1 = (b1 - omega * b2) / w2 - a1 * mills;
    const double r2 = (b2 - omega * b1) / w2 - a2 * mills;
    if (!(r1 > 0.0) || !(r2 > 0.0)) return nan;
    return -0.5 * q + log_std_normal_cdf(tc) - std::log(2.0 * M_PI * std::sqrt(w2)) - log_k -
           std::log(r1) - std::log(r2);
}

}  // namespace

TailAsymptotics tail_asymptotics(double omega, double a1, double a2, double tau) {
    const TailCase c = dispatch_case(omega, a1, a2);
    const auto s = marginal_slants(omega, a1, a2);
    const std::array<double, 2> abar{std::sqrt(1.0 + s[0] * s[0]), std::sqrt(1.0 + s[1] * s[1])};
    const double w2 = 1.0 - omega * omega;
    const double big_k =
        std_normal_cdf(tau / std::sqrt(1.0 + a1 * a1 + a2 * a2 + 2.0 * omega * a1 * a2));

    double eta;
    switch (c.label) {
        case TailCaseLabel::case_i:
            eta = 0.5 * (1.0 + omega);
            break;
        case TailCaseLabel::case_iia:
        case TailCaseLabel::case_iib: {
            const double abj = abar[c.pivot_j];
            const double aj = (c.pivot_j == 0) ? a1 : a2;
            const double a3j = (c.pivot_j == 0) ? a2 : a1;
            const double k1 = (w2 + (abj - omega) * (abj - omega)) / (w2 * abj * abj);
            const double t = a3j + aj / abj;
            eta = (c.label == TailCaseLabel::case_iia) ? 1.0 / k1 : 1.0 / (k1 + t * t);
            break;
        }
        case TailCaseLabel::case_iii: {
            const double b = (a1 * a1 * w2 + 1.0) / (abar[0] * abar[0]) +
                             (a2 * a2 * w2 + 1.0) / (abar[1] * abar[1]) +
                             2.0 * (a1 * a2 * w2 - omega) / (abar[0] * abar[1]);
            eta = w2 / b;
            break;
        }
    }

    std::function<double(double)> sv;
    if (c.label == TailCaseLabel::case_i) {
        // leading term of the appendix expansion; exact constant K at omega = 0
        const double log_k = std::log(big_k);
        sv = [omega, log_k](double u) {
            const double big_l = std::log(1.0 / u);
            return std::exp(std::log1p(omega) - std::log1p(-omega) +
                            (1.0 - omega) / (1.0 + omega) * log_k -
                            omega / (1.0 + omega) * std::log(4.0 * M_PI * big_l));
        };
    } else {
        // corner/Mills evaluation of the joint survival at the exact marginal
        // quantiles, mapped back through chi(u) = u^{1/eta-1} L(1/u)
        const UniEsnParams m1{s[0], tau / std::sqrt(1.0 + a2 * a2 * w2)};
        const UniEsnParams m2{s[1], tau / std::sqrt(1.0 + a1 * a1 * w2)};
        const double log_k = std::log(big_k);
        const double inv_eta = 1.0 / eta;
        sv = [omega, a1, a2, tau, m1, m2, log_k, inv_eta](double u) {
            if (!(u > 0.0 && u < 0.5)) return nan;
            double q1, q2;
            try {
                q1 = esn_quantile(1.0 - u, m1, 1e-10);
                q2 = esn_quantile(1.0 - u, m2, 1e-10);
            } catch (const no_convergence&) {
                return nan;
            }
            const double lp = log_corner_survival(q1, q2, omega, a1, a2, tau, log_k);
            if (std::isnan(lp)) return nan;
            return std::exp(lp - inv_eta * std::log(u));
        };
    }
    return TailAsymptotics{c, eta, big_k, abar, std::move(sv)};
}

std::pair<double, double> chi_u_exact(const EsnParams& params, double u, double target_abs_err,
                                      std::uint64_t seed) {
    const double omega = omega_of(params);
    (void)omega;
    if (!(u > 0.0 && u <= 0.5)) throw domain_error("chi_u_exact: u must lie in (0, 0.5]");
    const UniEsnParams m1 = margin_of(params, 0);
    const UniEsnParams m2 = margin_of(params, 1);
    const double q1 = esn_quantile(1.0 - u, m1, 1e-12);
    const double q2 = esn_quantile(1.0 - u, m2, 1e-12);

    const double surv_target = std::max(target_abs_err * u, 1e-15);
    const CdfResult f12 = esn_cdf({q1, q2}, params, surv_target, seed);
    const double f1 = uni_esn_cdf(q1, m1);
    const double f2 = uni_esn_cdf(q2, m2);
    double surv = 1.0 - f1 - f2 + f12.value;
    double err = f12.error_estimate + 4e-15;

    if (!(surv >= 10.0 * err) || !f12.converged) {
        // inclusion-exclusion has cancelled away; integrate the survival rectangle
        // of the hidden-truncation Gaussian directly
        const CdfResult orth =
            esn_upper_orthant({q1, q2}, params, surv_target, seed, 1e-4);
        surv = orth.value;
        err = orth.error_estimate;
        if (!(err <= 0.1 * surv))
            throw accuracy_not_reached("chi_u_exact: joint survival below resolvable accuracy",
                                       surv / u, err / u);
    }
    return {surv / u, err / u};
}

ChiCurve chi_curve(const EsnParams& params, const std::vector<double>& u_grid,
                   double target_abs_err, std::uint64_t seed) {
    if (params.dim() != 2) throw domain_error("chi_curve: requires a bivariate ESN");
    for (size_t i = 0; i < u_grid.size(); ++i) {
        if (!(u_grid[i] > 0.0 && u_grid[i] <= 0.5))
            throw domain_error("chi_curve: grid values must lie in (0, 0.5]");
        if (i > 0 && !(u_grid[i] < u_grid[i - 1]))
            throw domain_error("chi_curve: grid must be strictly decreasing");
    }
    const double omega = params.corr()(0, 1);
    const TailAsymptotics asym =
        tail_asymptotics(omega, params.slant()(0), params.slant()(1), params.extension());

    const auto n = static_cast<std::int64_t>(u_grid.size());
    ChiCurve out;
    out.u_grid = u_grid;
    out.chi_exact.assign(n, nan);
    out.chi_asymptotic.assign(n, nan);
    out.errors.assign(n, nan);
    out.exact_ok.assign(n, false);
    std::vector<char> okbuf(n, 0);
    parallel_for(n, [&](std::int64_t i) {
        const double u = u_grid[i];
        const double sv = asym.slowly_varying(u);
        out.chi_asymptotic[i] = sv * std::pow(u, 1.0 / asym.eta - 1.0);
        std::uint64_t s = seed;
        Rng mix = Rng::stream(seed, static_cast<std::uint64_t>(i));
        s = mix.next_u64();
        try {
            const auto [v, e] = chi_u_exact(params, u, target_abs_err, s);
            out.chi_exact[i] = v;
            out.errors[i] = e;
            okbuf[i] = 1;
        } catch (const accuracy_not_reached& ex) {
            out.chi_exact[i] = nan;
            out.errors[i] = ex.error_estimate;
        } catch (const no_convergence&) {
        }
    });
    for (std::int64_t i = 0; i < n; ++i) out.exact_ok[i] = okbuf[i] != 0;
    return out;
}

std::pair<double, double> survival_ratio(const EsnParams& params, double x,
                                         SurvivalScenario scenario, double target_abs_err,
                                         std::uint64_t seed) {
    const double omega = omega_of(params);
    const auto s = marginal_slants(omega, params.slant()(0), params.slant()(1));
    const double abar_i = std::sqrt(1.0 + s[0] * s[0]);
    const double abar_j = std::sqrt(1.0 + s[1] * s[1]);

    double xi = x;  // threshold for X_i (= X_1); X_j keeps x
    switch (scenario) {
        case SurvivalScenario::a:
        case SurvivalScenario::b: break;
        case SurvivalScenario::c: xi = x * abar_j / abar_i; break;
        case SurvivalScenario::d: xi = x / abar_i; break;
    }
    const UniEsnParams m1 = margin_of(params, 0);
    const double den = uni_esn_survival(xi, m1);
    if (!(den > 0.0)) throw accuracy_not_reached("survival_ratio: denominator underflows", 0.0, 0.0);
    const CdfResult num =
        esn_upper_orthant({xi, x}, params, std::max(target_abs_err * den, 1e-15), seed, 1e-5);
    if (!num.converged && !(num.error_estimate <= 0.1 * num.value))
        throw accuracy_not_reached("survival_ratio: numerator below resolvable accuracy",
                                   num.value / den, num.error_estimate / den);
    return {num.value / den, num.error_estimate / den};
}

}  // namespace esnx
