#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "esnx/esn.hpp"

namespace esnx {

enum class TailCaseLabel { case_i, case_iia, case_iib, case_iii };

const char* to_string(TailCaseLabel label);

struct TailCase {
    TailCaseLabel label;
    int pivot_j;  // 0-based margin playing the role of j in the asymmetric cases
};

// Sub-asymptotic description chi(u) ~ u^{1/eta - 1} L(1/u).
struct TailAsymptotics {
    TailCase tail_case;
    double eta;                    // coefficient of tail dependence
    double big_k;                  // Phi(tau / sqrt(1 + a1^2 + a2^2 + 2 w a1 a2))
    std::array<double, 2> alpha_bar;
    std::function<double(double)> slowly_varying;  // u -> L(1/u)
};

struct ChiCurve {
    std::vector<double> u_grid;
    std::vector<double> chi_exact;       // NaN where the exact evaluation failed
    std::vector<double> chi_asymptotic;  // u^{1/eta-1} L(1/u)
    std::vector<double> errors;
    std::vector<bool> exact_ok;
};

enum class SurvivalScenario { a, b, c, d };

// marginal slants (alpha*_1, alpha*_2) of a bivariate ESN
std::array<double, 2> marginal_slants(double omega, double a1, double a2);

// case dispatch on the signs of the marginal slants; throws boundary_case on the
// measure-zero boundaries the theory leaves undefined
TailCase dispatch_case(double omega, double a1, double a2);

TailAsymptotics tail_asymptotics(double omega, double a1, double a2, double tau);

// chi(u) = P(F1(X1)>=1-u, F2(X2)>=1-u)/u with exact marginal quantiles
std::pair<double, double> chi_u_exact(const EsnParams& params, double u, double target_abs_err,
                                      std::uint64_t seed);

ChiCurve chi_curve(const EsnParams& params, const std::vector<double>& u_grid,
                   double target_abs_err, std::uint64_t seed);

// conditional survival ratios behind the asymptotic-independence diagnostics
std::pair<double, double> survival_ratio(const EsnParams& params, double x,
                                         SurvivalScenario scenario, double target_abs_err,
                                         std::uint64_t seed);

}  // namespace esnx
