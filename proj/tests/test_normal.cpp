#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "esnx/errors.hpp"
#include "esnx/normal.hpp"
#include "support.hpp"

using namespace esnx;
constexpr double inf = std::numeric_limits<double>::infinity();

TEST_CASE("std_normal_cdf basics and frozen oracle values") {
    CHECK(std_normal_cdf(0.0) == 0.5);
    CHECK(std_normal_cdf(inf) == 1.0);
    CHECK(std_normal_cdf(-inf) == 0.0);
    // high-precision oracle value computed independently before the build
    CHECK(std::fabs(std_normal_cdf(1.959963985) - 0.97500000002688156) < 1e-12);
}

TEST_CASE("std_normal_cdf against the series/continued-fraction oracle") {
    for (double x = -37.0; x <= 8.0; x += 0.173) {
        CHECK(std::fabs(std_normal_cdf(x) - oracle::norm_cdf(x)) <= 1e-15);
    }
    for (double x : {8.5, 12.0, 20.0, 30.0, 36.0}) {
        const double a = std_normal_cdf(-x), b = oracle::norm_cdf(-x);
        CHECK(std::fabs(a - b) <= 2e-14 * b);
    }
}

TEST_CASE("log_std_normal_cdf deep tail") {
    // values frozen from an arbitrary-precision evaluation
    CHECK(std::fabs(log_std_normal_cdf(-10.0) - (-53.23128515051247)) < 1e-10);
    CHECK(std::fabs(log_std_normal_cdf(-40.0) - (-804.6084420137538)) < 1e-9);
    CHECK(std::fabs(log_std_normal_cdf(-100.0) - (-5005.5242086942051)) < 1e-8);
    for (double x : {-5.0, -1.0, 0.0, 2.0, 8.0, 12.0})
        CHECK(std::fabs(log_std_normal_cdf(x) - std::log(oracle::norm_cdf(x))) <=
              1e-13 * std::fabs(std::log(oracle::norm_cdf(x))) + 1e-15);
}

TEST_CASE("hazard phi/Phi stable across the range") {
    for (double x : {-60.0, -35.0, -10.0, -2.0, 0.0, 3.0, 10.0}) {
        const double ref = oracle::phi_pdf(x) / oracle::norm_cdf(x);
        double val = std_normal_hazard_lower(x);
        if (x <= -34.0) {
            // oracle underflows there; check against the asymptotic -x + 1/x behaviour
            CHECK(std::fabs(val - (-x - 1.0 / x)) < 1e-3);
        } else {
            CHECK(std::fabs(val - ref) <= 1e-12 * std::fabs(ref));
        }
    }
}

TEST_CASE("std_normal_quantile round trips at 1e-14") {
    CHECK(std_normal_quantile(0.5) == 0.0);
    const double x = std_normal_quantile(0.975);
    CHECK(std::fabs(x - 1.959963984540054) < 1e-8);
    for (double p :
         {1e-300, 1e-30, 1e-10, 1e-4, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-10, 1.0 - 1e-15}) {
        const double q = std_normal_quantile(p);
        CHECK(std::fabs(std_normal_cdf(q) - p) <= 1e-14);
    }
    // inverse identity
    CHECK(std::fabs(std_normal_quantile(std_normal_cdf(2.0)) - 2.0) <= 1e-12);
    CHECK_THROWS_AS((void)std_normal_quantile(0.0), domain_error);
    CHECK_THROWS_AS((void)std_normal_quantile(1.0), domain_error);
    CHECK_THROWS_AS((void)std_normal_quantile(-0.1), domain_error);
}
