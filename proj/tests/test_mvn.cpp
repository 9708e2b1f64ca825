#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "esnx/errors.hpp"
#include "esnx/mvn.hpp"
#include "esnx/normal.hpp"
#include "support.hpp"

using namespace esnx;
constexpr double inf = std::numeric_limits<double>::infinity();

namespace {
Eigen::MatrixXd random_corr(int d, oracle::TestRng& rng) {
    Eigen::MatrixXd a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
    Eigen::MatrixXd s = a * a.transpose();
    s.diagonal().array() += 0.3;
    Eigen::VectorXd sc = s.diagonal().cwiseSqrt();
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) s(i, j) /= sc(i) * sc(j);
    for (int i = 0; i < d; ++i) s(i, i) = 1.0;
    return s;
}
}  // namespace

TEST_CASE("CorrelationMatrix validation") {
    CHECK_NOTHROW(CorrelationMatrix::bivariate(0.7));
    CHECK_NOTHROW(CorrelationMatrix::bivariate(1.0));
    CHECK_THROWS_AS(CorrelationMatrix::bivariate(1.2), domain_error);
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 0.4, 0.3, 1.0;
    CHECK_THROWS_AS(CorrelationMatrix{m}, domain_error);  // asymmetric
    m << 1.1, 0.4, 0.4, 1.1;
    CHECK_THROWS_AS(CorrelationMatrix{m}, domain_error);  // diagonal
    Eigen::MatrixXd bad(3, 3);
    bad << 1, -0.9, -0.9, -0.9, 1, -0.9, -0.9, -0.9, 1;  // min eigenvalue -0.8
    CHECK_THROWS_AS(CorrelationMatrix{bad}, singular_matrix);
}

TEST_CASE("mvn_pdf frozen values") {
    Eigen::VectorXd x1(1);
    x1 << 0.0;
    CHECK(mvn_pdf(x1, CorrelationMatrix::identity(1)) == doctest::Approx(0.3989422804014327).epsilon(1e-13));
    Eigen::VectorXd x2(2);
    x2 << 0.0, 0.0;
    CHECK(mvn_pdf(x2, CorrelationMatrix::bivariate(0.0)) ==
          doctest::Approx(0.15915494309189535).epsilon(1e-13));
    x2 << 1.0, 1.0;
    // cross-checked against an independent high-precision evaluation
    CHECK(mvn_pdf(x2, CorrelationMatrix::bivariate(0.5)) ==
          doctest::Approx(0.09435389770895923).epsilon(1e-12));
}

TEST_CASE("bivariate CDF: orthant identity at machine precision") {
    for (double w : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
        const double expect = 0.25 + std::asin(w) / (2.0 * M_PI);
        CHECK(std::fabs(bvn_cdf(0.0, 0.0, w) - expect) < 3e-15);
    }
    CHECK(bvn_cdf(0.0, 0.0, 0.5) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("bivariate CDF vs tetrachoric series") {
    oracle::TestRng rng(77);
    for (int it = 0; it < 200; ++it) {
        const double b1 = rng.uniform(-3.5, 3.5);
        const double b2 = rng.uniform(-3.5, 3.5);
        const double r = rng.uniform(-0.7, 0.7);
        CHECK(std::fabs(bvn_cdf(b1, b2, r) - oracle::bvn_series(b1, b2, r)) < 1e-12);
    }
}

TEST_CASE("bivariate CDF vs conditioning quadrature, including |rho| near 1") {
    oracle::TestRng rng(1234);
    for (int it = 0; it < 60; ++it) {
        const double b1 = rng.uniform(-4.0, 4.0);
        const double b2 = rng.uniform(-4.0, 4.0);
        double r = rng.uniform(-0.999, 0.999);
        if (it % 5 == 0) r = (it % 10 == 0) ? 0.97 : -0.95;
        const double sd = std::sqrt(1.0 - r * r);
        const double ref = oracle::integrate(
            [&](double s) { return oracle::phi_pdf(s) * oracle::norm_cdf((b2 - r * s) / sd); },
            -40.0, b1, 160);
        CHECK(std::fabs(bvn_cdf(b1, b2, r) - ref) < 5e-13);
    }
    // singular limits are exact
    CHECK(bvn_cdf(0.7, 1.3, 1.0) == std_normal_cdf(0.7));
    CHECK(std::fabs(bvn_cdf(0.7, 1.3, -1.0) -
                    (std_normal_cdf(0.7) + std_normal_cdf(1.3) - 1.0)) < 1e-15);
    CHECK(bvn_cdf(-1.0, 0.5, -1.0) == 0.0);
}

TEST_CASE("mvn_cdf reductions and special limits") {
    auto c3 = CorrelationMatrix::identity(3);
    CHECK(mvn_cdf({inf, inf, inf}, c3, 1e-8, 1).value == 1.0);
    CHECK(mvn_cdf({0.3, -inf, 1.0}, c3, 1e-8, 1).value == 0.0);
    // d = 1 reduction
    const auto r1 = mvn_cdf({0.73}, CorrelationMatrix::identity(1), 1e-8, 1);
    CHECK(std::fabs(r1.value - std_normal_cdf(0.73)) < 1e-10);
    // +inf coordinates integrate out exactly
    Eigen::MatrixXd m(3, 3);
    m << 1, 0.5, 0.2, 0.5, 1, 0.4, 0.2, 0.4, 1;
    CorrelationMatrix cm(m);
    const auto red = mvn_cdf({0.4, inf, -0.2}, cm, 1e-8, 5);
    const double expect = bvn_cdf(0.4, -0.2, 0.2);
    CHECK(std::fabs(red.value - expect) < 1e-14);
}

TEST_CASE("mvn_cdf equicorrelated orthant oracles") {
    // rho = 1/2 equicorrelation: P(Z <= 0) = 1/(d+1)
    for (int d : {3, 4, 5}) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Constant(d, d, 0.5);
        m.diagonal().setOnes();
        const auto r = mvn_cdf(std::vector<double>(d, 0.0), CorrelationMatrix(m), 1e-7, 42);
        CHECK(r.converged);
        CHECK(std::fabs(r.value - 1.0 / (d + 1)) <= 3.0 * std::max(r.error_estimate, 1e-9));
    }
}

TEST_CASE("mvn_cdf against conditioning quadrature in d=3") {
    oracle::TestRng rng(9001);
    for (int it = 0; it < 12; ++it) {
        Eigen::MatrixXd s = random_corr(3, rng);
        CorrelationMatrix cm(s);
        const double b0 = rng.uniform(-2.0, 2.5), b1 = rng.uniform(-2.0, 2.5),
                     b2 = rng.uniform(-2.0, 2.5);
        // integrate P(Z1<=b1, Z2<=b2 | Z0=s) phi(s) ds with the conditional bivariate
        const double r01 = s(0, 1), r02 = s(0, 2), r12 = s(1, 2);
        const double v1 = 1.0 - r01 * r01, v2 = 1.0 - r02 * r02;
        const double c12 = (r12 - r01 * r02) / std::sqrt(v1 * v2);
        const double ref = oracle::integrate(
            [&](double t) {
                return oracle::phi_pdf(t) * bvn_cdf((b1 - r01 * t) / std::sqrt(v1),
                                                    (b2 - r02 * t) / std::sqrt(v2), c12);
            },
            -40.0, b0, 160);
        const auto got = mvn_cdf({b0, b1, b2}, cm, 1e-9, 7 + it);
        CHECK(std::fabs(got.value - ref) <= 3.0 * got.error_estimate + 1e-9);
    }
}

TEST_CASE("mvn_cdf monotone in each coordinate and permutation symmetric") {
    oracle::TestRng rng(4242);
    Eigen::MatrixXd s = random_corr(4, rng);
    CorrelationMatrix cm(s);
    std::vector<double> b{0.3, -0.4, 1.1, 0.0};
    const auto base = mvn_cdf(b, cm, 1e-7, 3);
    for (int i = 0; i < 4; ++i) {
        auto bb = b;
        bb[i] += 0.25;
        const auto hi = mvn_cdf(bb, cm, 1e-7, 3);
        CHECK(hi.value + hi.error_estimate + base.error_estimate >= base.value);
    }
    // permute coordinates (3 1 0 2) together with the matrix
    std::vector<int> perm{3, 1, 0, 2};
    Eigen::MatrixXd sp(4, 4);
    std::vector<double> bp(4);
    for (int i = 0; i < 4; ++i) {
        bp[i] = b[perm[i]];
        for (int j = 0; j < 4; ++j) sp(i, j) = s(perm[i], perm[j]);
    }
    const auto permuted = mvn_cdf(bp, CorrelationMatrix(sp), 1e-7, 99);
    CHECK(std::fabs(permuted.value - base.value) <=
          3.0 * (permuted.error_estimate + base.error_estimate) + 1e-12);
}

TEST_CASE("mvn_cdf determinism and honest non-convergence") {
    Eigen::MatrixXd m(3, 3);
    m << 1, 0.6, 0.3, 0.6, 1, 0.5, 0.3, 0.5, 1;
    CorrelationMatrix cm(m);
    const auto a = mvn_cdf({0.5, 0.2, -0.3}, cm, 1e-8, 321);
    const auto b = mvn_cdf({0.5, 0.2, -0.3}, cm, 1e-8, 321);
    CHECK(a.value == b.value);
    CHECK(a.error_estimate == b.error_estimate);
    CHECK(a.points_used == b.points_used);
    // tiny budget cannot reach an extreme target; flag must be honest
    const auto c = mvn_cdf({0.5, 0.2, -0.3}, cm, 1e-13, 321, 0.0, 1L << 10);
    CHECK_FALSE(c.converged);
    CHECK(c.error_estimate > 1e-13);
}

TEST_CASE("mvn_cdf near-singular correlation stays usable") {
    Eigen::MatrixXd m(3, 3);
    const double w = 1.0 - 1e-9;
    m << 1, w, w, w, 1, w, w, w, 1;
    const auto r = mvn_cdf({0.5, 0.5, 0.5}, CorrelationMatrix(m), 1e-7, 11);
    // all three nearly identical variables: probability ~ Phi(0.5)
    CHECK(std::fabs(r.value - std_normal_cdf(0.5)) < 1e-3);
}
