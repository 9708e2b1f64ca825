#pragma once

// Test-side oracles, independent of the library's evaluation paths.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

// Standard normal CDF: Marsaglia Taylor series in the bulk, Laplace continued
// fraction for the tails. Agrees with the true value to ~1e-16 absolute.
inline double phi_pdf(double x) { return 0.3989422804014326779 * std::exp(-0.5 * x * x); }

inline double norm_cdf(double x) {
    const double ax = std::fabs(x);
    if (ax < 4.5) {
        double s = x, t = 0.0, b = x;
        const double x2 = x * x;
        for (int i = 3; s != t && i < 500; i += 2) {
            t = s;
            b *= x2 / i;
            s += b;
        }
        return 0.5 + s * phi_pdf(x);
    }
    // Mills continued fraction for the far tail
    double cf = 0.0;
    for (int k = 60; k >= 1; --k) cf = k / (ax + cf);
    const double tail = phi_pdf(ax) / (ax + cf);
    return x > 0.0 ? 1.0 - tail : tail;
}

// composite 20-point Gauss-Legendre on [a, b] with n panels
inline double integrate(const std::function<double(double)>& f, double a, double b, int panels) {
    static const double xs[10] = {0.07652652113349733, 0.2277858511416451, 0.3737060887154196,
                                  0.5108670019508271,  0.6360536807265150, 0.7463319064601508,
                                  0.8391169718222188,  0.9122344282513259, 0.9639719272779138,
                                  0.9931285991850949};
    static const double ws[10] = {0.1527533871307259,  0.1491729864726037, 0.1420961093183821,
                                  0.1316886384491766,  0.1181945319615184, 0.1019301198172404,
                                  0.08327674157670475, 0.06267204833410906, 0.04060142980038694,
                                  0.01761400713915212};
    const double hp = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * hp;
        double acc = 0.0;
        for (int q = 0; q < 10; ++q)
            acc += ws[q] * (f(mid + 0.5 * hp * xs[q]) + f(mid - 0.5 * hp * xs[q]));
        total += acc * 0.5 * hp;
    }
    return total;
}

// tetrachoric series for the bivariate normal CDF; reliable for |rho| <= 0.7
inline double bvn_series(double b1, double b2, double rho) {
    double h1 = 1.0, h2 = 1.0;  // Hermite He_{n-1} values, starting at He_0
    double h1p = b1, h2p = b2;  // He_1
    double term = rho;
    double sum = 0.0;
    double fact = 1.0;
    double he1 = 1.0, he2 = 1.0;
    (void)h1;
    (void)h2;
    (void)h1p;
    (void)h2p;
    double he1_prev = 0.0, he2_prev = 0.0;
    term = 1.0;
    for (int n = 1; n <= 80; ++n) {
        term *= rho;
        fact *= n;
        sum += term / fact * he1 * he2;
        // advance He_n(b) = b He_{n-1} - (n-1) He_{n-2}
        const double he1_next = b1 * he1 - (n - 1) * he1_prev;
        const double he2_next = b2 * he2 - (n - 1) * he2_prev;
        he1_prev = he1;
        he2_prev = he2;
        he1 = he1_next;
        he2 = he2_next;
    }
    return norm_cdf(b1) * norm_cdf(b2) + phi_pdf(b1) * phi_pdf(b2) * sum;
}

// deterministic test-parameter generator (64-bit splitmix)
struct TestRng {
    unsigned long long s;
    explicit TestRng(unsigned long long seed) : s(seed) {}
    double uniform(double lo, double hi) {
        s += 0x9e3779b97f4a7c15ULL;
        unsigned long long z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return lo + (hi - lo) * ((z >> 11) * 0x1.0p-53);
    }
};

}  // namespace oracle
