#include "esnx/simplex_quad.hpp"

#include <cmath>

#include "esnx/errors.hpp"
#include "esnx/normal.hpp"

namespace esnx {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

namespace {

double d2_integral(const SkewHrModel& model, int panels, int moment_coord) {
    if (model.dim() != 2) throw domain_error("angular quadrature: model must be bivariate");
    std::vector<double> xs, ws;
    gauss_legendre(20, xs, ws);
    const double s_lo = -8.5, s_hi = 8.5;
    const double hpanel = (s_hi - s_lo) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = s_lo + p * hpanel;
        double acc = 0.0;
        for (int q = 0; q < 20; ++q) {
            const double s = a + 0.5 * hpanel * (xs[q] + 1.0);
            const double w1 = std_normal_cdf(s);
            if (w1 <= 0.0 || w1 >= 1.0) continue;
            double v = model.angular_density_h({w1, 1.0 - w1}) * std_normal_pdf(s);
            if (moment_coord == 0) v *= w1;
            if (moment_coord == 1) v *= 1.0 - w1;
            acc += ws[q] * v;
        }
        total += acc * 0.5 * hpanel;
    }
    return total;
}

double d3_integral(const SkewHrModel& model, int n, int moment_coord) {
    if (model.dim() != 3) throw domain_error("angular quadrature: model must be trivariate");
    std::vector<double> xs, ws;
    gauss_legendre(n, xs, ws);
    double total = 0.0;
    for (int a = 0; a < n; ++a) {
        const double s = 0.5 * (xs[a] + 1.0);  // radial Duffy coordinate
        if (s <= 0.0 || s >= 1.0) continue;
        double inner = 0.0;
        for (int b = 0; b < n; ++b) {
            const double t = 0.5 * (xs[b] + 1.0);
            const double w1 = s * (1.0 - t), w2 = s * t, w3 = 1.0 - s;
            if (w1 <= 0.0 || w2 <= 0.0 || w3 <= 0.0) continue;
            double v = model.angular_density_h({w1, w2, w3});
            if (moment_coord == 0) v *= w1;
            if (moment_coord == 1) v *= w2;
            if (moment_coord == 2) v *= w3;
            inner += ws[b] * v;
        }
        total += ws[a] * inner * s;  // Duffy jacobian
    }
    return total * 0.25;  // both [-1,1] -> [0,1] maps
}

}  // namespace

double angular_mass_d2(const SkewHrModel& model, int panels) { return d2_integral(model, panels, -1); }
double angular_moment_d2(const SkewHrModel& model, int coord, int panels) {
    return d2_integral(model, panels, coord);
}
double angular_mass_d3(const SkewHrModel& model, int n) { return d3_integral(model, n, -1); }
double angular_moment_d3(const SkewHrModel& model, int coord, int n) {
    return d3_integral(model, n, coord);
}

}  // namespace esnx
