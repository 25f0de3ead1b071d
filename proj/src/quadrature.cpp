#include "expdd/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace expdd {

// Newton on the Legendre three-term recurrence, cos-asymptotic start.
QuadratureRule gauss_legendre(std::size_t n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
    QuadratureRule rule;
    rule.x.assign(n, 0.0);
    rule.w.assign(n, 0.0);
    std::size_t m = (n + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                double p2 = p1;
                p1 = p0;
                double kk = static_cast<double>(k);
                p0 = ((2.0 * kk + 1.0) * x * p1 - kk * p2) / (kk + 1.0);
            }
            dp = static_cast<double>(n) * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        rule.x[i] = -x;
        rule.x[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.w[i] = w;
        rule.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.x[n / 2] = 0.0;  // symmetric rule, kill the iteration residue
    return rule;
}

}  // namespace expdd
