#pragma once
#include <cstddef>
#include <vector>

namespace expdd {

struct QuadratureRule {
    std::vector<double> x;  // nodes on [-1, 1], ascending
    std::vector<double> w;  // positive weights summing to 2
};

// Gauss-Legendre rule, exact for polynomials of degree 2n-1. n >= 1.
QuadratureRule gauss_legendre(std::size_t n);

// map to [a, b]: sum w_i * f(x_i)
template <class F>
double integrate(const QuadratureRule& rule, double a, double b, F&& f) {
    double mid = 0.5 * (a + b);
    double half = 0.5 * (b - a);
    double acc = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
        double term = rule.w[i] * f(mid + half * rule.x[i]);
        double y = term - comp;
        double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    return acc * half;
}

}  // namespace expdd
