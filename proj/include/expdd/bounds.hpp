#pragma once
#include <cstddef>
#include <utility>

#include "expdd/divdiff.hpp"
#include "expdd/nodes.hpp"
#include "expdd/scaled_value.hpp"

namespace expdd {

// order n, mean, population variance (divide by n+1) of an order-n multiset
struct SummaryStats {
    std::size_t n = 0;
    double mu = 0.0;
    double sigma2 = 0.0;
};

SummaryStats summary(const NodeMultiset& xs);

// Two-sided envelope factors for n! e^{-mu} exp[x_0..x_n] at fixed mean and
// variance: bound_L <= n! e^{-mu} exp[...] <= bound_M. All-positive series,
// exact value 1 at sigma = 0. n >= 1, sigma >= 0.
double bound_L(std::size_t n, double sigma);
double bound_M(std::size_t n, double sigma);

// second-order expansion of the two bounds: {1 + s^2/2n - s^3/3n^{3/2},
//                                            1 + s^2/2n + s^3/3n^{3/2}}
std::pair<double, double> bound_expansion(std::size_t n, double sigma);

// gamma(n, z) = integral_0^z t^{n-1} e^{-t} dt, n >= 1; z < 0 needs integral n
// (otherwise the integral leaves the real line -> invalid_argument). The plain
// double version saturates to +-inf when z^n e^{-z} overflows.
double lower_incomplete_gamma(double n, double z);
ScaledValue lower_incomplete_gamma_scaled(double n, double z);

// Extremal node multisets at fixed (n, mu, sigma): one spike plus a flat
// level on either side; these attain the matching sandwich bound.
struct ExtremalPair {
    NodeMultiset upper;  // attains the M bound
    NodeMultiset lower;  // attains the L bound
};
ExtremalPair extremal_config(std::size_t n, double mu, double sigma);

struct SandwichReport {
    ScaledValue lower;  // e^mu L_n
    ScaledValue value;  // n! exp[x_0..x_n]
    ScaledValue upper;  // e^mu M_n
    double slack_lower = 0.0;  // log value - log lower, >= 0 up to tolerance
    double slack_upper = 0.0;  // log upper - log value
    bool pass = false;
};
SandwichReport sandwich_check(const NodeMultiset& xs, double tol = 1e-10);

// e^{mu + sigma^2/(2n)}: the large-n limit of n! exp[x_0..x_n]
ScaledValue asymptotic_estimate(const SummaryStats& stats);

}  // namespace expdd
