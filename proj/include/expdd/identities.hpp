#pragma once
#include <cstddef>
#include <span>

namespace expdd {

// Exact-identity residual: the two sides evaluated independently through the
// engine, with rel_residual = |lhs-rhs| / max(|lhs|, |rhs|, scale, floor).
// For identities that combine terms of mixed sign, scale is the magnitude sum
// of those terms: an instance whose sides cancel far below their summands
// (e.g. the product rule at t1 ~ -t2) is then reported as the roundoff it is,
// not as disagreement. The floor (smallest normal * 1e10) keeps an
// identically-zero identity from dividing by zero.
struct Residual {
    double lhs = 0.0;
    double rhs = 0.0;
    double abs_residual = 0.0;
    double rel_residual = 0.0;
    bool pass = false;
};

// Every operation takes the node sequence in caller order; x_0 is the first
// element. The dd values themselves are order-invariant, but the identities
// single out x_0 (and x_1..x_q as the tail), so tests rotate the sequence.

// integral_0^beta e^{-tau[x_{j+1}..x_q]} e^{-(beta-tau)[x_0..x_j]} dtau
//   = -e^{-beta[x_0..x_q]},   0 <= j <= q-1, beta >= 0
Residual convolution_residual(std::span<const double> xs, std::size_t j, double beta,
                              std::size_t quad_points = 64, double tol = 1e-8);

// sum_j e^{-tau[x_0..x_q, x_j]} = -tau e^{-tau[x_0..x_q]}
Residual repeated_sum_residual(std::span<const double> xs, double tau, double tol = 1e-8);

// sum_j x_j e^{-tau[x_0..x_q, x_j]} = (-x_0 tau - q) e^{-tau[x_0..x_q]}
//   - tau e^{-tau[x_1..x_q]}   (q > 0; the q = 0 case degenerates to
//   x_0 e^{-tau[x_0, x_0]} = -tau x_0 e^{-tau x_0})
Residual weighted_sum_residual(std::span<const double> xs, double tau, double tol = 1e-8);

// central difference of tau -> e^{-tau[x_0..x_q]} against the closed form
// -x_0 e^{-tau[x_0..x_q]} - e^{-tau[x_1..x_q]}; q >= 1
Residual parametric_derivative_residual(std::span<const double> xs, double tau,
                                        double fd_step = 1e-5, double tol = 1e-7);

// sum_{i<=j} x_i e^{-tau[x_0..x_q, x_i, x_j]} = (tau^2 x_0/2) e^{-tau[x_0..x_q]}
//   + (tau^2/2) e^{-tau[x_1..x_q]} - sum_{i=1}^q i e^{-tau[x_0..x_q, x_i]}  (q > 0;
//   q = 0 keeps only the first right-hand term)
Residual double_sum_residual(std::span<const double> xs, double tau, double tol = 1e-8);

// e^{(t1+t2)[x_0..x_q]} = sum_j e^{t1[x_0..x_j]} e^{t2[x_j..x_q]}
Residual leibniz_residual(std::span<const double> xs, double t1, double t2,
                          double tol = 1e-8);

// alpha^q e^{t[alpha x_0..alpha x_q]} = e^{(alpha t)[x_0..x_q]}, alpha != 0
Residual rescaling_residual(std::span<const double> xs, double t, double alpha,
                            double tol = 1e-8);

}  // namespace expdd
