#include "expdd/identities.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "expdd/divdiff.hpp"
#include "expdd/nodes.hpp"
#include "expdd/quadrature.hpp"

namespace expdd {
namespace {

constexpr double kFloor = 2.2250738585072014e-308 * 1e10;

double dd_val(std::span<const double> xs, double t) {
    return dd_exp(NodeMultiset(xs), t).value();
}

double dd_val_plus(std::span<const double> xs, double t, double e1) {
    std::vector<double> v(xs.begin(), xs.end());
    v.push_back(e1);
    return dd_exp(NodeMultiset(std::move(v)), t).value();
}

double dd_val_plus2(std::span<const double> xs, double t, double e1, double e2) {
    std::vector<double> v(xs.begin(), xs.end());
    v.push_back(e1);
    v.push_back(e2);
    return dd_exp(NodeMultiset(std::move(v)), t).value();
}

// scale: magnitude sum of the terms each side combines, so an instance whose
// sides cancel far below their summands reads as roundoff, not disagreement
Residual make(double lhs, double rhs, double tol, double scale = 0.0) {
    Residual r;
    r.lhs = lhs;
    r.rhs = rhs;
    r.abs_residual = std::fabs(lhs - rhs);
    r.rel_residual =
        r.abs_residual / std::max({std::fabs(lhs), std::fabs(rhs), scale, kFloor});
    r.pass = r.rel_residual <= tol;
    return r;
}

std::size_t order_of(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("identity: empty node sequence");
    return xs.size() - 1;
}

void check_tau(double tau) {
    if (!std::isfinite(tau)) throw std::domain_error("identity: non-finite parameter");
}

}  // namespace

Residual convolution_residual(std::span<const double> xs, std::size_t j, double beta,
                              std::size_t quad_points, double tol) {
    std::size_t q = order_of(xs);
    check_tau(beta);
    if (q < 1 || j > q - 1)
        throw std::invalid_argument("convolution: need 0 <= j <= q-1 with q >= 1");
    if (beta < 0.0) throw std::invalid_argument("convolution: need beta >= 0");
    if (quad_points < 8) throw std::invalid_argument("convolution: need >= 8 quadrature points");
    auto prefix = xs.first(j + 1);
    auto suffix = xs.subspan(j + 1);
    QuadratureRule rule = gauss_legendre(quad_points);
    double lhs = integrate(rule, 0.0, beta, [&](double tau) {
        return dd_val(suffix, -tau) * dd_val(prefix, -(beta - tau));
    });
    double rhs = -dd_val(xs, -beta);
    return make(lhs, rhs, tol);
}

Residual repeated_sum_residual(std::span<const double> xs, double tau, double tol) {
    std::size_t q = order_of(xs);
    check_tau(tau);
    double lhs = 0.0;
    for (std::size_t k = 0; k <= q; ++k) lhs += dd_val_plus(xs, -tau, xs[k]);
    double rhs = -tau * dd_val(xs, -tau);
    return make(lhs, rhs, tol);
}

Residual weighted_sum_residual(std::span<const double> xs, double tau, double tol) {
    std::size_t q = order_of(xs);
    check_tau(tau);
    double lhs = 0.0, scale = 0.0;
    for (std::size_t k = 0; k <= q; ++k) {
        double term = xs[k] * dd_val_plus(xs, -tau, xs[k]);
        lhs += term;
        scale += std::fabs(term);
    }
    double rhs;
    if (q == 0) {
        rhs = -tau * xs[0] * dd_val(xs, -tau);
        scale += std::fabs(rhs);
    } else {
        double t1 = (-xs[0] * tau - static_cast<double>(q)) * dd_val(xs, -tau);
        double t2 = -tau * dd_val(xs.subspan(1), -tau);
        rhs = t1 + t2;
        scale += std::fabs(t1) + std::fabs(t2);
    }
    return make(lhs, rhs, tol, scale);
}

Residual parametric_derivative_residual(std::span<const double> xs, double tau,
                                        double fd_step, double tol) {
    std::size_t q = order_of(xs);
    check_tau(tau);
    if (q < 1) throw std::invalid_argument("parametric derivative: need q >= 1");
    if (!(fd_step > 0.0) || !std::isfinite(fd_step))
        throw std::invalid_argument("parametric derivative: need fd_step > 0");
    double lhs =
        (dd_val(xs, -(tau + fd_step)) - dd_val(xs, -(tau - fd_step))) / (2.0 * fd_step);
    double f = dd_val(xs, -tau);
    double g = dd_val(xs.subspan(1), -tau);
    double rhs = -xs[0] * f - g;
    double scale = (1.0 + std::fabs(xs[0])) * std::fabs(f) + std::fabs(g);
    return make(lhs, rhs, tol, scale);
}

Residual double_sum_residual(std::span<const double> xs, double tau, double tol) {
    std::size_t q = order_of(xs);
    check_tau(tau);
    double lhs = 0.0, scale = 0.0;
    for (std::size_t i = 0; i <= q; ++i)
        for (std::size_t j = i; j <= q; ++j) {
            double term = xs[i] * dd_val_plus2(xs, -tau, xs[i], xs[j]);
            lhs += term;
            scale += std::fabs(term);
        }
    double rhs = 0.5 * tau * tau * xs[0] * dd_val(xs, -tau);
    scale += std::fabs(rhs);
    if (q > 0) {
        double t2 = 0.5 * tau * tau * dd_val(xs.subspan(1), -tau);
        rhs += t2;
        scale += std::fabs(t2);
        for (std::size_t i = 1; i <= q; ++i) {
            double term = static_cast<double>(i) * dd_val_plus(xs, -tau, xs[i]);
            rhs -= term;
            scale += std::fabs(term);
        }
    }
    return make(lhs, rhs, tol, scale);
}

Residual leibniz_residual(std::span<const double> xs, double t1, double t2, double tol) {
    std::size_t q = order_of(xs);
    check_tau(t1);
    check_tau(t2);
    double lhs = dd_val(xs, t1 + t2);
    double rhs = 0.0, scale = 0.0;
    for (std::size_t j = 0; j <= q; ++j) {
        double term = dd_val(xs.first(j + 1), t1) * dd_val(xs.subspan(j), t2);
        rhs += term;
        scale += std::fabs(term);
    }
    return make(lhs, rhs, tol, scale);
}

Residual rescaling_residual(std::span<const double> xs, double t, double alpha, double tol) {
    std::size_t q = order_of(xs);
    check_tau(t);
    if (alpha == 0.0 || !std::isfinite(alpha))
        throw std::invalid_argument("rescaling: need alpha != 0");
    std::vector<double> scaled(xs.begin(), xs.end());
    for (auto& v : scaled) v *= alpha;
    double lhs = std::pow(alpha, static_cast<double>(q)) * dd_val(scaled, t);
    double rhs = dd_val(xs, alpha * t);
    return make(lhs, rhs, tol);
}

}  // namespace expdd
