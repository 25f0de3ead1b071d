#include "expdd/inequalities.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <stdexcept>

namespace expdd {
namespace {

void check_finite(std::initializer_list<double> vs, const char* who) {
    for (double v : vs)
        if (!std::isfinite(v)) throw std::domain_error(std::string(who) + ": non-finite input");
}

NodeMultiset kernel_multiset(const KernelSpec& spec, double x, double y) {
    if (spec.p < 1 || spec.q < 1)
        throw std::invalid_argument("kernel: multiplicities must be >= 1");
    check_finite({x, y}, "kernel");
    std::vector<double> nodes = spec.prefix;
    nodes.insert(nodes.end(), static_cast<std::size_t>(spec.p), x);
    nodes.insert(nodes.end(), static_cast<std::size_t>(spec.q), y);
    return NodeMultiset(std::move(nodes));
}

void check_rect(double x1, double x2, double y1, double y2, const char* who) {
    check_finite({x1, x2, y1, y2}, who);
    if (!(x1 <= x2) || !(y1 <= y2))
        throw std::invalid_argument(std::string(who) + ": rectangle must satisfy x1 <= x2, y1 <= y2");
}

// u^{2k} 2k/(2k+1)! for k = 1..9; at |u| < 1/2 the k = 10 term is below 1e-26
const std::array<double, 9>& phi_coeffs() {
    static const std::array<double, 9> c = [] {
        std::array<double, 9> a{};
        double fact = 1.0;  // (2k+1)!
        for (int k = 1; k <= 9; ++k) {
            fact *= (2.0 * k) * (2.0 * k + 1.0);
            a[k - 1] = 2.0 * k / fact;
        }
        return a;
    }();
    return c;
}

struct Rebased {
    double m11, m12, m21, m22, shift;
};

Rebased rebase4(const ScaledValue& k11, const ScaledValue& k12, const ScaledValue& k21,
                const ScaledValue& k22) {
    double s = std::max(std::max(k11.shift(), k12.shift()),
                        std::max(k21.shift(), k22.shift()));
    auto m = [s](const ScaledValue& v) { return v.mantissa() * std::exp(v.shift() - s); };
    return {m(k11), m(k12), m(k21), m(k22), s};
}

Margin fourpoint_core(double a, double b, double c, double d, double tol) {
    check_finite({a, b, c, d}, "four_point_f");
    auto K4 = [](double w, double x, double y, double z) {
        return dd_exp(NodeMultiset(std::vector<double>{w, x, y, z}), 1.0);
    };
    ScaledValue P1 = K4(a, a, b, c) * K4(d, d, b, c);
    ScaledValue P2 = K4(b, b, a, d) * K4(c, c, a, d);
    ScaledValue mid = K4(a, b, c, d);
    ScaledValue P3 = mid * mid;
    double s = std::max(std::max(P1.shift(), P2.shift()), P3.shift());
    auto m = [s](const ScaledValue& v) { return v.mantissa() * std::exp(v.shift() - s); };
    double p1 = m(P1), p2 = m(P2), p3 = m(P3);
    Margin r;
    r.kind = MarginKind::fourpoint;
    r.value = (p1 + p2) - p3;
    r.scale = p3;
    r.shift = s;
    r.inputs = {a, b, c, d};
    r.pass = r.value >= -tol * r.scale;
    return r;
}

}  // namespace

const char* margin_kind_name(MarginKind k) {
    switch (k) {
        case MarginKind::tn2: return "tn2";
        case MarginKind::supermodular: return "supermodular";
        case MarginKind::fourpoint: return "fourpoint";
        case MarginKind::triangle: return "triangle";
        case MarginKind::phi_product: return "phiproduct";
        case MarginKind::h_product: return "hproduct";
    }
    return "?";
}

ScaledValue kernel_eval(const KernelSpec& spec, double x, double y) {
    return dd_exp(kernel_multiset(spec, x, y), 1.0);
}

Margin tn2_margin(const KernelSpec& spec, double x1, double x2, double y1, double y2,
                  double tol) {
    check_rect(x1, x2, y1, y2, "tn2_margin");
    double l11 = kernel_eval(spec, x1, y1).log_abs();
    double l12 = kernel_eval(spec, x1, y2).log_abs();
    double l21 = kernel_eval(spec, x2, y1).log_abs();
    double l22 = kernel_eval(spec, x2, y2).log_abs();
    Margin r;
    r.kind = MarginKind::tn2;
    // grouping chosen so either degenerate rectangle cancels bitwise:
    // x1 == x2 pairs l12 with l22 and l21 with l11; otherwise pair by row
    r.value = (x1 == x2) ? (l12 - l22) + (l21 - l11) : (l12 - l11) + (l21 - l22);
    r.scale = 1.0;  // log-domain margin, absolute tolerance
    r.inputs = {x1, x2, y1, y2};
    r.pass = r.value >= -tol;
    return r;
}

Margin supermodular_margin(const KernelSpec& spec, double x1, double x2, double y1, double y2,
                           double tol) {
    check_rect(x1, x2, y1, y2, "supermodular_margin");
    Rebased m = rebase4(kernel_eval(spec, x1, y1), kernel_eval(spec, x1, y2),
                        kernel_eval(spec, x2, y1), kernel_eval(spec, x2, y2));
    Margin r;
    r.kind = MarginKind::supermodular;
    r.value = (m.m11 + m.m22) - (m.m12 + m.m21);
    r.scale = std::max(std::max(std::fabs(m.m11), std::fabs(m.m12)),
                       std::max(std::fabs(m.m21), std::fabs(m.m22)));
    r.shift = m.shift;
    r.inputs = {x1, x2, y1, y2};
    r.pass = r.value >= -tol * r.scale;
    return r;
}

Margin four_point_f(double a, double b, double c, double d, double tol) {
    if (!(a <= b && b <= c && c <= d))
        throw std::invalid_argument("four_point_f: need a <= b <= c <= d");
    return fourpoint_core(a, b, c, d, tol);
}

Margin four_point_f_any_order(double a, double b, double c, double d, double tol) {
    // canonicalize: the grouping of factors depends on the sort order, so this
    // is what makes the result a function of the multiset alone
    std::array<double, 4> v{a, b, c, d};
    std::sort(v.begin(), v.end());
    return fourpoint_core(v[0], v[1], v[2], v[3], tol);
}

double four_point_f_h_form(double a, double b, double c, double d) {
    check_finite({a, b, c, d}, "four_point_f_h_form");
    double den = 2.0 * (a - b) * (a - c) * (b - d) * (c - d);
    if (den == 0.0)
        throw std::invalid_argument("four_point_f_h_form: needs nonzero pair gaps");
    double num = h_fn(a, c) * h_fn(b, d) + h_fn(a, b) * h_fn(c, d) - h_fn(b, c) * h_fn(a, d);
    return num / den;
}

double phi(double u) {
    double a = std::fabs(u);
    if (a < 0.5) {
        const auto& c = phi_coeffs();
        double u2 = u * u;
        double s = c[8];
        for (int k = 7; k >= 0; --k) s = c[k] + u2 * s;
        return u2 * s;  // exactly 0 at u = 0
    }
    return std::cosh(u) - std::sinh(u) / u;
}

double h_fn(double x, double y) {
    return 2.0 * std::exp(0.5 * (x + y)) * phi(0.5 * (x - y));
}

Margin triangle_h_margin(double a, double b, double c, double tol) {
    check_finite({a, b, c}, "triangle_h_margin");
    if (!(a <= b && b <= c))
        throw std::invalid_argument("triangle_h_margin: need a <= b <= c");
    double h13 = h_fn(a, c), h12 = h_fn(a, b), h23 = h_fn(b, c);
    Margin r;
    r.kind = MarginKind::triangle;
    r.value = (h13 - h12) - h23;
    r.scale = std::max(std::fabs(h13), std::max(std::fabs(h12), std::fabs(h23)));
    r.inputs = {a, b, c};
    r.pass = r.value >= -tol * r.scale;
    return r;
}

Margin phi_product_margin(double x, double y, double z, double tol) {
    check_finite({x, y, z}, "phi_product_margin");
    if (!(x >= 0.0 && y >= 0.0 && z >= 0.0))
        throw std::invalid_argument("phi_product_margin: need x, y, z >= 0");
    double t1 = phi(x + y) * phi(y + z);
    double t2 = phi(x) * phi(z);
    double t3 = phi(y) * phi(x + y + z);
    Margin r;
    r.kind = MarginKind::phi_product;
    r.value = (t1 - t2) - t3;
    r.scale = std::max(std::fabs(t1), std::max(std::fabs(t2), std::fabs(t3)));
    r.inputs = {x, y, z};
    r.pass = r.value >= -tol * r.scale;
    return r;
}

Margin h_product_margin(double a, double b, double c, double d, double tol) {
    check_finite({a, b, c, d}, "h_product_margin");
    if (!(a < b && b < c && c < d))
        throw std::invalid_argument("h_product_margin: need a < b < c < d");
    double t1 = h_fn(a, c) * h_fn(b, d);
    double t2 = h_fn(a, b) * h_fn(c, d);
    double t3 = h_fn(b, c) * h_fn(a, d);
    Margin r;
    r.kind = MarginKind::h_product;
    r.value = (t1 - t2) - t3;
    r.scale = std::max(std::fabs(t1), std::max(std::fabs(t2), std::fabs(t3)));
    r.inputs = {a, b, c, d};
    r.pass = r.value >= -tol * r.scale;
    return r;
}

}  // namespace expdd
