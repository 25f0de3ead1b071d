#pragma once
#include <span>
#include <string>
#include <vector>

#include "expdd/divdiff.hpp"
#include "expdd/nodes.hpp"
#include "expdd/scaled_value.hpp"

namespace expdd {

// K(x, y) = exp[prefix, x^(p), y^(q)] at t = 1; strictly positive.
struct KernelSpec {
    std::vector<double> prefix;  // may be empty
    int p = 1;
    int q = 1;
};

ScaledValue kernel_eval(const KernelSpec& spec, double x, double y);

enum class MarginKind { tn2, supermodular, fourpoint, triangle, phi_product, h_product };
const char* margin_kind_name(MarginKind k);

// value >= -tol*scale certifies the inequality instance. Log-domain margins
// (tn2) use scale = 1. Linear margins report value and scale in a common
// rescaled unit; `shift` is the log of that rescaling, so the natural-unit
// margin is value * e^shift.
struct Margin {
    MarginKind kind{};
    double value = 0.0;
    double scale = 1.0;
    double shift = 0.0;
    std::vector<double> inputs;
    bool pass = false;
};

// log K(x1,y2) + log K(x2,y1) - log K(x1,y1) - log K(x2,y2) >= 0 on ordered
// rectangles x1 <= x2, y1 <= y2; exactly 0 when x1 == x2 or y1 == y2.
Margin tn2_margin(const KernelSpec& spec, double x1, double x2, double y1, double y2,
                  double tol = 1e-10);

// K(x1,y1) + K(x2,y2) - K(x1,y2) - K(x2,y1) >= 0 on ordered rectangles.
Margin supermodular_margin(const KernelSpec& spec, double x1, double x2, double y1, double y2,
                           double tol = 1e-10);

// f = exp[a,a,b,c] exp[d,d,b,c] + exp[b,b,a,d] exp[c,c,a,d] - exp[a,b,c,d]^2 >= 0
// for a <= b <= c <= d; scale is the rescaled exp[a,b,c,d]^2 term.
Margin four_point_f(double a, double b, double c, double d, double tol = 1e-10);
// same expression without the ordering precondition, for symmetry checks
Margin four_point_f_any_order(double a, double b, double c, double d, double tol = 1e-10);
// the equivalent product-of-h route; finite gaps required, natural units
double four_point_f_h_form(double a, double b, double c, double d);

// phi(u) = cosh u - sinh u/u (even entire function, phi(0) = 0); series
// sum_{k>=1} u^{2k} 2k/(2k+1)! below |u| = 1/2 keeps tiny arguments exact
double phi(double u);
// h(x, y) = 2 e^{(x+y)/2} phi((x-y)/2); h(x, x) = 0
double h_fn(double x, double y);

// h(a,c) - h(a,b) - h(b,c) >= 0 for a <= b <= c, exactly 0 at b = a or b = c;
// equals 2(b-a)(c-b) exp[a,b,b,c]
Margin triangle_h_margin(double a, double b, double c, double tol = 1e-10);

// Q = phi(x+y)phi(y+z) - phi(x)phi(z) - phi(y)phi(x+y+z) >= 0 for x,y,z >= 0,
// exactly 0 on the y = 0 and x = z = 0 faces
Margin phi_product_margin(double x, double y, double z, double tol = 1e-10);

// h(a,c)h(b,d) - h(a,b)h(c,d) - h(b,c)h(a,d) >= 0 for a < b < c < d;
// equals 4 e^{(a+b+c+d)/2} Q((b-a)/2, (c-b)/2, (d-c)/2)
Margin h_product_margin(double a, double b, double c, double d, double tol = 1e-10);

}  // namespace expdd
