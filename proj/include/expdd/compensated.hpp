#pragma once
#include <cmath>

// Double-double building blocks. A DD holds an unevaluated sum hi + lo with
// |lo| <= ulp(hi)/2, giving ~31 decimal digits. Only the operations the
// engine actually needs are provided.

namespace expdd {

struct DD {
    double hi = 0.0;
    double lo = 0.0;
};

// s + err == a + b exactly, no magnitude precondition. 6 flops.
inline DD two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

// requires |a| >= |b| or a == 0. 3 flops.
inline DD quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

// p + err == a * b exactly.
inline DD two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline DD dd_from(double a) { return {a, 0.0}; }

inline double dd_to_double(const DD& a) { return a.hi + a.lo; }

inline DD dd_neg(const DD& a) { return {-a.hi, -a.lo}; }

inline DD dd_add(const DD& a, const DD& b) {
    DD s = two_sum(a.hi, b.hi);
    DD t = two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline DD dd_add(const DD& a, double b) {
    DD s = two_sum(a.hi, b);
    s.lo += a.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline DD dd_sub(const DD& a, const DD& b) { return dd_add(a, dd_neg(b)); }

inline DD dd_mul(const DD& a, const DD& b) {
    DD p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
}

inline DD dd_mul(const DD& a, double b) {
    DD p = two_prod(a.hi, b);
    p.lo += a.lo * b;
    return quick_two_sum(p.hi, p.lo);
}

// full-precision quotient: three corrected single divisions
inline DD dd_div(const DD& a, const DD& b) {
    double q1 = a.hi / b.hi;
    DD r = dd_sub(a, dd_mul(b, q1));
    double q2 = r.hi / b.hi;
    r = dd_sub(r, dd_mul(b, q2));
    double q3 = r.hi / b.hi;
    DD q = quick_two_sum(q1, q2);
    return dd_add(q, q3);
}

inline DD dd_div(const DD& a, double b) { return dd_div(a, dd_from(b)); }

// quotient of two exact doubles to dd precision
inline DD dd_ratio(double a, double b) { return dd_div(dd_from(a), dd_from(b)); }

}  // namespace expdd
