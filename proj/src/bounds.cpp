#include "expdd/bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "expdd/compensated.hpp"

namespace expdd {
namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr std::size_t kSeriesCap = 100000;

// dd mantissa with explicit base-2 exponent; covers magnitudes double cannot
struct Scaled {
    DD m{};
    long e2 = 0;
};

Scaled renorm(Scaled s) {
    if (s.m.hi == 0.0) return {DD{}, 0};
    int k = std::ilogb(s.m.hi);
    if (k > 512 || k < -512) {
        s.m.hi = std::ldexp(s.m.hi, -k);
        s.m.lo = std::ldexp(s.m.lo, -k);
        s.e2 += k;
    }
    return s;
}

Scaled scaled_from_log(double l) {
    Scaled s;
    s.e2 = static_cast<long>(std::floor(l / kLn2));
    s.m = dd_from(std::exp(l - static_cast<double>(s.e2) * kLn2));
    return s;
}

Scaled scaled_mul(Scaled a, const DD& b) {
    a.m = dd_mul(a.m, b);
    return renorm(a);
}

Scaled scaled_add(Scaled a, Scaled b) {
    if (a.m.hi == 0.0) return b;
    if (b.m.hi == 0.0) return a;
    if (a.e2 < b.e2) std::swap(a, b);
    long d = b.e2 - a.e2;
    double sc = (d < -1200) ? 0.0 : std::ldexp(1.0, static_cast<int>(d));
    a.m = dd_add(a.m, dd_mul(b.m, sc));
    return renorm(a);
}

double scaled_log2(const Scaled& s) {
    return std::log2(std::fabs(s.m.hi)) + static_cast<double>(s.e2);
}

double scaled_to_double(const Scaled& s) {
    return std::ldexp(dd_to_double(s.m), static_cast<int>(std::max<long>(
                                             std::min<long>(s.e2, 1 << 20), -(1 << 20))));
}

// z^p for integer p >= 0 by binary exponentiation, dd mantissa throughout
Scaled scaled_ipow(double z, unsigned long p) {
    Scaled acc{dd_from(1.0), 0};
    Scaled base{dd_from(z), 0};
    while (p) {
        if (p & 1) {
            acc.m = dd_mul(acc.m, base.m);
            acc.e2 += base.e2;
            acc = renorm(acc);
        }
        base.m = dd_mul(base.m, base.m);
        base.e2 *= 2;
        base = renorm(base);
        p >>= 1;
    }
    return acc;
}

void check_sigma(double sigma) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("bounds: sigma must be finite and >= 0");
}

}  // namespace

SummaryStats summary(const NodeMultiset& xs) {
    SummaryStats st;
    st.n = xs.order();
    Centered c = shift_normalize(xs);
    st.mu = c.mu;
    double s = 0.0, comp = 0.0;
    for (double y : c.y) {
        double v = y * y;
        double t = s + v;
        comp += (std::fabs(s) >= v) ? ((s - t) + v) : ((v - t) + s);
        s = t;
    }
    st.sigma2 = (s + comp) / static_cast<double>(xs.size());
    return st;
}

double bound_L(std::size_t n, double sigma) {
    if (n < 1) throw std::invalid_argument("bound_L: need n >= 1");
    check_sigma(sigma);
    if (sigma == 0.0) return 1.0;
    double sn = std::sqrt(static_cast<double>(n));
    double a = (static_cast<double>(n) + 1.0) * sigma / sn;

    Scaled term = scaled_from_log(-a);  // e^{-a} a^m / m!
    Scaled sum{};
    for (std::size_t m = 0; m < kSeriesCap; ++m) {
        DD w = dd_ratio(static_cast<double>(n), static_cast<double>(n + m));
        sum = scaled_add(sum, scaled_mul(term, w));
        term = scaled_mul(term, dd_ratio(a, static_cast<double>(m) + 1.0));
        if (static_cast<double>(m) > a && scaled_log2(term) < scaled_log2(sum) - 54.0)
            return std::exp(sigma / sn) * scaled_to_double(sum);
    }
    throw std::runtime_error("bound_L: series did not converge");
}

double bound_M(std::size_t n, double sigma) {
    if (n < 1) throw std::invalid_argument("bound_M: need n >= 1");
    check_sigma(sigma);
    if (sigma == 0.0) return 1.0;
    double sn = std::sqrt(static_cast<double>(n));
    double a = (static_cast<double>(n) + 1.0) * sigma / sn;

    Scaled term{dd_from(1.0), 0};  // a^k / ((n+1)...(n+k))
    Scaled sum{};
    for (std::size_t k = 0; k < kSeriesCap; ++k) {
        sum = scaled_add(sum, term);
        term = scaled_mul(term, dd_ratio(a, static_cast<double>(n + k) + 1.0));
        if (static_cast<double>(k) > a && scaled_log2(term) < scaled_log2(sum) - 54.0)
            return std::exp(-sigma / sn) * scaled_to_double(sum);
    }
    throw std::runtime_error("bound_M: series did not converge");
}

std::pair<double, double> bound_expansion(std::size_t n, double sigma) {
    if (n < 1) throw std::invalid_argument("bound_expansion: need n >= 1");
    check_sigma(sigma);
    double dn = static_cast<double>(n);
    double second = sigma * sigma / (2.0 * dn);
    double third = sigma * sigma * sigma / (3.0 * dn * std::sqrt(dn));
    return {1.0 + second - third, 1.0 + second + third};
}

namespace {

// sign * |gamma| as Scaled plus the sign; shared by the two public variants
std::pair<Scaled, int> incomplete_gamma_core(double n, double z) {
    if (!std::isfinite(n) || n < 1.0)
        throw std::invalid_argument("lower_incomplete_gamma: need n >= 1");
    if (!std::isfinite(z)) throw std::domain_error("lower_incomplete_gamma: non-finite z");
    if (z == 0.0) return {Scaled{}, 0};

    if (z > 0.0) {
        // gamma = z^n e^{-z} sum_k z^k / (n(n+1)...(n+k)); all positive
        Scaled term{dd_div(dd_from(1.0), dd_from(n)), 0};
        Scaled sum{};
        bool done = false;
        for (std::size_t k = 0; k < kSeriesCap && !done; ++k) {
            sum = scaled_add(sum, term);
            term = scaled_mul(term, dd_div(dd_from(z), dd_from(n + static_cast<double>(k) + 1.0)));
            done = static_cast<double>(k) > z && scaled_log2(term) < scaled_log2(sum) - 54.0;
        }
        if (!done) throw std::runtime_error("lower_incomplete_gamma: series did not converge");
        double ni = std::floor(n);
        Scaled pref = scaled_ipow(z, static_cast<unsigned long>(ni));
        double rest = (n - ni) * std::log(z) - z;
        Scaled tail = scaled_from_log(rest);
        pref.m = dd_mul(pref.m, tail.m);
        pref.e2 += tail.e2;
        pref = renorm(pref);
        sum.m = dd_mul(sum.m, pref.m);
        sum.e2 += pref.e2;
        return {renorm(sum), +1};
    }

    // z < 0: gamma(n, -A) = (-1)^n A^n sum_m A^m/(m!(n+m)), real only for integral n
    if (std::floor(n) != n)
        throw std::invalid_argument("lower_incomplete_gamma: z < 0 needs integral n");
    double A = -z;
    Scaled pw{dd_from(1.0), 0};  // A^m/m!
    Scaled sum{};
    bool done = false;
    for (std::size_t m = 0; m < kSeriesCap && !done; ++m) {
        sum = scaled_add(sum, scaled_mul(pw, dd_div(dd_from(1.0), dd_from(n + static_cast<double>(m)))));
        pw = scaled_mul(pw, dd_div(dd_from(A), dd_from(static_cast<double>(m) + 1.0)));
        done = static_cast<double>(m) > A && scaled_log2(pw) < scaled_log2(sum) - 60.0;
    }
    if (!done) throw std::runtime_error("lower_incomplete_gamma: series did not converge");
    Scaled an = scaled_ipow(A, static_cast<unsigned long>(n));
    sum.m = dd_mul(sum.m, an.m);
    sum.e2 += an.e2;
    int sgn = (static_cast<long long>(n) % 2 == 0) ? +1 : -1;
    return {renorm(sum), sgn};
}

}  // namespace

double lower_incomplete_gamma(double n, double z) {
    auto [s, sgn] = incomplete_gamma_core(n, z);
    if (sgn == 0) return 0.0;
    return static_cast<double>(sgn) * scaled_to_double(s);  // may saturate to +-inf
}

ScaledValue lower_incomplete_gamma_scaled(double n, double z) {
    auto [s, sgn] = incomplete_gamma_core(n, z);
    if (sgn == 0) return ScaledValue::zero();
    ScaledValue v(dd_to_double(s.m), static_cast<double>(s.e2) * kLn2);
    return sgn < 0 ? -v : v;
}

ExtremalPair extremal_config(std::size_t n, double mu, double sigma) {
    if (n < 1) throw std::invalid_argument("extremal_config: need n >= 1");
    check_sigma(sigma);
    if (!std::isfinite(mu)) throw std::domain_error("extremal_config: non-finite mu");
    double a0 = std::sqrt(static_cast<double>(n)) * sigma;
    std::vector<double> up(n + 1, mu - a0 / static_cast<double>(n));
    up[0] = mu + a0;
    std::vector<double> lo(n + 1, mu + a0 / static_cast<double>(n));
    lo[0] = mu - a0;
    return {NodeMultiset(std::move(up)), NodeMultiset(std::move(lo))};
}

SandwichReport sandwich_check(const NodeMultiset& xs, double tol) {
    SummaryStats st = summary(xs);
    double sigma = std::sqrt(std::max(0.0, st.sigma2));
    double logL = 0.0, logM = 0.0;
    if (st.n >= 1 && sigma > 0.0) {
        logL = std::log(bound_L(st.n, sigma));
        logM = std::log(bound_M(st.n, sigma));
    }
    double logv = dd_exp_factorial_log(xs, 1.0);
    SandwichReport rep;
    rep.lower = ScaledValue::from_log(st.mu + logL);
    rep.upper = ScaledValue::from_log(st.mu + logM);
    rep.value = dd_exp_factorial(xs, 1.0);
    rep.slack_lower = logv - (st.mu + logL);
    rep.slack_upper = (st.mu + logM) - logv;
    rep.pass = rep.slack_lower >= -tol && rep.slack_upper >= -tol;
    return rep;
}

ScaledValue asymptotic_estimate(const SummaryStats& stats) {
    if (stats.n < 1) throw std::invalid_argument("asymptotic_estimate: need n >= 1");
    return ScaledValue::from_log(stats.mu + stats.sigma2 / (2.0 * static_cast<double>(stats.n)));
}

}  // namespace expdd
