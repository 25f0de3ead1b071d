#include "expdd/oracle.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "expdd/compensated.hpp"
#include "expdd/divdiff.hpp"

namespace expdd {
namespace {

constexpr auto RN = MPFR_RNDN;

class MpReal {
  public:
    explicit MpReal(mpfr_prec_t prec) {
        mpfr_init2(v_, prec);
        mpfr_set_zero(v_, 1);
    }
    MpReal(const MpReal&) = delete;
    MpReal& operator=(const MpReal&) = delete;
    ~MpReal() { mpfr_clear(v_); }
    mpfr_ptr p() { return v_; }
    mpfr_srcptr p() const { return v_; }

  private:
    mpfr_t v_;
};

class MpVec {
  public:
    MpVec(std::size_t n, mpfr_prec_t prec) : v_(n) {
        for (auto& x : v_) mpfr_init2(&x, prec);
    }
    MpVec(const MpVec&) = delete;
    MpVec& operator=(const MpVec&) = delete;
    ~MpVec() {
        for (auto& x : v_) mpfr_clear(&x);
    }
    mpfr_ptr operator[](std::size_t i) { return &v_[i]; }

  private:
    std::vector<__mpfr_struct> v_;
};

void exp_tx(mpfr_ptr out, mpfr_srcptr t, double x) {
    mpfr_set_d(out, x, RN);
    mpfr_mul(out, out, t, RN);
    mpfr_exp(out, out, RN);
}

// classic confluent Newton table over sorted nodes; result written to out
void newton_into(const std::vector<double>& x, double t, mpfr_prec_t prec, mpfr_ptr out) {
    std::size_t n = x.size();
    MpVec tab(n, prec);
    MpReal tt(prec), num(prec), den(prec);
    mpfr_set_d(tt.p(), t, RN);
    for (std::size_t i = 0; i < n; ++i) exp_tx(tab[i], tt.p(), x[i]);
    for (std::size_t l = 1; l < n; ++l) {
        for (std::size_t i = 0; i + l < n; ++i) {
            if (x[i + l] == x[i]) {
                // sorted window of equal nodes: t^l e^{t x_i}/l!
                exp_tx(num.p(), tt.p(), x[i]);
                mpfr_pow_ui(den.p(), tt.p(), static_cast<unsigned long>(l), RN);
                mpfr_mul(num.p(), num.p(), den.p(), RN);
                mpfr_fac_ui(den.p(), static_cast<unsigned long>(l), RN);
                mpfr_div(tab[i], num.p(), den.p(), RN);
            } else {
                mpfr_sub(num.p(), tab[i + 1], tab[i], RN);
                mpfr_set_d(den.p(), x[i + l], RN);
                mpfr_sub_d(den.p(), den.p(), x[i], RN);
                mpfr_div(tab[i], num.p(), den.p(), RN);
            }
        }
    }
    mpfr_set(out, tab[0], RN);
}

ScaledValue to_scaled(mpfr_srcptr v) {
    if (mpfr_zero_p(v)) return ScaledValue::zero();
    long e2 = 0;
    double d = mpfr_get_d_2exp(&e2, v, RN);
    return ScaledValue(d, static_cast<double>(e2) * 0.6931471805599453);
}

void check_bits(long bits) {
    if (bits < 64) throw std::invalid_argument("oracle: need precision_bits >= 64");
}

std::vector<double> kernel_nodes(std::span<const double> prefix, int p, int q, double x,
                                 double y) {
    if (p < 1 || q < 1) throw std::invalid_argument("kernel: multiplicities must be >= 1");
    std::vector<double> nodes(prefix.begin(), prefix.end());
    nodes.insert(nodes.end(), static_cast<std::size_t>(p), x);
    nodes.insert(nodes.end(), static_cast<std::size_t>(q), y);
    std::sort(nodes.begin(), nodes.end());
    return nodes;
}

// phi(u) = cosh u - sinh u / u, even, phi(0) = 0
void phi_into(mpfr_ptr out, mpfr_srcptr u, mpfr_prec_t prec) {
    if (mpfr_zero_p(u)) {
        mpfr_set_zero(out, 1);
        return;
    }
    MpReal sh(prec), ch(prec);
    mpfr_sinh_cosh(sh.p(), ch.p(), u, RN);
    mpfr_div(sh.p(), sh.p(), u, RN);
    mpfr_sub(out, ch.p(), sh.p(), RN);
}

// h(x, y) = 2 e^{(x+y)/2} phi((x-y)/2)
void h_into(mpfr_ptr out, double x, double y, mpfr_prec_t prec) {
    MpReal u(prec), e(prec);
    mpfr_set_d(u.p(), x, RN);
    mpfr_sub_d(u.p(), u.p(), y, RN);
    mpfr_div_ui(u.p(), u.p(), 2, RN);
    phi_into(out, u.p(), prec);
    mpfr_set_d(e.p(), x, RN);
    mpfr_add_d(e.p(), e.p(), y, RN);
    mpfr_div_ui(e.p(), e.p(), 2, RN);
    mpfr_exp(e.p(), e.p(), RN);
    mpfr_mul(out, out, e.p(), RN);
    mpfr_mul_ui(out, out, 2, RN);
}

struct CacheFree {
    ~CacheFree() { mpfr_free_cache(); }
};

}  // namespace

void simplex_sample(const CounterRng& rng, std::uint64_t base, std::span<double> lambda) {
    double S = 0.0;
    for (std::size_t k = 0; k < lambda.size(); ++k) {
        double e = -std::log1p(-rng.unit(base + k));  // Exp(1) from a [0,1) draw
        lambda[k] = e;
        S += e;
    }
    if (S == 0.0) {
        std::fill(lambda.begin(), lambda.end(), 1.0 / static_cast<double>(lambda.size()));
        return;
    }
    for (auto& l : lambda) l /= S;
}

namespace {

Estimate hg_core(const NodeMultiset& xs, std::uint64_t samples, std::uint64_t seed, double t,
                 bool parallel) {
    if (samples == 0) throw std::invalid_argument("hg oracle: samples must be >= 1");
    if (!std::isfinite(t)) throw std::domain_error("hg oracle: non-finite t");
    (void)xs.order();
    Centered c = shift_normalize(xs);
    const std::size_t n1 = c.y.size();
    const CounterRng rng(seed);
    const std::uint64_t B = 4096;
    const std::uint64_t nb = (samples + B - 1) / B;
    std::vector<DD> bs(nb), b2(nb);

    auto block = [&](std::uint64_t bi) {
        DD s{}, s2{};
        const std::uint64_t lo = bi * B;
        const std::uint64_t hi = std::min<std::uint64_t>(samples, lo + B);
        for (std::uint64_t idx = lo; idx < hi; ++idx) {
            const std::uint64_t base = idx * n1;
            double S = 0.0, dot = 0.0;
            for (std::size_t k = 0; k < n1; ++k) {
                double e = -std::log1p(-rng.unit(base + k));
                S += e;
                dot += e * c.y[k];
            }
            double v = (S == 0.0) ? 1.0 : std::exp(t * (dot / S));
            s = dd_add(s, v);
            s2 = dd_add(s2, v * v);
        }
        bs[bi] = s;
        b2[bi] = s2;
    };

    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (long long bi = 0; bi < static_cast<long long>(nb); ++bi)
            block(static_cast<std::uint64_t>(bi));
    } else {
        for (std::uint64_t bi = 0; bi < nb; ++bi) block(bi);
    }

    DD S{}, S2{};
    for (std::uint64_t bi = 0; bi < nb; ++bi) {  // fixed merge order: thread-count invariant
        S = dd_add(S, bs[bi]);
        S2 = dd_add(S2, b2[bi]);
    }
    const double N = static_cast<double>(samples);
    double mean_y = dd_to_double(S) / N;
    double var = 0.0;
    if (samples > 1) {
        // S2 - S^2/N with the division done in dd so a constant integrand gives exactly 0
        DD m2 = dd_sub(S2, dd_div(dd_mul(S, S), dd_from(N)));
        var = std::max(0.0, dd_to_double(m2) / (N - 1.0));
    }
    // t^q e^{t mu} / q!; pow on an integer exponent keeps the sign exact
    double pref = std::pow(t, static_cast<double>(n1 - 1)) *
                  std::exp(t * c.mu - std::lgamma(static_cast<double>(n1)));
    Estimate est;
    est.mean = pref * mean_y;
    est.std_error = std::fabs(pref) * std::sqrt(var / N);
    est.samples = samples;
    return est;
}

}  // namespace

Estimate hg_monte_carlo(const NodeMultiset& xs, std::uint64_t samples, std::uint64_t seed,
                        double t) {
    return hg_core(xs, samples, seed, t, true);
}

Estimate hg_monte_carlo_serial(const NodeMultiset& xs, std::uint64_t samples,
                               std::uint64_t seed, double t) {
    return hg_core(xs, samples, seed, t, false);
}

ScaledValue newton_highprec(const NodeMultiset& xs, long precision_bits, double t) {
    check_bits(precision_bits);
    if (!std::isfinite(t)) throw std::domain_error("newton oracle: non-finite t");
    (void)xs.order();
    CacheFree guard;
    MpReal out(precision_bits);
    newton_into(xs.values(), t, precision_bits, out.p());
    return to_scaled(out.p());
}

double newton_rel_diff(const NodeMultiset& xs, double t, long bits_a, long bits_b) {
    check_bits(bits_a);
    check_bits(bits_b);
    (void)xs.order();
    CacheFree guard;
    mpfr_prec_t wide = static_cast<mpfr_prec_t>(std::max(bits_a, bits_b) + 128);
    MpReal a(wide), b(wide), d(wide);
    {
        MpReal tmp(bits_a);
        newton_into(xs.values(), t, bits_a, tmp.p());
        mpfr_set(a.p(), tmp.p(), RN);
    }
    {
        MpReal tmp(bits_b);
        newton_into(xs.values(), t, bits_b, tmp.p());
        mpfr_set(b.p(), tmp.p(), RN);
    }
    if (mpfr_zero_p(b.p())) return mpfr_zero_p(a.p()) ? 0.0 : INFINITY;
    mpfr_sub(d.p(), a.p(), b.p(), RN);
    mpfr_div(d.p(), d.p(), b.p(), RN);
    mpfr_abs(d.p(), d.p(), RN);
    return mpfr_get_d(d.p(), RN);
}

double tn2_margin_highprec(std::span<const double> prefix, int p, int q, double x1, double x2,
                           double y1, double y2, long bits) {
    check_bits(bits);
    CacheFree guard;
    mpfr_prec_t prec = bits;
    MpReal acc(prec);
    auto logk = [&](double x, double y, mpfr_ptr out) {
        newton_into(kernel_nodes(prefix, p, q, x, y), 1.0, prec, out);
        mpfr_log(out, out, RN);
    };
    MpReal l11(prec), l12(prec), l21(prec), l22(prec);
    logk(x1, y1, l11.p());
    logk(x1, y2, l12.p());
    logk(x2, y1, l21.p());
    logk(x2, y2, l22.p());
    mpfr_add(acc.p(), l12.p(), l21.p(), RN);
    mpfr_sub(acc.p(), acc.p(), l11.p(), RN);
    mpfr_sub(acc.p(), acc.p(), l22.p(), RN);
    return mpfr_get_d(acc.p(), RN);
}

double supermodular_margin_highprec(std::span<const double> prefix, int p, int q, double x1,
                                    double x2, double y1, double y2, long bits) {
    check_bits(bits);
    CacheFree guard;
    mpfr_prec_t prec = bits;
    MpReal k11(prec), k12(prec), k21(prec), k22(prec), acc(prec), mx(prec);
    newton_into(kernel_nodes(prefix, p, q, x1, y1), 1.0, prec, k11.p());
    newton_into(kernel_nodes(prefix, p, q, x1, y2), 1.0, prec, k12.p());
    newton_into(kernel_nodes(prefix, p, q, x2, y1), 1.0, prec, k21.p());
    newton_into(kernel_nodes(prefix, p, q, x2, y2), 1.0, prec, k22.p());
    mpfr_add(acc.p(), k11.p(), k22.p(), RN);
    mpfr_sub(acc.p(), acc.p(), k12.p(), RN);
    mpfr_sub(acc.p(), acc.p(), k21.p(), RN);
    mpfr_set(mx.p(), k11.p(), RN);
    for (mpfr_srcptr v : {k12.p(), k21.p(), k22.p()})
        if (mpfr_cmpabs(v, mx.p()) > 0) mpfr_set(mx.p(), v, RN);
    mpfr_abs(mx.p(), mx.p(), RN);
    mpfr_div(acc.p(), acc.p(), mx.p(), RN);
    return mpfr_get_d(acc.p(), RN);
}

double fourpoint_f_highprec(double a, double b, double c, double d, long bits) {
    check_bits(bits);
    CacheFree guard;
    mpfr_prec_t prec = bits;
    auto k4 = [&](double w, double x, double y, double z, mpfr_ptr out) {
        std::vector<double> nodes{w, x, y, z};
        std::sort(nodes.begin(), nodes.end());
        newton_into(nodes, 1.0, prec, out);
    };
    MpReal t1(prec), t2(prec), p1(prec), p2(prec), p3(prec), f(prec);
    k4(a, a, b, c, t1.p());
    k4(d, d, b, c, t2.p());
    mpfr_mul(p1.p(), t1.p(), t2.p(), RN);
    k4(b, b, a, d, t1.p());
    k4(c, c, a, d, t2.p());
    mpfr_mul(p2.p(), t1.p(), t2.p(), RN);
    k4(a, b, c, d, t1.p());
    mpfr_sqr(p3.p(), t1.p(), RN);
    mpfr_add(f.p(), p1.p(), p2.p(), RN);
    mpfr_sub(f.p(), f.p(), p3.p(), RN);
    mpfr_div(f.p(), f.p(), p3.p(), RN);
    return mpfr_get_d(f.p(), RN);
}

double triangle_margin_highprec(double a, double b, double c, long bits) {
    check_bits(bits);
    CacheFree guard;
    mpfr_prec_t prec = bits;
    MpReal h13(prec), h12(prec), h23(prec), acc(prec), mx(prec);
    h_into(h13.p(), a, c, prec);
    h_into(h12.p(), a, b, prec);
    h_into(h23.p(), b, c, prec);
    mpfr_sub(acc.p(), h13.p(), h12.p(), RN);
    mpfr_sub(acc.p(), acc.p(), h23.p(), RN);
    mpfr_set(mx.p(), h13.p(), RN);
    for (mpfr_srcptr v : {h12.p(), h23.p()})
        if (mpfr_cmpabs(v, mx.p()) > 0) mpfr_set(mx.p(), v, RN);
    mpfr_abs(mx.p(), mx.p(), RN);
    if (mpfr_zero_p(mx.p())) return 0.0;
    mpfr_div(acc.p(), acc.p(), mx.p(), RN);
    return mpfr_get_d(acc.p(), RN);
}

double phi_product_highprec(double x, double y, double z, long bits) {
    check_bits(bits);
    CacheFree guard;
    mpfr_prec_t prec = bits;
    MpReal u(prec), pa(prec), pb(prec), t1(prec), t2(prec), t3(prec), acc(prec), mx(prec);
    auto phi_of = [&](double v, mpfr_ptr out) {
        mpfr_set_d(u.p(), v, RN);
        phi_into(out, u.p(), prec);
    };
    phi_of(x + y, pa.p());
    phi_of(y + z, pb.p());
    mpfr_mul(t1.p(), pa.p(), pb.p(), RN);
    phi_of(x, pa.p());
    phi_of(z, pb.p());
    mpfr_mul(t2.p(), pa.p(), pb.p(), RN);
    phi_of(y, pa.p());
    phi_of(x + y + z, pb.p());
    mpfr_mul(t3.p(), pa.p(), pb.p(), RN);
    mpfr_sub(acc.p(), t1.p(), t2.p(), RN);
    mpfr_sub(acc.p(), acc.p(), t3.p(), RN);
    mpfr_set(mx.p(), t1.p(), RN);
    for (mpfr_srcptr v : {t2.p(), t3.p()})
        if (mpfr_cmpabs(v, mx.p()) > 0) mpfr_set(mx.p(), v, RN);
    mpfr_abs(mx.p(), mx.p(), RN);
    if (mpfr_zero_p(mx.p())) return 0.0;
    mpfr_div(acc.p(), acc.p(), mx.p(), RN);
    return mpfr_get_d(acc.p(), RN);
}

double h_product_highprec(double a, double b, double c, double d, long bits) {
    check_bits(bits);
    CacheFree guard;
    mpfr_prec_t prec = bits;
    MpReal ha(prec), hb(prec), t1(prec), t2(prec), t3(prec), acc(prec), mx(prec);
    h_into(ha.p(), a, c, prec);
    h_into(hb.p(), b, d, prec);
    mpfr_mul(t1.p(), ha.p(), hb.p(), RN);
    h_into(ha.p(), a, b, prec);
    h_into(hb.p(), c, d, prec);
    mpfr_mul(t2.p(), ha.p(), hb.p(), RN);
    h_into(ha.p(), b, c, prec);
    h_into(hb.p(), a, d, prec);
    mpfr_mul(t3.p(), ha.p(), hb.p(), RN);
    mpfr_sub(acc.p(), t1.p(), t2.p(), RN);
    mpfr_sub(acc.p(), acc.p(), t3.p(), RN);
    mpfr_set(mx.p(), t1.p(), RN);
    for (mpfr_srcptr v : {t2.p(), t3.p()})
        if (mpfr_cmpabs(v, mx.p()) > 0) mpfr_set(mx.p(), v, RN);
    mpfr_abs(mx.p(), mx.p(), RN);
    if (mpfr_zero_p(mx.p())) return 0.0;
    mpfr_div(acc.p(), acc.p(), mx.p(), RN);
    return mpfr_get_d(acc.p(), RN);
}

SandwichSlacksHP sandwich_slacks_highprec(const NodeMultiset& xs, long bits) {
    check_bits(bits);
    std::size_t n = xs.order();
    SandwichSlacksHP out;
    if (n == 0) return out;
    CacheFree guard;
    mpfr_prec_t prec = bits;
    std::size_t n1 = n + 1;

    MpReal mu(prec), var(prec), tmp(prec), sigma(prec);
    for (std::size_t i = 0; i < n1; ++i) mpfr_add_d(mu.p(), mu.p(), xs[i], RN);
    mpfr_div_ui(mu.p(), mu.p(), static_cast<unsigned long>(n1), RN);
    for (std::size_t i = 0; i < n1; ++i) {
        mpfr_set_d(tmp.p(), xs[i], RN);
        mpfr_sub(tmp.p(), tmp.p(), mu.p(), RN);
        mpfr_sqr(tmp.p(), tmp.p(), RN);
        mpfr_add(var.p(), var.p(), tmp.p(), RN);
    }
    mpfr_div_ui(var.p(), var.p(), static_cast<unsigned long>(n1), RN);
    mpfr_sqrt(sigma.p(), var.p(), RN);

    MpReal a(prec), sq(prec), term(prec), accL(prec), accM(prec), w(prec);
    mpfr_sqrt_ui(sq.p(), static_cast<unsigned long>(n), RN);
    // a = (n+1) sigma / sqrt(n)
    mpfr_mul_ui(a.p(), sigma.p(), static_cast<unsigned long>(n1), RN);
    mpfr_div(a.p(), a.p(), sq.p(), RN);

    if (mpfr_zero_p(sigma.p())) {
        mpfr_set_ui(accL.p(), 1, RN);
        mpfr_set_ui(accM.p(), 1, RN);
    } else {
        // L sum: term_m = e^{-a} a^m/m!, weight n/(n+m)
        mpfr_neg(term.p(), a.p(), RN);
        mpfr_exp(term.p(), term.p(), RN);
        mpfr_set_zero(accL.p(), 1);
        double ad = mpfr_get_d(a.p(), RN);
        for (unsigned long m = 0; m < 2000000; ++m) {
            mpfr_set_ui(w.p(), static_cast<unsigned long>(n), RN);
            mpfr_div_ui(w.p(), w.p(), static_cast<unsigned long>(n + m), RN);
            mpfr_mul(w.p(), w.p(), term.p(), RN);
            mpfr_add(accL.p(), accL.p(), w.p(), RN);
            mpfr_mul(term.p(), term.p(), a.p(), RN);
            mpfr_div_ui(term.p(), term.p(), m + 1, RN);
            if (static_cast<double>(m) > ad &&
                mpfr_get_exp(term.p()) < mpfr_get_exp(accL.p()) - bits - 16)
                break;
        }
        // M sum: term_k = a^k / ((n+1)...(n+k))
        mpfr_set_ui(term.p(), 1, RN);
        mpfr_set_zero(accM.p(), 1);
        for (unsigned long k = 0; k < 2000000; ++k) {
            mpfr_add(accM.p(), accM.p(), term.p(), RN);
            mpfr_mul(term.p(), term.p(), a.p(), RN);
            mpfr_div_ui(term.p(), term.p(), static_cast<unsigned long>(n1 + k), RN);
            if (static_cast<double>(k) > ad &&
                mpfr_get_exp(term.p()) < mpfr_get_exp(accM.p()) - bits - 16)
                break;
        }
        // prefactors e^{+-sigma/sqrt n}
        mpfr_div(tmp.p(), sigma.p(), sq.p(), RN);
        mpfr_exp(w.p(), tmp.p(), RN);
        mpfr_mul(accL.p(), accL.p(), w.p(), RN);
        mpfr_neg(tmp.p(), tmp.p(), RN);
        mpfr_exp(w.p(), tmp.p(), RN);
        mpfr_mul(accM.p(), accM.p(), w.p(), RN);
    }

    MpReal mid(prec);
    newton_into(xs.values(), 1.0, prec, mid.p());
    mpfr_fac_ui(tmp.p(), static_cast<unsigned long>(n), RN);
    mpfr_mul(mid.p(), mid.p(), tmp.p(), RN);
    mpfr_log(mid.p(), mid.p(), RN);
    mpfr_sub(mid.p(), mid.p(), mu.p(), RN);  // log(n! K) - mu

    mpfr_log(accL.p(), accL.p(), RN);
    mpfr_log(accM.p(), accM.p(), RN);
    mpfr_sub(tmp.p(), mid.p(), accL.p(), RN);
    out.lower = mpfr_get_d(tmp.p(), RN);
    mpfr_sub(tmp.p(), accM.p(), mid.p(), RN);
    out.upper = mpfr_get_d(tmp.p(), RN);
    return out;
}

}  // namespace expdd
