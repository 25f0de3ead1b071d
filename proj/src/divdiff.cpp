#include "expdd/divdiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "expdd/compensated.hpp"

namespace expdd {
namespace {

constexpr double kDirectLimit = 17.0;   // |t|*rhat above this switches to squaring
constexpr std::size_t kMaxRows = 3000;  // series row cap, unreachable for valid input
constexpr std::size_t kSquaringOrderCap = 1024;
constexpr double kShiftedLimit = 600.0;  // |t|*rhat above this needs per-entry shifts

double neumaier(const double* x, std::size_t n) {
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double t = s + x[i];
        if (std::fabs(s) >= std::fabs(x[i]))
            c += (s - t) + x[i];
        else
            c += (x[i] - t) + s;
        s = t;
    }
    return s + c;
}

// Normalized frontier over a node slice:
//   G[i] = i! t^{-i} e^{t[y_a .. y_{a+i}]} = E_simplex[e^{t<lambda, y>}],
// so every G[i] lies in [e^{-|t|r}, e^{|t|r}], r = max |y| over the slice.
// Series G[i] = sum_m P_m[i] with P_0[i] = 1 and
//   P_m[i] = (i/(i+m)) P_m[i-1] + (t y_i/(i+m)) P_{m-1}[i]
// (complete homogeneous symmetric polynomials, factorial-normalized).
// Ascending i updates in place: P[i] still holds the row m-1 value when read.
// |P_m[i]| <= (|t|r)^m/m!, which drives the rigorous stop rule.
void moment_frontier(const double* y, std::size_t n, double t, DD* G) {
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) r = std::max(r, std::fabs(y[i]));
    double a = std::fabs(t) * r;
    double thresh = 2.5e-33 * std::exp(-a);
    std::size_t m_min = static_cast<std::size_t>(std::ceil(a));

    std::vector<DD> P(n), T(n);
    for (std::size_t i = 0; i < n; ++i) {
        T[i] = two_prod(t, y[i]);
        P[i] = dd_from(1.0);
        G[i] = dd_from(1.0);
    }
    double bound = 1.0;
    for (std::size_t m = 1; m <= kMaxRows; ++m) {
        double dm = static_cast<double>(m);
        bound *= a / dm;
        for (std::size_t i = 0; i < n; ++i) {
            double im = static_cast<double>(i) + dm;
            DD nw = dd_mul(dd_div(T[i], im), P[i]);
            if (i > 0)
                nw = dd_add(nw, dd_mul(dd_ratio(static_cast<double>(i), im), P[i - 1]));
            P[i] = nw;
            G[i] = dd_add(G[i], nw);
        }
        if (m > m_min && bound / (1.0 - a / (dm + 2.0)) <= thresh) return;
    }
    throw std::runtime_error("dd engine: series did not converge");
}

struct Frontier {
    std::vector<DD> m;
    std::vector<double> sh;  // per-entry log shift, all zero on the direct path
};

// binomial weight rows w[n][i] = C(n,i)/2^n via exact halving of Pascal's rule
std::vector<std::vector<DD>> half_binomial_rows(std::size_t nmax) {
    std::vector<std::vector<DD>> W(nmax + 1);
    W[0] = {dd_from(1.0)};
    for (std::size_t n = 1; n <= nmax; ++n) {
        W[n].assign(n + 1, DD{});
        for (std::size_t i = 0; i <= n; ++i) {
            DD sum{};
            if (i > 0) sum = W[n - 1][i - 1];
            if (i < n) sum = dd_add(sum, W[n - 1][i]);
            W[n][i] = dd_mul(sum, 0.5);
        }
    }
    return W;
}

// Wide-spread path: evaluate at t/2^s with |t/2^s|*rhat <= 1/4, then double the
// time s times with the normalized product rule
//   A'[j][k] = sum_l C(k-j, l-j)/2^{k-j} * A[j][l] * A[l][k],
// a convex combination of positive near-unit products, so no cancellation.
Frontier squared_frontier(const std::vector<double>& y, double t, double rhat) {
    std::size_t q = y.size() - 1;
    if (q > kSquaringOrderCap)
        throw std::range_error("dd engine: order above squaring-path cap for this spread");
    double a = std::fabs(t) * rhat;
    int s = static_cast<int>(std::ceil(std::log2(4.0 * a)));
    double tt = std::ldexp(t, -s);  // exact
    std::size_t N = q + 1;
    bool shifted = a > kShiftedLimit;

    auto W = half_binomial_rows(q);
    std::vector<DD> A(N * N), B(N * N);
    std::vector<double> ash(N * N, 0.0), bsh(N * N, 0.0);
    for (std::size_t j = 0; j <= q; ++j) moment_frontier(y.data() + j, N - j, tt, &A[j * N + j]);

    for (int step = 0; step < s; ++step) {
        for (std::size_t j = 0; j <= q; ++j) {
            for (std::size_t k = j; k <= q; ++k) {
                const auto& w = W[k - j];
                if (!shifted) {
                    DD acc{};
                    for (std::size_t l = j; l <= k; ++l)
                        acc = dd_add(acc, dd_mul(w[l - j], dd_mul(A[j * N + l], A[l * N + k])));
                    B[j * N + k] = acc;
                } else {
                    double mx = -std::numeric_limits<double>::infinity();
                    for (std::size_t l = j; l <= k; ++l)
                        mx = std::max(mx, ash[j * N + l] + ash[l * N + k]);
                    DD acc{};
                    for (std::size_t l = j; l <= k; ++l) {
                        double rb = std::exp(ash[j * N + l] + ash[l * N + k] - mx);
                        acc = dd_add(acc, dd_mul(dd_mul(w[l - j], rb),
                                                 dd_mul(A[j * N + l], A[l * N + k])));
                    }
                    double lg = std::log(acc.hi);
                    B[j * N + k] = dd_mul(acc, std::exp(-lg));
                    bsh[j * N + k] = mx + lg;
                }
            }
        }
        A.swap(B);
        if (shifted) ash.swap(bsh);
    }

    Frontier out;
    out.m.resize(N);
    out.sh.resize(N);
    for (std::size_t j = 0; j <= q; ++j) {
        out.m[j] = A[j];
        out.sh[j] = shifted ? ash[j] : 0.0;
    }
    return out;
}

Frontier frontier_of(const Centered& c, double t) {
    if (std::fabs(t) * c.rhat <= kDirectLimit) {
        Frontier f;
        f.m.resize(c.y.size());
        f.sh.assign(c.y.size(), 0.0);
        moment_frontier(c.y.data(), c.y.size(), t, f.m.data());
        return f;
    }
    return squared_frontier(c.y, t, c.rhat);
}

ScaledValue assemble(const DD& g, double gsh, double extra_log, int sgn) {
    double m = dd_to_double(g);
    return ScaledValue(sgn < 0 ? -m : m, gsh + extra_log);
}

void check_t(double t) {
    if (!std::isfinite(t)) throw std::domain_error("dd engine: non-finite t");
}

}  // namespace

Centered shift_normalize(const NodeMultiset& xs) {
    std::size_t n = xs.size();
    if (n == 0) throw std::invalid_argument("shift_normalize: empty multiset");
    const double* x = xs.values().data();
    double mu = neumaier(x, n) / static_cast<double>(n);
    // one refinement pass; after it the residual mean is O(u * max|x|)
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] - mu;
    mu += neumaier(y.data(), n) / static_cast<double>(n);
    Centered c;
    c.mu = mu;
    c.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        c.y[i] = x[i] - mu;
        c.rhat = std::max(c.rhat, std::fabs(c.y[i]));
    }
    return c;
}

ScaledValue dd_exp(const NodeMultiset& xs, double t) {
    check_t(t);
    std::size_t q = xs.order();
    if (q == 0) return ScaledValue::from_log(t * xs[0]);
    if (t == 0.0) return ScaledValue::zero();
    Centered c = shift_normalize(xs);
    Frontier fr = frontier_of(c, t);
    int sgn = (t < 0.0 && (q & 1)) ? -1 : +1;
    double extra = t * c.mu + static_cast<double>(q) * std::log(std::fabs(t)) -
                   std::lgamma(static_cast<double>(q) + 1.0);
    return assemble(fr.m[q], fr.sh[q], extra, sgn);
}

ScaledValue dd_exp_factorial(const NodeMultiset& xs, double t) {
    check_t(t);
    std::size_t q = xs.order();
    if (q == 0) return ScaledValue::from_log(t * xs[0]);
    if (t == 0.0) return ScaledValue::from_double(1.0);
    Centered c = shift_normalize(xs);
    Frontier fr = frontier_of(c, t);
    return assemble(fr.m[q], fr.sh[q], t * c.mu, +1);
}

double dd_exp_factorial_log(const NodeMultiset& xs, double t) {
    check_t(t);
    std::size_t q = xs.order();
    if (q == 0) return t * xs[0];
    if (t == 0.0) return 0.0;
    Centered c = shift_normalize(xs);
    Frontier fr = frontier_of(c, t);
    const DD& g = fr.m[q];
    return std::log(g.hi) + std::log1p(g.lo / g.hi) + fr.sh[q] + t * c.mu;
}

DDTable::DDTable(const NodeMultiset& xs, double t) : nodes_(xs.values()), t_(t) {
    check_t(t);
    std::size_t q = xs.order();
    f_.reserve(q + 1);
    f_.push_back(ScaledValue::from_log(t * nodes_[0]));
    if (q == 0) return;
    if (t == 0.0) {
        f_.resize(q + 1);  // exact zeros for every higher order
        return;
    }
    Centered c = shift_normalize(xs);
    Frontier fr = frontier_of(c, t);
    for (std::size_t j = 1; j <= q; ++j) {
        int sgn = (t < 0.0 && (j & 1)) ? -1 : +1;
        double extra = t * c.mu + static_cast<double>(j) * std::log(std::fabs(t)) -
                       std::lgamma(static_cast<double>(j) + 1.0);
        f_.push_back(assemble(fr.m[j], fr.sh[j], extra, sgn));
    }
}

void DDTable::append(double x) {
    if (!std::isfinite(x)) throw std::domain_error("dd table: non-finite node");
    bool repeat = false;
    for (double v : nodes_) repeat = repeat || (v == x);
    if (repeat) {
        // repeated node: the Newton sweep would divide by a zero gap, and the
        // frontier alone cannot supply the confluent limit mid-sequence, so
        // recompute just the one new entry division-free
        std::vector<double> all = nodes_;
        all.push_back(x);
        f_.push_back(dd_exp(NodeMultiset(std::move(all)), t_));
        nodes_.push_back(x);
        return;
    }
    // H_{-1} = e^{t x};  H_j = (H_{j-1} - F_j)/(x - x_j)  ends at e^{t[x_0..x_q, x]}
    ScaledValue H = ScaledValue::from_log(t_ * x);
    for (std::size_t j = 0; j < nodes_.size(); ++j) H = (H - f_[j]) / (x - nodes_[j]);
    f_.push_back(H);
    nodes_.push_back(x);
}

}  // namespace expdd
