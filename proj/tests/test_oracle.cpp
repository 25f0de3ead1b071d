#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "expdd/divdiff.hpp"
#include "expdd/nodes.hpp"
#include "expdd/oracle.hpp"
#include "expdd/rng.hpp"
#include "expdd/scaled_value.hpp"

using namespace expdd;

namespace {

NodeMultiset random_multiset(const CounterRng& rng, std::uint64_t trial, std::size_t max_q,
                             double lo, double hi) {
    std::uint64_t base = trial * 64;
    std::size_t q = 1 + rng.below(base, max_q);
    std::vector<double> v;
    while (v.size() < q + 1) {
        double x = rng.range(base + 1 + v.size() * 2, lo, hi);
        std::uint64_t m = 1 + rng.below(base + 2 + v.size() * 2, 3);
        for (std::uint64_t k = 0; k < m && v.size() < q + 1; ++k) v.push_back(x);
    }
    return NodeMultiset(std::move(v));
}

}  // namespace

TEST_CASE("confluent table reproduces closed forms") {
    // first order: (e^1 - e^0) / 1
    ScaledValue v = newton_highprec(NodeMultiset(std::vector<double>{0.0, 1.0}), 200);
    CHECK(v.value() == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-15));
    // fully repeated node: e^{t c} t^q / q!
    ScaledValue w = newton_highprec(NodeMultiset(std::vector<double>{0.0, 0.0, 0.0}), 200);
    CHECK(w.value() == doctest::Approx(0.5).epsilon(1e-15));
    ScaledValue u =
        newton_highprec(NodeMultiset(std::vector<double>{1.5, 1.5, 1.5, 1.5}), 200, -2.0);
    double expect = -8.0 / 6.0 * std::exp(-3.0);
    CHECK(u.value() == doctest::Approx(expect).epsilon(1e-14));
    CHECK(u.sign() == -1);
}

TEST_CASE("precision scaling: 200 vs 400 bits agree far below double") {
    CounterRng rng(501);
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        NodeMultiset xs = random_multiset(rng, trial, 8, -10.0, 10.0);
        double t = (trial % 2 == 0) ? 1.0 : rng.range(trial * 64 + 60, -3.0, 3.0);
        double d = newton_rel_diff(xs, t, 200, 400);
        REQUIRE(d < 1e-40);
    }
}

TEST_CASE("precision floor is enforced") {
    NodeMultiset xs(std::vector<double>{0.0, 1.0});
    CHECK_THROWS_AS(newton_highprec(xs, 32), std::invalid_argument);
    CHECK_THROWS_AS(newton_rel_diff(xs, 1.0, 200, 63), std::invalid_argument);
}

TEST_CASE("simplex samples are barycentric") {
    CounterRng rng(77);
    std::vector<double> lam(5);
    for (std::uint64_t i = 0; i < 2000; ++i) {
        simplex_sample(rng, i * 8, lam);
        double sum = 0.0;
        for (double l : lam) {
            REQUIRE(l >= 0.0);
            sum += l;
        }
        REQUIRE(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("first barycentric coordinate follows its known marginal") {
    // for 3 coordinates the first has density 2(1-x): F(x) = 1 - (1-x)^2
    CounterRng rng(99);
    const std::size_t n = 20000;
    std::vector<double> first(n);
    std::vector<double> lam(3);
    for (std::size_t i = 0; i < n; ++i) {
        simplex_sample(rng, i * 4, lam);
        first[i] = lam[0];
    }
    std::sort(first.begin(), first.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double f = 1.0 - (1.0 - first[i]) * (1.0 - first[i]);
        double lo = static_cast<double>(i) / n, hi = static_cast<double>(i + 1) / n;
        ks = std::max({ks, std::fabs(f - lo), std::fabs(f - hi)});
    }
    CHECK(ks < 0.02);  // ~2.9 sigma for n = 20000
}

TEST_CASE("monte carlo is exact on a constant integrand") {
    NodeMultiset xs(std::vector<double>{1.3, 1.3, 1.3, 1.3});
    Estimate e = hg_monte_carlo(xs, 5000, 12);
    CHECK(e.mean == doctest::Approx(std::exp(1.3) / 6.0).epsilon(1e-15));
    CHECK(e.std_error == 0.0);
    CHECK(e.samples == 5000);
}

TEST_CASE("monte carlo brackets the confluent table") {
    CounterRng rng(314);
    int hits = 0, total = 0;
    for (std::uint64_t trial = 0; trial < 12; ++trial) {
        NodeMultiset xs = random_multiset(rng, trial, 6, -4.0, 4.0);
        double t = (trial % 3 == 0) ? -1.0 : 1.0;
        Estimate e = hg_monte_carlo(xs, 200000, 1000 + trial, t);
        double truth = newton_highprec(xs, 200, t).value();
        if (xs.spread() == 0.0) {
            // constant integrand: the estimator collapses to the exact value
            CHECK(e.std_error == 0.0);
            CHECK(e.mean == doctest::Approx(truth).epsilon(1e-13));
            continue;
        }
        REQUIRE(e.std_error > 0.0);
        REQUIRE(e.std_error < std::fabs(truth));
        hits += std::fabs(e.mean - truth) <= 4.0 * e.std_error;
        ++total;
    }
    CHECK(hits == total);
}

TEST_CASE("parallel and serial reductions match bitwise") {
    NodeMultiset xs(std::vector<double>{0.0, 0.5, 2.0, -1.0});
    Estimate p = hg_monte_carlo(xs, 100000, 5);
    Estimate s = hg_monte_carlo_serial(xs, 100000, 5);
    CHECK(p.mean == s.mean);
    CHECK(p.std_error == s.std_error);
    CHECK(p.samples == s.samples);
    // sample count below one block still agrees
    Estimate p2 = hg_monte_carlo(xs, 1000, 5);
    Estimate s2 = hg_monte_carlo_serial(xs, 1000, 5);
    CHECK(p2.mean == s2.mean);
    CHECK(p2.std_error == s2.std_error);
}

TEST_CASE("monte carlo seed determinism") {
    NodeMultiset xs(std::vector<double>{0.0, 1.0, 3.0});
    Estimate a = hg_monte_carlo(xs, 50000, 9);
    Estimate b = hg_monte_carlo(xs, 50000, 9);
    Estimate c = hg_monte_carlo(xs, 50000, 10);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    CHECK(a.mean != c.mean);
}

TEST_CASE("high-precision margin rechecks on closed-form instances") {
    // first-order kernel on the unit square: 2 log(e-1) - 1
    std::vector<double> empty;
    double m = tn2_margin_highprec(empty, 1, 1, 0.0, 1.0, 0.0, 1.0, 256);
    CHECK(m == doctest::Approx(2.0 * std::log(std::exp(1.0) - 1.0) - 1.0).epsilon(1e-13));
    // all nodes equal: both products reduce to the same square, ratio 1
    CHECK(fourpoint_f_highprec(0.0, 0.0, 0.0, 0.0, 256) ==
          doctest::Approx(1.0).epsilon(1e-13));
    // interior points are strictly positive
    CHECK(fourpoint_f_highprec(0.0, 1.0, 2.0, 3.0, 256) > 0.0);
    CHECK(triangle_margin_highprec(0.0, 1.0, 2.0, 256) > 0.0);
    CHECK(phi_product_highprec(1.0, 1.0, 1.0, 256) > 0.0);
    CHECK(h_product_highprec(0.0, 1.0, 2.0, 3.0, 256) > 0.0);
    // degenerate faces vanish to the recheck precision
    CHECK(std::fabs(triangle_margin_highprec(0.5, 0.5, 2.0, 256)) < 1e-40);
    CHECK(std::fabs(phi_product_highprec(1.0, 0.0, 1.0, 256)) < 1e-40);
}

TEST_CASE("high-precision sandwich slacks vanish at first order") {
    // order 1, symmetric nodes: value and both envelope factors coincide
    SandwichSlacksHP s =
        sandwich_slacks_highprec(NodeMultiset(std::vector<double>{-1.0, 1.0}), 320);
    CHECK(std::fabs(s.lower) < 1e-30);
    CHECK(std::fabs(s.upper) < 1e-30);
    // generic multisets sit strictly inside
    SandwichSlacksHP g = sandwich_slacks_highprec(
        NodeMultiset(std::vector<double>{-2.0, -0.5, 0.25, 1.0, 3.0}), 320);
    CHECK(g.lower > 0.0);
    CHECK(g.upper > 0.0);
}
