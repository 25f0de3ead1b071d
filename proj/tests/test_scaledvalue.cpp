#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "expdd/rng.hpp"
#include "expdd/scaled_value.hpp"

using namespace expdd;

TEST_CASE("exact zero semantics") {
    ScaledValue z = ScaledValue::zero();
    CHECK(z.is_zero());
    CHECK(z.sign() == 0);
    CHECK(z.value() == 0.0);
    CHECK(z.shift() == 0.0);
    CHECK(ScaledValue::from_double(0.0).is_zero());
    CHECK(std::isinf(z.log_abs()));
    CHECK(z.log_abs() < 0.0);

    // zero is absorbing / neutral without renormalization surprises
    ScaledValue a = ScaledValue::from_double(3.5);
    CHECK((a * z).is_zero());
    CHECK((z * a).is_zero());
    CHECK((a + z).value() == 3.5);
    CHECK((z + a).value() == 3.5);
    CHECK((z / a).is_zero());
}

TEST_CASE("construction round trips") {
    for (double v : {1.0, -1.0, 0.5, 1e-200, -3e200, 7.25, -0.001}) {
        ScaledValue s = ScaledValue::from_double(v);
        CHECK(s.value() == doctest::Approx(v).epsilon(1e-15));
        CHECK(s.sign() == (v > 0 ? 1 : -1));
        CHECK(s.log_abs() == doctest::Approx(std::log(std::fabs(v))).epsilon(1e-14));
    }
    ScaledValue t = ScaledValue::from_log(12345.5);
    CHECK(t.log_abs() == doctest::Approx(12345.5).epsilon(1e-15));
    CHECK(t.sign() == 1);
}

TEST_CASE("normalize keeps the value and bounds the mantissa") {
    ScaledValue s(12345.0, -3.0);
    double before = s.log_abs();
    s.normalize();
    CHECK(s.log_abs() == doctest::Approx(before).epsilon(1e-14));
    CHECK(std::fabs(s.mantissa()) >= 1.0);
    CHECK(std::fabs(s.mantissa()) < std::exp(1.0));

    ScaledValue n(-0.25, 2.0);
    n.normalize();
    CHECK(std::fabs(n.mantissa()) >= 1.0);
    CHECK(std::fabs(n.mantissa()) < std::exp(1.0));
    CHECK(n.sign() == -1);
    CHECK(n.log_abs() == doctest::Approx(std::log(0.25) + 2.0).epsilon(1e-14));
}

TEST_CASE("multiplication and division compose in log space") {
    ScaledValue a = ScaledValue::from_log(700.0) * ScaledValue::from_log(800.0);
    CHECK(a.log_abs() == doctest::Approx(1500.0).epsilon(1e-15));
    ScaledValue b = a / ScaledValue::from_log(1500.0);
    CHECK(b.log_abs() == doctest::Approx(0.0).epsilon(1e-12));
    ScaledValue c = ScaledValue::from_double(-2.0) * ScaledValue::from_double(3.0);
    CHECK(c.value() == doctest::Approx(-6.0).epsilon(1e-15));
    CHECK((c * 0.5).value() == doctest::Approx(-3.0).epsilon(1e-15));
    CHECK((c / -2.0).value() == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("addition rebases to the larger shift") {
    ScaledValue a = ScaledValue::from_double(3.0);
    ScaledValue b = ScaledValue::from_double(4.0);
    CHECK((a + b).value() == 7.0);
    CHECK((a - b).value() == -1.0);

    // a term hundreds of e-folds below flushes against the big one
    ScaledValue big = ScaledValue::from_log(0.0);
    ScaledValue tiny = ScaledValue::from_log(-800.0);
    CHECK((big + tiny).log_abs() == 0.0);
    CHECK((tiny + big).log_abs() == 0.0);
}

TEST_CASE("cancellation yields the exact zero") {
    ScaledValue a(1.25, 40.0);
    CHECK((a - a).is_zero());
    ScaledValue b(-1.25, 40.0);
    CHECK((a + b).is_zero());
}

TEST_CASE("addition is bitwise commutative") {
    CounterRng rng(2024);
    for (std::uint64_t i = 0; i < 500; ++i) {
        ScaledValue a(rng.range(4 * i, -4.0, 4.0), rng.range(4 * i + 1, -300.0, 300.0));
        ScaledValue b(rng.range(4 * i + 2, -4.0, 4.0), rng.range(4 * i + 3, -300.0, 300.0));
        ScaledValue ab = a + b, ba = b + a;
        REQUIRE(ab.mantissa() == ba.mantissa());
        REQUIRE(ab.shift() == ba.shift());
        ScaledValue m1 = a * b, m2 = b * a;
        REQUIRE(m1.mantissa() == m2.mantissa());
        REQUIRE(m1.shift() == m2.shift());
    }
}

TEST_CASE("rel_diff measures relative separation") {
    ScaledValue a = ScaledValue::from_double(1.0);
    ScaledValue b = ScaledValue::from_double(1.0 + 1e-10);
    CHECK(ScaledValue::rel_diff(a, b) == doctest::Approx(1e-10).epsilon(1e-3));
    CHECK(ScaledValue::rel_diff(a, a) == 0.0);
    CHECK(ScaledValue::rel_diff(ScaledValue::zero(), ScaledValue::zero()) == 0.0);
    // scale invariance
    ScaledValue s = ScaledValue::from_log(2000.0);
    CHECK(ScaledValue::rel_diff(a * s, b * s) == doctest::Approx(1e-10).epsilon(1e-3));
}

TEST_CASE("huge dynamic range stays finite") {
    ScaledValue p = ScaledValue::from_log(0.0);
    for (int i = 0; i < 1000; ++i) p = p * ScaledValue::from_log(500.0);
    CHECK(p.log_abs() == doctest::Approx(500000.0).epsilon(1e-12));
    ScaledValue q = p / p;
    CHECK(q.log_abs() == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("non-finite inputs and division by zero are rejected") {
    double inf = std::numeric_limits<double>::infinity();
    double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(ScaledValue(inf, 0.0), std::range_error);
    CHECK_THROWS_AS(ScaledValue(1.0, nan), std::range_error);
    CHECK_THROWS_AS(ScaledValue::from_log(inf), std::range_error);
    ScaledValue a = ScaledValue::from_double(1.0);
    CHECK_THROWS_AS(a / ScaledValue::zero(), std::domain_error);
    CHECK_THROWS_AS(a / 0.0, std::domain_error);
}
