#pragma once
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

// Log-scaled signed floating point: value = m * e^s. Exact zero is {0, 0}.
// normalize() keeps |m| in [1, e); arithmetic renormalizes lazily once |m|
// leaves [e^-1, e^2], so chained ops stay cheap and zero stays exact.

namespace expdd {

class ScaledValue {
  public:
    ScaledValue() = default;
    ScaledValue(double mantissa, double shift) : m_(mantissa), s_(shift) {
        check_();
        lazy_();
    }

    static ScaledValue zero() { return {}; }

    static ScaledValue from_double(double v) {
        if (v == 0.0) return {};
        return {v, 0.0};
    }

    // value e^L with unit mantissa; L must be finite
    static ScaledValue from_log(double L) {
        ScaledValue r;
        r.m_ = 1.0;
        r.s_ = L;
        r.check_();
        return r;
    }

    double mantissa() const { return m_; }
    double shift() const { return s_; }
    bool is_zero() const { return m_ == 0.0; }
    int sign() const { return (m_ > 0.0) - (m_ < 0.0); }

    // undefined (-inf) for zero by convention
    double log_abs() const {
        return is_zero() ? -std::numeric_limits<double>::infinity()
                         : std::log(std::fabs(m_)) + s_;
    }

    // may overflow/underflow double range; callers wanting full range use log_abs/sign
    double value() const { return is_zero() ? 0.0 : m_ * std::exp(s_); }

    void normalize() {
        if (m_ == 0.0) {
            s_ = 0.0;
            return;
        }
        double l = std::log(std::fabs(m_));
        double k = std::floor(l);
        if (k != 0.0) {
            m_ *= std::exp(-k);
            s_ += k;
        }
        check_();
    }

    friend ScaledValue operator*(const ScaledValue& a, const ScaledValue& b) {
        if (a.is_zero() || b.is_zero()) return {};
        ScaledValue r;
        r.m_ = a.m_ * b.m_;
        r.s_ = a.s_ + b.s_;
        r.check_();
        r.lazy_();
        return r;
    }

    friend ScaledValue operator/(const ScaledValue& a, const ScaledValue& b) {
        if (b.is_zero()) throw std::domain_error("scaled value division by zero");
        if (a.is_zero()) return {};
        ScaledValue r;
        r.m_ = a.m_ / b.m_;
        r.s_ = a.s_ - b.s_;
        r.check_();
        r.lazy_();
        return r;
    }

    friend ScaledValue operator*(const ScaledValue& a, double c) {
        if (a.is_zero() || c == 0.0) return {};
        ScaledValue r;
        r.m_ = a.m_ * c;
        r.s_ = a.s_;
        r.check_();
        r.lazy_();
        return r;
    }

    friend ScaledValue operator/(const ScaledValue& a, double c) {
        if (c == 0.0) throw std::domain_error("scaled value division by zero");
        if (a.is_zero()) return {};
        ScaledValue r;
        r.m_ = a.m_ / c;
        r.s_ = a.s_;
        r.check_();
        r.lazy_();
        return r;
    }

    friend ScaledValue operator-(const ScaledValue& a) {
        ScaledValue r = a;
        r.m_ = -r.m_;
        return r;
    }

    // rebase the smaller-shift operand; a term more than ~745 e-folds below
    // the other flushes to zero against it, which is below any tolerance here
    friend ScaledValue operator+(const ScaledValue& a, const ScaledValue& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        const ScaledValue& big = (a.s_ >= b.s_) ? a : b;
        const ScaledValue& sml = (a.s_ >= b.s_) ? b : a;
        ScaledValue r;
        r.m_ = big.m_ + sml.m_ * std::exp(sml.s_ - big.s_);
        r.s_ = big.s_;
        if (r.m_ == 0.0) return {};
        r.check_();
        r.lazy_();
        return r;
    }

    friend ScaledValue operator-(const ScaledValue& a, const ScaledValue& b) {
        return a + (-b);
    }

    // |a - b| / max(|a|, |b|); 0 when both zero
    static double rel_diff(const ScaledValue& a, const ScaledValue& b) {
        if (a.is_zero() && b.is_zero()) return 0.0;
        ScaledValue d = a - b;
        if (d.is_zero()) return 0.0;
        double ref = std::max(a.log_abs(), b.log_abs());
        return std::exp(d.log_abs() - ref);
    }

  private:
    double m_ = 0.0;
    double s_ = 0.0;

    void check_() const {
        if (!std::isfinite(m_) || !std::isfinite(s_))
            throw std::range_error("scaled value overflow: non-finite mantissa or shift");
    }

    void lazy_() {
        double a = std::fabs(m_);
        if (a != 0.0 && (a < 0.36787944117144233 || a > 7.38905609893065)) normalize();
    }
};

}  // namespace expdd
