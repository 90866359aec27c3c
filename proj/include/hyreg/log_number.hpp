#pragma once

// Nonnegative reals carried in natural-log space. The threshold recurrences
// produce numbers far below any float's underflow range, so verdicts compare
// logs and reports serialize (mantissa, exponent-of-two) pairs.

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace hyreg {

struct LogValue {
    bool zero = true;
    long double lg = 0.0L;  // natural log when !zero

    LogValue() = default;

    static LogValue from_value(double v) {
        if (v < 0) throw std::invalid_argument("LogValue: negative value");
        LogValue r;
        if (v == 0.0) return r;
        r.zero = false;
        r.lg = std::log(static_cast<long double>(v));
        return r;
    }

    static LogValue from_log(long double lg) {
        LogValue r;
        r.zero = false;
        r.lg = lg;
        return r;
    }

    static LogValue zero_value() { return LogValue(); }

    bool is_zero() const { return zero; }

    double to_double() const {
        if (zero) return 0.0;
        if (lg < -11350.0L) return 0.0;  // below long double underflow
        if (lg > 11350.0L) return HUGE_VAL;
        return static_cast<double>(std::exp(lg));
    }

    LogValue operator*(const LogValue& o) const {
        if (zero || o.zero) return LogValue();
        return from_log(lg + o.lg);
    }

    LogValue pow(long double e) const {
        if (zero) return LogValue();
        return from_log(lg * e);
    }

    friend bool operator<=(const LogValue& a, const LogValue& b) {
        if (a.zero) return true;
        if (b.zero) return false;
        return a.lg <= b.lg;
    }
    friend bool operator<(const LogValue& a, const LogValue& b) {
        if (b.zero) return false;
        if (a.zero) return true;
        return a.lg < b.lg;
    }

    // value = mantissa * 2^exp2 with mantissa in [1,2); zero is (0, 0).
    void to_mantissa_exp2(double* mantissa, std::int64_t* exp2) const {
        if (zero) { *mantissa = 0.0; *exp2 = 0; return; }
        long double x = lg / 0.6931471805599453094172321214581766L;
        long double e = std::floor(x);
        *mantissa = static_cast<double>(std::exp2(x - e));
        *exp2 = static_cast<std::int64_t>(e);
    }

    static LogValue from_mantissa_exp2(double mantissa, std::int64_t exp2) {
        if (mantissa == 0.0) return LogValue();
        long double lg = (std::log2(static_cast<long double>(mantissa)) +
                          static_cast<long double>(exp2)) *
                         0.6931471805599453094172321214581766L;
        return from_log(lg);
    }
};

}  // namespace hyreg
