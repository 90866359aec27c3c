#pragma once

// Exact rationals over BigInt. Densities, mean-square densities, and every
// oracle-grade comparison in the library go through this type; floats appear
// only in the Oct kernels and the log-space threshold schedules.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "hyreg/bigint.hpp"

namespace hyreg {

class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(std::int64_t v) : num_(v), den_(1) {}
    Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }
    Rational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }

    // Exact dyadic decomposition of a finite double.
    static Rational from_double(double x) {
        if (!std::isfinite(x)) throw std::invalid_argument("Rational: non-finite double");
        if (x == 0.0) return Rational();
        int e;
        double m = std::frexp(x, &e);  // x = m * 2^e, |m| in [0.5, 1)
        std::int64_t mi = static_cast<std::int64_t>(std::ldexp(m, 53));
        e -= 53;
        BigInt num(mi), den(1);
        if (e >= 0) num = num.shifted_left(static_cast<std::size_t>(e));
        else den = den.shifted_left(static_cast<std::size_t>(-e));
        return Rational(std::move(num), std::move(den));
    }

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    int sign() const { return num_.sign(); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.is_zero()) throw std::domain_error("Rational: division by zero");
        return Rational(a.num_ * b.den_, a.den_ * b.num_);
    }
    Rational operator-() const {
        Rational r = *this;
        r.num_ = -r.num_;
        return r;
    }
    Rational& operator+=(const Rational& o) { *this = *this + o; return *this; }
    Rational& operator-=(const Rational& o) { *this = *this - o; return *this; }
    Rational& operator*=(const Rational& o) { *this = *this * o; return *this; }
    Rational& operator/=(const Rational& o) { *this = *this / o; return *this; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return a.num_ * b.den_ < b.num_ * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    Rational abs() const {
        Rational r = *this;
        r.num_ = r.num_.abs();
        return r;
    }

    Rational pow(unsigned e) const {
        Rational r(1);
        Rational b = *this;
        while (e != 0) {
            if (e & 1u) r *= b;
            e >>= 1;
            if (e != 0) b *= b;
        }
        return r;
    }

    double to_double() const {
        if (num_.is_zero()) return 0.0;
        long en, ed;
        double mn = num_.to_double_exp(&en);
        double md = den_.to_double_exp(&ed);
        long e = en - ed;
        if (e > 1020) return num_.negative() ? -HUGE_VAL : HUGE_VAL;
        if (e < -1060) return num_.negative() ? -0.0 : 0.0;
        return std::ldexp(mn / md, static_cast<int>(e));
    }

    // log2 of |value|; value must be nonzero.
    double log2_abs() const {
        return num_.log2_abs() - den_.log2_abs();
    }

    std::string to_string() const { return num_.to_string() + "/" + den_.to_string(); }

private:
    BigInt num_, den_;

    void normalize() {
        if (den_.is_zero()) throw std::domain_error("Rational: zero denominator");
        if (den_.negative()) { num_ = -num_; den_ = -den_; }
        if (num_.is_zero()) { den_ = BigInt(1); return; }
        BigInt g = BigInt::gcd(num_, den_);
        if (!g.is_one()) { num_ = num_ / g; den_ = den_ / g; }
    }
};

// Accumulator that keeps a running common denominator and reduces once at the
// end; the energy sums touch thousands of terms and per-term gcd is wasteful.
class RationalSum {
public:
    RationalSum() : num_(0), den_(1) {}

    void add(const BigInt& n, const BigInt& d) {
        if (d.is_zero()) throw std::domain_error("RationalSum: zero denominator");
        BigInt dd = d.negative() ? -d : d;
        BigInt nn = d.negative() ? -n : n;
        BigInt g = BigInt::gcd(den_, dd);
        BigInt scaleOld = dd / g;
        num_ = num_ * scaleOld + nn * (den_ / g);
        den_ = den_ * scaleOld;
        if (den_.bit_length() > 4096) reduce();
    }

    void add(const Rational& r) { add(r.num(), r.den()); }

    Rational value() const { return Rational(num_, den_); }

private:
    BigInt num_, den_;

    void reduce() {
        BigInt g = BigInt::gcd(num_, den_);
        if (!g.is_one() && !g.is_zero()) { num_ = num_ / g; den_ = den_ / g; }
    }
};

}  // namespace hyreg
