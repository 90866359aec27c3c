#include <doctest.h>

#include "hyreg/bigint.hpp"
#include "hyreg/rational.hpp"
#include "hyreg/rng.hpp"

using namespace hyreg;

TEST_CASE("bigint arithmetic agrees with int64 on small operands") {
    Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
        std::int64_t a = static_cast<std::int64_t>(rng.next_u64() % 2000001) - 1000000;
        std::int64_t b = static_cast<std::int64_t>(rng.next_u64() % 2000001) - 1000000;
        BigInt A(a), B(b);
        CHECK((A + B).to_int64() == a + b);
        CHECK((A - B).to_int64() == a - b);
        CHECK((A * B).to_int64() == a * b);
        if (b != 0) {
            BigInt q, r;
            BigInt::divmod(A, B, q, r);
            CHECK(q.to_int64() == a / b);
            CHECK(r.to_int64() == a % b);
        }
        CHECK((A < B) == (a < b));
    }
}

TEST_CASE("bigint divmod reconstructs the dividend at width") {
    Rng rng(12);
    for (int i = 0; i < 200; ++i) {
        BigInt a(1), b(1);
        int wa = 1 + static_cast<int>(rng.below(6));
        int wb = 1 + static_cast<int>(rng.below(3));
        for (int w = 0; w < wa; ++w) a = a * BigInt(static_cast<std::int64_t>(rng.next_u64() >> 16) + 2);
        for (int w = 0; w < wb; ++w) b = b * BigInt(static_cast<std::int64_t>(rng.next_u64() >> 20) + 2);
        BigInt q, r;
        BigInt::divmod(a, b, q, r);
        CHECK(q * b + r == a);
        CHECK(r >= BigInt(0));
        CHECK(r < b);
    }
}

TEST_CASE("bigint gcd and decimal strings") {
    CHECK(BigInt::gcd(BigInt(54), BigInt(24)).to_int64() == 6);
    CHECK(BigInt::gcd(BigInt(0), BigInt(7)).to_int64() == 7);
    BigInt big = BigInt::from_string("340282366920938463463374607431768211456");  // 2^128
    CHECK(big.to_string() == "340282366920938463463374607431768211456");
    CHECK(big.bit_length() == 129);
    CHECK(BigInt::gcd(big, BigInt(12)).to_int64() == 4);
    CHECK(BigInt::from_string("-42").to_int64() == -42);
}

TEST_CASE("rational arithmetic and ordering") {
    Rational a(1, 3), b(2, 5);
    CHECK((a + b) == Rational(11, 15));
    CHECK((a * b) == Rational(2, 15));
    CHECK((a - b) == Rational(-1, 15));
    CHECK((a / b) == Rational(5, 6));
    CHECK(a < b);
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(7, -2) == Rational(-7, 2));
    CHECK(Rational(1, 3).pow(3) == Rational(1, 27));
}

TEST_CASE("rational from_double is exact on dyadics") {
    CHECK(Rational::from_double(0.5) == Rational(1, 2));
    CHECK(Rational::from_double(-0.375) == Rational(-3, 8));
    CHECK(Rational::from_double(0.0) == Rational(0));
    Rng rng(13);
    for (int i = 0; i < 500; ++i) {
        double x = (2.0 * rng.real() - 1.0);
        Rational r = Rational::from_double(x);
        CHECK(r.to_double() == x);  // dyadic decomposition round-trips exactly
    }
}

TEST_CASE("rational sum accumulator matches term-by-term addition") {
    Rng rng(14);
    for (int trial = 0; trial < 50; ++trial) {
        RationalSum sum;
        Rational direct(0);
        for (int i = 0; i < 40; ++i) {
            std::int64_t num = static_cast<std::int64_t>(rng.below(41)) - 20;
            std::int64_t den = 1 + static_cast<std::int64_t>(rng.below(60));
            Rational term(num, den);
            sum.add(term);
            direct += term;
        }
        CHECK(sum.value() == direct);
    }
}

TEST_CASE("log2 of large rationals is accurate") {
    Rational r(BigInt::from_string("123456789123456789123456789"), BigInt::from_string("7"));
    double expect = std::log2(1.23456789123456789123456789e26) - std::log2(7.0);
    CHECK(std::fabs(r.log2_abs() - expect) < 1e-9);
}
