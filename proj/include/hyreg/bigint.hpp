#pragma once

// Arbitrary-precision signed integer, sized for exact density and energy
// accounting. Little-endian base-2^32 magnitude with sign flag.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyreg {

class BigInt {
public:
    BigInt() = default;
    BigInt(std::int64_t v) { assign(v); }

    void assign(std::int64_t v) {
        mag_.clear();
        neg_ = v < 0;
        std::uint64_t u = neg_ ? (~static_cast<std::uint64_t>(v) + 1) : static_cast<std::uint64_t>(v);
        while (u != 0) {
            mag_.push_back(static_cast<std::uint32_t>(u & 0xffffffffu));
            u >>= 32;
        }
    }

    static BigInt from_uint64(std::uint64_t u) {
        BigInt r;
        while (u != 0) {
            r.mag_.push_back(static_cast<std::uint32_t>(u & 0xffffffffu));
            u >>= 32;
        }
        return r;
    }

    bool is_zero() const { return mag_.empty(); }
    bool negative() const { return neg_; }
    int sign() const { return is_zero() ? 0 : (neg_ ? -1 : 1); }

    bool is_one() const { return !neg_ && mag_.size() == 1 && mag_[0] == 1; }

    std::size_t bit_length() const {
        if (mag_.empty()) return 0;
        std::uint32_t top = mag_.back();
        std::size_t bits = (mag_.size() - 1) * 32;
        while (top != 0) { ++bits; top >>= 1; }
        return bits;
    }

    bool bit(std::size_t i) const {
        std::size_t w = i / 32, b = i % 32;
        if (w >= mag_.size()) return false;
        return (mag_[w] >> b) & 1u;
    }

    bool fits_int64() const {
        if (mag_.size() > 2) return false;
        std::uint64_t u = to_u64_trunc();
        if (neg_) return u <= 0x8000000000000000ull;
        return u <= 0x7fffffffffffffffull;
    }

    std::int64_t to_int64() const {
        if (!fits_int64()) throw std::overflow_error("BigInt: does not fit int64");
        std::uint64_t u = to_u64_trunc();
        return neg_ ? -static_cast<std::int64_t>(u - 1) - 1 : static_cast<std::int64_t>(u);
    }

    // Top 64 bits as a double in [0.5, 1), with *exp such that value = m * 2^exp.
    double to_double_exp(long* exp) const {
        if (mag_.empty()) { *exp = 0; return 0.0; }
        std::size_t bl = bit_length();
        std::uint64_t top = 0;
        int have = 0;
        for (std::size_t i = bl; i > 0 && have < 64; ) {
            --i;
            top = (top << 1) | (bit(i) ? 1u : 0u);
            ++have;
        }
        double m = std::ldexp(static_cast<double>(top), -have);
        *exp = static_cast<long>(bl);
        return neg_ ? -m : m;
    }

    double to_double() const {
        long e;
        double m = to_double_exp(&e);
        return std::ldexp(m, static_cast<int>(e));
    }

    // log2 of |value|; value must be nonzero.
    double log2_abs() const {
        if (is_zero()) throw std::domain_error("BigInt: log2 of zero");
        long e;
        double m = std::fabs(to_double_exp(&e));
        return static_cast<double>(e) + std::log2(m);
    }

    friend bool operator==(const BigInt& a, const BigInt& b) {
        return a.neg_ == b.neg_ && a.mag_ == b.mag_;
    }
    friend bool operator!=(const BigInt& a, const BigInt& b) { return !(a == b); }
    friend bool operator<(const BigInt& a, const BigInt& b) {
        if (a.neg_ != b.neg_) return a.neg_;
        int c = cmp_mag(a.mag_, b.mag_);
        return a.neg_ ? c > 0 : c < 0;
    }
    friend bool operator>(const BigInt& a, const BigInt& b) { return b < a; }
    friend bool operator<=(const BigInt& a, const BigInt& b) { return !(b < a); }
    friend bool operator>=(const BigInt& a, const BigInt& b) { return !(a < b); }

    BigInt operator-() const {
        BigInt r = *this;
        if (!r.is_zero()) r.neg_ = !r.neg_;
        return r;
    }

    BigInt abs() const {
        BigInt r = *this;
        r.neg_ = false;
        return r;
    }

    friend BigInt operator+(const BigInt& a, const BigInt& b) {
        BigInt r;
        if (a.neg_ == b.neg_) {
            r.mag_ = add_mag(a.mag_, b.mag_);
            r.neg_ = a.neg_;
        } else {
            int c = cmp_mag(a.mag_, b.mag_);
            if (c == 0) return BigInt();
            if (c > 0) { r.mag_ = sub_mag(a.mag_, b.mag_); r.neg_ = a.neg_; }
            else       { r.mag_ = sub_mag(b.mag_, a.mag_); r.neg_ = b.neg_; }
        }
        r.trim();
        return r;
    }
    friend BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

    friend BigInt operator*(const BigInt& a, const BigInt& b) {
        BigInt r;
        if (a.is_zero() || b.is_zero()) return r;
        r.mag_.assign(a.mag_.size() + b.mag_.size(), 0);
        for (std::size_t i = 0; i < a.mag_.size(); ++i) {
            std::uint64_t carry = 0;
            std::uint64_t ai = a.mag_[i];
            for (std::size_t j = 0; j < b.mag_.size(); ++j) {
                std::uint64_t cur = r.mag_[i + j] + ai * b.mag_[j] + carry;
                r.mag_[i + j] = static_cast<std::uint32_t>(cur & 0xffffffffu);
                carry = cur >> 32;
            }
            std::size_t j = i + b.mag_.size();
            while (carry != 0) {
                std::uint64_t cur = r.mag_[j] + carry;
                r.mag_[j] = static_cast<std::uint32_t>(cur & 0xffffffffu);
                carry = cur >> 32;
                ++j;
            }
        }
        r.neg_ = a.neg_ != b.neg_;
        r.trim();
        return r;
    }

    BigInt& operator+=(const BigInt& o) { *this = *this + o; return *this; }
    BigInt& operator-=(const BigInt& o) { *this = *this - o; return *this; }
    BigInt& operator*=(const BigInt& o) { *this = *this * o; return *this; }

    // Truncated division (C semantics); remainder carries the dividend's sign.
    static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
        if (b.is_zero()) throw std::domain_error("BigInt: division by zero");
        int c = cmp_mag(a.mag_, b.mag_);
        if (c < 0) { q = BigInt(); r = a; return; }
        std::vector<std::uint32_t> rem = a.mag_;
        std::size_t shift = bit_length_of(a.mag_) - bit_length_of(b.mag_);
        std::vector<std::uint32_t> div = shl_mag(b.mag_, shift);
        std::vector<std::uint32_t> quo((shift / 32) + 1, 0);
        for (std::size_t i = shift + 1; i > 0; ) {
            --i;
            if (cmp_mag(rem, div) >= 0) {
                rem = sub_mag(rem, div);
                quo[i / 32] |= (1u << (i % 32));
            }
            shr1_mag(div);
        }
        q.mag_ = std::move(quo);
        q.trim();
        q.neg_ = !q.is_zero() && (a.neg_ != b.neg_);
        r.mag_ = std::move(rem);
        r.trim();
        r.neg_ = !r.is_zero() && a.neg_;
    }

    friend BigInt operator/(const BigInt& a, const BigInt& b) {
        BigInt q, r;
        divmod(a, b, q, r);
        return q;
    }
    friend BigInt operator%(const BigInt& a, const BigInt& b) {
        BigInt q, r;
        divmod(a, b, q, r);
        return r;
    }

    BigInt shifted_left(std::size_t bits) const {
        BigInt r;
        if (is_zero()) return r;
        r.mag_ = shl_mag(mag_, bits);
        r.neg_ = neg_;
        return r;
    }

    static BigInt gcd(BigInt a, BigInt b) {
        a.neg_ = false;
        b.neg_ = false;
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        // binary gcd
        std::size_t az = a.trailing_zeros(), bz = b.trailing_zeros();
        std::size_t common = std::min(az, bz);
        a.shr_bits(az);
        b.shr_bits(bz);
        while (true) {
            int c = cmp_mag(a.mag_, b.mag_);
            if (c == 0) break;
            if (c < 0) std::swap(a, b);
            a.mag_ = sub_mag(a.mag_, b.mag_);
            a.trim();
            if (a.is_zero()) { a = b; break; }
            a.shr_bits(a.trailing_zeros());
        }
        return a.shifted_left(common);
    }

    static BigInt pow(const BigInt& base, unsigned e) {
        BigInt r(1), b = base;
        while (e != 0) {
            if (e & 1u) r *= b;
            e >>= 1;
            if (e != 0) b *= b;
        }
        return r;
    }

    std::string to_string() const {
        if (is_zero()) return "0";
        std::string out;
        BigInt cur = abs();
        BigInt base(1000000000);
        while (!cur.is_zero()) {
            BigInt q, r;
            divmod(cur, base, q, r);
            std::uint64_t chunk = r.to_u64_trunc();
            std::string piece = std::to_string(chunk);
            if (!q.is_zero())
                piece = std::string(9 - piece.size(), '0') + piece;
            out = piece + out;
            cur = std::move(q);
        }
        return neg_ ? "-" + out : out;
    }

    static BigInt from_string(const std::string& s) {
        BigInt r;
        std::size_t i = 0;
        bool neg = false;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) { neg = s[i] == '-'; ++i; }
        if (i == s.size()) throw std::invalid_argument("BigInt: empty numeral");
        BigInt ten(10);
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("BigInt: bad digit");
            r = r * ten + BigInt(s[i] - '0');
        }
        if (neg && !r.is_zero()) r.neg_ = true;
        return r;
    }

private:
    std::vector<std::uint32_t> mag_;
    bool neg_ = false;

    std::uint64_t to_u64_trunc() const {
        std::uint64_t u = 0;
        if (mag_.size() > 1) u = static_cast<std::uint64_t>(mag_[1]) << 32;
        if (!mag_.empty()) u |= mag_[0];
        return u;
    }

    void trim() {
        while (!mag_.empty() && mag_.back() == 0) mag_.pop_back();
        if (mag_.empty()) neg_ = false;
    }

    std::size_t trailing_zeros() const {
        for (std::size_t w = 0; w < mag_.size(); ++w) {
            if (mag_[w] != 0) {
                std::uint32_t v = mag_[w];
                std::size_t b = 0;
                while (!(v & 1u)) { v >>= 1; ++b; }
                return w * 32 + b;
            }
        }
        return 0;
    }

    void shr_bits(std::size_t bits) {
        if (bits == 0 || mag_.empty()) return;
        std::size_t words = bits / 32, rem = bits % 32;
        if (words >= mag_.size()) { mag_.clear(); neg_ = false; return; }
        mag_.erase(mag_.begin(), mag_.begin() + static_cast<std::ptrdiff_t>(words));
        if (rem != 0) {
            for (std::size_t i = 0; i < mag_.size(); ++i) {
                std::uint32_t hi = (i + 1 < mag_.size()) ? mag_[i + 1] : 0;
                mag_[i] = (mag_[i] >> rem) | (hi << (32 - rem));
            }
        }
        trim();
    }

    static std::size_t bit_length_of(const std::vector<std::uint32_t>& m) {
        if (m.empty()) return 0;
        std::uint32_t top = m.back();
        std::size_t bits = (m.size() - 1) * 32;
        while (top != 0) { ++bits; top >>= 1; }
        return bits;
    }

    static int cmp_mag(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
        if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
        for (std::size_t i = a.size(); i > 0; ) {
            --i;
            if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
        }
        return 0;
    }

    static std::vector<std::uint32_t> add_mag(const std::vector<std::uint32_t>& a,
                                              const std::vector<std::uint32_t>& b) {
        const auto& big = a.size() >= b.size() ? a : b;
        const auto& small = a.size() >= b.size() ? b : a;
        std::vector<std::uint32_t> r = big;
        std::uint64_t carry = 0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            std::uint64_t cur = static_cast<std::uint64_t>(r[i]) + carry +
                                (i < small.size() ? small[i] : 0);
            r[i] = static_cast<std::uint32_t>(cur & 0xffffffffu);
            carry = cur >> 32;
            if (carry == 0 && i >= small.size()) break;
        }
        if (carry != 0) r.push_back(static_cast<std::uint32_t>(carry));
        return r;
    }

    // requires a >= b
    static std::vector<std::uint32_t> sub_mag(const std::vector<std::uint32_t>& a,
                                              const std::vector<std::uint32_t>& b) {
        std::vector<std::uint32_t> r = a;
        std::int64_t borrow = 0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            std::int64_t cur = static_cast<std::int64_t>(r[i]) - borrow -
                               (i < b.size() ? static_cast<std::int64_t>(b[i]) : 0);
            if (cur < 0) { cur += (1ll << 32); borrow = 1; }
            else borrow = 0;
            r[i] = static_cast<std::uint32_t>(cur);
            if (borrow == 0 && i >= b.size()) break;
        }
        while (!r.empty() && r.back() == 0) r.pop_back();
        return r;
    }

    static std::vector<std::uint32_t> shl_mag(const std::vector<std::uint32_t>& m, std::size_t bits) {
        std::size_t words = bits / 32, rem = bits % 32;
        std::vector<std::uint32_t> r(words, 0);
        r.insert(r.end(), m.begin(), m.end());
        if (rem != 0) {
            std::uint32_t carry = 0;
            for (std::size_t i = words; i < r.size(); ++i) {
                std::uint32_t nxt = r[i] >> (32 - rem);
                r[i] = (r[i] << rem) | carry;
                carry = nxt;
            }
            if (carry != 0) r.push_back(carry);
        }
        return r;
    }

    static void shr1_mag(std::vector<std::uint32_t>& m) {
        for (std::size_t i = 0; i < m.size(); ++i) {
            std::uint32_t hi = (i + 1 < m.size()) ? m[i + 1] : 0;
            m[i] = (m[i] >> 1) | (hi << 31);
        }
        while (!m.empty() && m.back() == 0) m.pop_back();
    }
};

}  // namespace hyreg
