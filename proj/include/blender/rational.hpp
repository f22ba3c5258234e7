#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

#include "blender/errors.hpp"

namespace blender {

/// Arbitrary-precision rational in lowest terms with positive denominator.
///
/// Thin value wrapper over mpq_class. All arithmetic is exact and division
/// by zero throws instead of trapping.
class Rational {
public:
    Rational() = default;
    Rational(long v) : q_(v) {}  // NOLINT(google-explicit-constructor)
    Rational(int v) : q_(v) {}   // NOLINT(google-explicit-constructor)
    Rational(long num, long den) {
        if (den == 0) throw DivisionByZeroError();
        q_ = mpq_class(num, den);
        q_.canonicalize();
    }
    explicit Rational(const mpq_class& q) : q_(q) { q_.canonicalize(); }
    explicit Rational(const mpz_class& z) : q_(z) {}

    /// Accepts "p", "p/q", "-p/q" and finite decimals such as "0.01" or "1e-6".
    static Rational parse(std::string_view text);

    const mpq_class& raw() const noexcept { return q_; }
    mpz_class numerator() const { return q_.get_num(); }
    mpz_class denominator() const { return q_.get_den(); }

    int sign() const noexcept { return sgn(q_); }
    bool is_zero() const noexcept { return sign() == 0; }

    /// "p/q", or "p" when the denominator is one.
    std::string str() const {
        if (q_.get_den() == 1) return q_.get_num().get_str();
        return q_.get_num().get_str() + "/" + q_.get_den().get_str();
    }

    /// Nearest double; for display only, never used on certified paths.
    double approx() const { return q_.get_d(); }

    Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
    Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
    Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw DivisionByZeroError();
        q_ /= o.q_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.q_)); }

    friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) == 0; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const int c = cmp(a.q_, b.q_);
        if (c < 0) return std::strong_ordering::less;
        if (c > 0) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    mpq_class q_;
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }
inline const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }

/// base^exp for a non-negative integer exponent.
inline Rational pow(const Rational& base, unsigned long exp) {
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), base.raw().get_num_mpz_t(), exp);
    mpz_pow_ui(den.get_mpz_t(), base.raw().get_den_mpz_t(), exp);
    return Rational(mpq_class(num, den));
}

/// Smallest integer >= r.
inline mpz_class ceil(const Rational& r) {
    mpz_class out;
    mpz_cdiv_q(out.get_mpz_t(), r.raw().get_num_mpz_t(), r.raw().get_den_mpz_t());
    return out;
}

inline Rational Rational::parse(std::string_view text) {
    std::string s(text);
    auto trim = [](std::string& v) {
        const auto b = v.find_first_not_of(" \t\r\n");
        const auto e = v.find_last_not_of(" \t\r\n");
        v = (b == std::string::npos) ? std::string() : v.substr(b, e - b + 1);
    };
    trim(s);
    if (s.empty()) throw ParseError("empty rational literal");

    auto parse_int = [&](const std::string& digits) {
        std::string body = digits;
        if (!body.empty() && body[0] == '+') body.erase(0, 1);
        const std::size_t start = (!body.empty() && body[0] == '-') ? 1 : 0;
        if (body.size() == start) throw ParseError("malformed rational literal '" + s + "'");
        for (std::size_t i = start; i < body.size(); ++i)
            if (body[i] < '0' || body[i] > '9') throw ParseError("malformed rational literal '" + s + "'");
        return mpz_class(body, 10);
    };

    if (const auto slash = s.find('/'); slash != std::string::npos) {
        const mpz_class num = parse_int(s.substr(0, slash));
        const mpz_class den = parse_int(s.substr(slash + 1));
        if (den == 0) throw ParseError("zero denominator in '" + s + "'");
        mpq_class q(num, den);
        q.canonicalize();
        return Rational(q);
    }

    std::string mantissa = s;
    long exponent = 0;
    if (const auto e = s.find_first_of("eE"); e != std::string::npos) {
        mantissa = s.substr(0, e);
        const mpz_class ez = parse_int(s.substr(e + 1));
        if (!ez.fits_slong_p() || abs(ez) > 100000) throw ParseError("exponent out of range in '" + s + "'");
        exponent = ez.get_si();
    }
    bool negative = false;
    if (!mantissa.empty() && (mantissa[0] == '-' || mantissa[0] == '+')) {
        negative = mantissa[0] == '-';
        mantissa.erase(0, 1);
    }
    std::string digits;
    long frac_len = 0;
    bool seen_point = false;
    for (char c : mantissa) {
        if (c == '.' && !seen_point) {
            seen_point = true;
        } else if (c >= '0' && c <= '9') {
            digits.push_back(c);
            if (seen_point) ++frac_len;
        } else {
            throw ParseError("malformed rational literal '" + s + "'");
        }
    }
    if (digits.empty()) throw ParseError("malformed rational literal '" + s + "'");
    mpz_class num(digits, 10);
    if (negative) num = -num;
    const long shift = exponent - frac_len;
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
    mpq_class q = shift < 0 ? mpq_class(num, scale) : mpq_class(num * scale);
    q.canonicalize();
    return Rational(q);
}

}  // namespace blender
