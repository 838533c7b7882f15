#ifndef COBOUNDARY_RATIONAL_HPP
#define COBOUNDARY_RATIONAL_HPP

#include <gmpxx.h>

#include <compare>
#include <iosfwd>
#include <string>
#include <string_view>

namespace coboundary {

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator. All measures, endpoints and function values in
/// this library are values of this type; no floating point enters the core.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}                      // NOLINT(google-explicit-constructor)
    Rational(long n, long d);
    explicit Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }
    Rational(mpz_class n, mpz_class d);

    /// Parses "num/den" or "num". Throws ParseError on malformed input
    /// or a zero denominator.
    static Rational parse(std::string_view text);

    /// Canonical textual form, always "num/den" (denominator printed even
    /// when it is 1, so output is byte-stable).
    std::string str() const;

    const mpz_class& num() const { return v_.get_num(); }
    const mpz_class& den() const { return v_.get_den(); }
    const mpq_class& raw() const { return v_; }

    bool is_zero() const { return sgn(v_) == 0; }
    bool is_integer() const { return v_.get_den() == 1; }
    int sign() const { return sgn(v_); }

    Rational abs() const { return Rational(mpq_class(::abs(v_))); }
    mpz_class floor() const;
    mpz_class ceil() const;

    /// base^e for integer e (negative allowed when base != 0).
    static Rational pow(const Rational& base, long e);
    /// 2^e for huge nonnegative e.
    static Rational pow2(const mpz_class& e);

    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { a += b; return a; }
    friend Rational operator-(Rational a, const Rational& b) { a -= b; return a; }
    friend Rational operator*(Rational a, const Rational& b) { a *= b; return a; }
    friend Rational operator/(Rational a, const Rational& b) { a /= b; return a; }
    friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.v_)); }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const int c = cmp(a.v_, b.v_);
        if (c < 0) return std::strong_ordering::less;
        if (c > 0) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r);

private:
    mpq_class v_;
};

inline Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

/// Closed rational interval certified to contain an (often irrational)
/// value. `exact` brackets have lower == upper.
struct RationalBracket {
    Rational lower;
    Rational upper;
    bool exact = false;

    Rational width() const { return upper - lower; }

    static RationalBracket point(Rational v) { return {v, v, true}; }

    RationalBracket operator+(const RationalBracket& o) const {
        return {lower + o.lower, upper + o.upper, exact && o.exact};
    }
    /// Product of brackets around nonnegative values.
    RationalBracket mul_nonneg(const RationalBracket& o) const {
        return {lower * o.lower, upper * o.upper, exact && o.exact};
    }
};

/// x^(a/b) for x >= 0 and rational exponent, as an exact value when the
/// b-th roots come out rational, otherwise as a bracket whose relative
/// width is at most `rel_width`. The direction of every rounding is
/// recorded by the bracket itself, so callers can compare conservatively.
/// Throws InvalidExponents for 0 raised to a nonpositive power and for
/// negative x.
RationalBracket pow_bracket(const Rational& x, const Rational& exponent,
                            const Rational& rel_width = Rational(1, 100000000));

/// Exact x^(a/b) if representable (throws ExponentNotRepresentable otherwise).
Rational pow_exact(const Rational& x, const Rational& exponent);

}  // namespace coboundary

#endif
