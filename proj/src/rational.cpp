#include "coboundary/rational.hpp"

#include <ostream>

#include "coboundary/errors.hpp"

namespace coboundary {

Rational::Rational(long n, long d) {
    if (d == 0) throw ParseError("zero denominator");
    v_ = mpq_class(n, d);
    v_.canonicalize();
}

Rational::Rational(mpz_class n, mpz_class d) {
    if (sgn(d) == 0) throw ParseError("zero denominator");
    v_ = mpq_class(std::move(n), std::move(d));
    v_.canonicalize();
}

Rational Rational::parse(std::string_view text) {
    if (text.empty()) throw ParseError("empty rational literal");
    const auto slash = text.find('/');
    const std::string num_s(text.substr(0, slash));
    mpz_class num, den(1);
    if (mpz_set_str(num.get_mpz_t(), num_s.c_str(), 10) != 0)
        throw ParseError("bad rational literal: '" + std::string(text) + "'");
    if (slash != std::string_view::npos) {
        const std::string den_s(text.substr(slash + 1));
        if (den_s.empty() || mpz_set_str(den.get_mpz_t(), den_s.c_str(), 10) != 0)
            throw ParseError("bad rational literal: '" + std::string(text) + "'");
        if (sgn(den) == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    }
    return Rational(std::move(num), std::move(den));
}

std::string Rational::str() const {
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

mpz_class Rational::floor() const {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), num().get_mpz_t(), den().get_mpz_t());
    return q;
}

mpz_class Rational::ceil() const {
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), num().get_mpz_t(), den().get_mpz_t());
    return q;
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.is_zero()) throw Error("division by zero");
    v_ /= o.v_;
    return *this;
}

Rational Rational::pow(const Rational& base, long e) {
    if (e == 0) return Rational(1);
    if (base.is_zero()) {
        if (e < 0) throw Error("zero to a negative power");
        return Rational(0);
    }
    const unsigned long k = e < 0 ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
    mpz_class n, d;
    mpz_pow_ui(n.get_mpz_t(), base.num().get_mpz_t(), k);
    mpz_pow_ui(d.get_mpz_t(), base.den().get_mpz_t(), k);
    if (e < 0) std::swap(n, d);
    return Rational(std::move(n), std::move(d));
}

Rational Rational::pow2(const mpz_class& e) {
    if (sgn(e) < 0) throw InvalidExponents("pow2 wants a nonnegative exponent");
    if (!e.fits_ulong_p()) throw InvalidExponents("pow2 exponent too large to materialize");
    mpz_class v(1);
    mpz_mul_2exp(v.get_mpz_t(), v.get_mpz_t(), e.get_ui());
    return Rational(std::move(v), mpz_class(1));
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

namespace {

// Floor of the b-th root; second result tells whether it was exact.
std::pair<mpz_class, bool> root_floor(const mpz_class& x, unsigned long b) {
    mpz_class r;
    const bool exact = mpz_root(r.get_mpz_t(), x.get_mpz_t(), b) != 0;
    return {r, exact};
}

// x^(a/b) with a > 0, b > 0, x > 0. Core of pow_bracket.
RationalBracket pos_pow_bracket(const Rational& x, const mpz_class& a, const mpz_class& b,
                                const Rational& rel_width) {
    if (!a.fits_slong_p() || !b.fits_ulong_p())
        throw InvalidExponents("exponent too large for bracketed power");
    const unsigned long bu = b.get_ui();
    const Rational xa = Rational::pow(x, a.get_si());
    if (bu == 1) return RationalBracket::point(xa);

    // Exact when both b-th roots exist.
    auto [rn, en] = root_floor(xa.num(), bu);
    auto [rd, ed] = root_floor(xa.den(), bu);
    if (en && ed) return RationalBracket::point(Rational(rn, rd));

    // Scale by S = 2^k and take integer roots of floor(num * S^b / den):
    //   L/S <= xa^(1/b) < (L+1)/S.
    // Grow k until the relative width 1/L is small enough.
    const mpz_class want = (Rational(1) / rel_width).ceil() + 1;
    unsigned long k = 16;
    for (;;) {
        mpz_class scaled_num;
        mpz_mul_2exp(scaled_num.get_mpz_t(), xa.num().get_mpz_t(), k * bu);
        mpz_class m;
        mpz_fdiv_q(m.get_mpz_t(), scaled_num.get_mpz_t(), xa.den().get_mpz_t());
        auto [L, lex] = root_floor(m, bu);
        if (L >= want) {
            mpz_class s(1);
            mpz_mul_2exp(s.get_mpz_t(), s.get_mpz_t(), k);
            return {Rational(L, s), Rational(L + 1, s), false};
        }
        k *= 2;
        if (k > (1ul << 26)) throw Error("power bracket failed to converge");
    }
}

}  // namespace

RationalBracket pow_bracket(const Rational& x, const Rational& exponent, const Rational& rel_width) {
    if (x.sign() < 0) throw InvalidExponents("bracketed power of a negative base");
    if (exponent.is_zero()) return RationalBracket::point(Rational(1));
    if (x.is_zero()) {
        if (exponent.sign() < 0) throw InvalidExponents("zero to a negative power");
        return RationalBracket::point(Rational(0));
    }
    const bool neg = exponent.sign() < 0;
    const Rational e = neg ? -exponent : exponent;
    RationalBracket r = pos_pow_bracket(x, e.num(), e.den(), rel_width);
    if (neg) {
        if (r.exact) return RationalBracket::point(Rational(1) / r.lower);
        return {Rational(1) / r.upper, Rational(1) / r.lower, false};
    }
    return r;
}

Rational pow_exact(const Rational& x, const Rational& exponent) {
    if (exponent.is_integer()) {
        if (!exponent.num().fits_slong_p())
            throw ExponentNotRepresentable("integer exponent too large");
        return Rational::pow(x, exponent.num().get_si());
    }
    RationalBracket b = pow_bracket(x, exponent);
    if (!b.exact)
        throw ExponentNotRepresentable("(" + x.str() + ")^(" + exponent.str() +
                                       ") is not a rational number");
    return b.lower;
}

}  // namespace coboundary
