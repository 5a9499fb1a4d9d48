#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <complex>
#include <ostream>
#include <string>
#include <string_view>

#include "semirat/errors.hpp"

namespace semirat {

using cplx = std::complex<double>;

/// Arbitrary-precision rational number (GMP).
using Rational = mpq_class;

/// Exact rational from a finite double. Every double is a dyadic rational,
/// so the conversion is lossless.
inline Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw PreconditionViolation("non-finite value cannot be made exact");
    Rational q(x);
    q.canonicalize();
    return q;
}

/// Complex number whose real and imaginary parts are exact rationals.
struct ExactComplex {
    Rational re{0};
    Rational im{0};

    ExactComplex() = default;
    ExactComplex(long v) : re(v), im(0) {}  // NOLINT(google-explicit-constructor)
    ExactComplex(Rational r) : re(std::move(r)), im(0) {}  // NOLINT
    ExactComplex(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

    static ExactComplex from_double(cplx z) {
        return {rational_from_double(z.real()), rational_from_double(z.imag())};
    }

    [[nodiscard]] bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    [[nodiscard]] bool is_real() const { return sgn(im) == 0; }

    [[nodiscard]] cplx to_cplx() const { return {re.get_d(), im.get_d()}; }

    [[nodiscard]] ExactComplex conj() const { return {re, -im}; }

    /// |z|^2, exact.
    [[nodiscard]] Rational norm2() const { return Rational(re * re + im * im); }

    ExactComplex& operator+=(const ExactComplex& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    ExactComplex& operator-=(const ExactComplex& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    ExactComplex& operator*=(const ExactComplex& o) {
        Rational r = re * o.re - im * o.im;
        Rational i = re * o.im + im * o.re;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }
    ExactComplex& operator/=(const ExactComplex& o) {
        const Rational d = o.norm2();
        if (sgn(d) == 0) throw std::domain_error("ExactComplex: division by zero");
        Rational r = (re * o.re + im * o.im) / d;
        Rational i = (im * o.re - re * o.im) / d;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }

    friend ExactComplex operator+(ExactComplex a, const ExactComplex& b) { return a += b; }
    friend ExactComplex operator-(ExactComplex a, const ExactComplex& b) { return a -= b; }
    friend ExactComplex operator*(ExactComplex a, const ExactComplex& b) { return a *= b; }
    friend ExactComplex operator/(ExactComplex a, const ExactComplex& b) { return a /= b; }
    friend ExactComplex operator-(const ExactComplex& a) { return {Rational(-a.re), Rational(-a.im)}; }

    friend bool operator==(const ExactComplex& a, const ExactComplex& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const ExactComplex& a, const ExactComplex& b) { return !(a == b); }

    /// Mini-language form: `p/q`, `p/qi`, or `p/q+p'/q'i`.
    [[nodiscard]] std::string to_string() const {
        if (sgn(im) == 0) return re.get_str();
        std::string imag = (im == 1) ? "" : (im == -1) ? "-" : im.get_str();
        if (sgn(re) == 0) return imag + "i";
        return re.get_str() + (sgn(im) > 0 ? "+" : "") + imag + "i";
    }
};

inline std::ostream& operator<<(std::ostream& os, const ExactComplex& z) { return os << z.to_string(); }

namespace detail {

inline Rational parse_unsigned_rational(std::string_view s) {
    if (s.empty()) throw ParseError("empty rational");
    for (char c : s)
        if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '/'))
            throw ParseError("bad rational '" + std::string(s) + "'");
    Rational q;
    if (q.set_str(std::string(s), 10) != 0) throw ParseError("bad rational '" + std::string(s) + "'");
    if (s.find('/') != std::string_view::npos && sgn(q.get_den()) == 0)
        throw ParseError("zero denominator in '" + std::string(s) + "'");
    q.canonicalize();
    return q;
}

}  // namespace detail

/// Parses `p/q`, `-p/q`, `p/qi`, `i`, `p/q+p'/q'i`, `p/q-p'/q'i`.
inline ExactComplex parse_exact_complex(std::string_view s) {
    if (s.empty()) throw ParseError("empty coefficient");
    ExactComplex out;
    bool have_re = false;
    bool have_im = false;
    std::size_t pos = 0;
    while (pos < s.size()) {
        int sign = 1;
        if (s[pos] == '+' || s[pos] == '-') {
            sign = s[pos] == '-' ? -1 : 1;
            ++pos;
        } else if (pos != 0) {
            throw ParseError("expected sign in '" + std::string(s) + "'");
        }
        std::size_t end = pos;
        while (end < s.size() && s[end] != '+' && s[end] != '-') ++end;
        std::string_view term = s.substr(pos, end - pos);
        if (term.empty()) throw ParseError("dangling sign in '" + std::string(s) + "'");
        if (term.back() == 'i') {
            if (have_im) throw ParseError("two imaginary parts in '" + std::string(s) + "'");
            term.remove_suffix(1);
            Rational v = term.empty() ? Rational(1) : detail::parse_unsigned_rational(term);
            out.im = sign * v;
            have_im = true;
        } else {
            if (have_re || have_im) throw ParseError("malformed coefficient '" + std::string(s) + "'");
            out.re = sign * detail::parse_unsigned_rational(term);
            have_re = true;
        }
        pos = end;
    }
    return out;
}

}  // namespace semirat
