#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "semirat/errors.hpp"
#include "semirat/exact.hpp"
#include "semirat/polynomial.hpp"
#include "semirat/rational_function.hpp"

namespace semirat {

/// 1/(1+z)
inline RationalFunction backward_euler() {
    return {Polynomial{ExactComplex(1)}, Polynomial{ExactComplex(1), ExactComplex(1)}};
}

/// (1 - z/2)/(1 + z/2)
inline RationalFunction crank_nicolson() {
    const ExactComplex half(Rational(1, 2));
    return {Polynomial{ExactComplex(1), -half}, Polynomial{ExactComplex(1), half}};
}

/// Cayley transform (z - z0)/(z + conj z0), z0 = tau e^{i phi} in the open right half-plane.
/// Coefficients are the exact dyadic values of their double approximations.
inline RationalFunction cayley(double tau, double phi) {
    if (!(tau > 0.0) || !(std::abs(phi) < M_PI / 2))
        throw PreconditionViolation("cayley: need tau > 0 and |phi| < pi/2");
    const ExactComplex z0 = ExactComplex::from_double(std::polar(tau, phi));
    return {Polynomial{-z0, ExactComplex(1)}, Polynomial{z0.conj(), ExactComplex(1)}};
}

/// (z - e^{-i phi})/(z + e^{-i phi}); modulus one on the ray arg z = pi/2 - phi.
inline RationalFunction rotated_cayley(double phi) {
    const ExactComplex w = ExactComplex::from_double(std::polar(1.0, -phi));
    return {Polynomial{-w, ExactComplex(1)}, Polynomial{w, ExactComplex(1)}};
}

/// (z + 1 - e^{-i phi})/(z + 1 + e^{i phi})
inline RationalFunction shifted_cayley(double phi) {
    if (!(std::abs(phi) < M_PI / 2)) throw PreconditionViolation("shiftcayley: need |phi| < pi/2");
    const ExactComplex one(1);
    const ExactComplex em = ExactComplex::from_double(std::polar(1.0, -phi));
    const ExactComplex ep = ExactComplex::from_double(std::polar(1.0, phi));
    return {Polynomial{one - em, one}, Polynomial{one + ep, one}};
}

/// (1 - 4z^3)/(1 + z + 4z^3): order one, r(inf) = -1, A(pi/6, 2)-stable.
inline RationalFunction pi6_cubic_example() {
    return {Polynomial{ExactComplex(1), ExactComplex(0), ExactComplex(0), ExactComplex(-4)},
            Polynomial{ExactComplex(1), ExactComplex(1), ExactComplex(0), ExactComplex(4)}};
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline double parse_double(std::string_view s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(std::string(s), &used);
        if (used != s.size()) throw ParseError("trailing characters in '" + std::string(s) + "'");
        return v;
    } catch (const std::logic_error&) {
        throw ParseError("bad number '" + std::string(s) + "'");
    }
}

inline Polynomial parse_coeff_list(std::string_view s) {
    std::vector<ExactComplex> c;
    for (auto tok : split(s, ',')) c.push_back(parse_exact_complex(tok));
    return Polynomial(std::move(c));
}

}  // namespace detail

/// Parses the scheme mini-language:
///   be | cn | pade:k | cayley:tau,phi | shiftcayley:phi | paper-pi6 |
///   ratio:<num>|<den>
/// Coefficient lists are comma separated, ascending, each `p/q` or `p/q+p'/q'i`.
/// `ratio:` also accepts `//` or a single `/` as separator when unambiguous.
inline RationalFunction parse_scheme(std::string_view spec, int degree_limit = kDefaultDegreeLimit) {
    const std::size_t colon = spec.find(':');
    const std::string_view head = spec.substr(0, colon);
    const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
    auto need_arg = [&] {
        if (arg.empty()) throw ParseError("scheme '" + std::string(head) + "' needs an argument");
    };
    if (head == "be" && arg.empty()) return backward_euler();
    if (head == "cn" && arg.empty()) return crank_nicolson();
    if (head == "paper-pi6" && arg.empty()) return pi6_cubic_example();
    if (head == "pade") {
        need_arg();
        const double k = detail::parse_double(arg);
        if (k != std::floor(k) || k < 1) throw ParseError("pade:k needs a positive integer");
        return pade_exp(static_cast<int>(k), degree_limit);
    }
    if (head == "cayley") {
        need_arg();
        const auto parts = detail::split(arg, ',');
        if (parts.size() != 2) throw ParseError("cayley:tau,phi");
        return cayley(detail::parse_double(parts[0]), detail::parse_double(parts[1]));
    }
    if (head == "shiftcayley") {
        need_arg();
        return shifted_cayley(detail::parse_double(arg));
    }
    if (head == "ratio") {
        need_arg();
        std::string_view num_s, den_s;
        if (auto bar = arg.find('|'); bar != std::string_view::npos) {
            num_s = arg.substr(0, bar);
            den_s = arg.substr(bar + 1);
        } else if (auto dbl = arg.find("//"); dbl != std::string_view::npos) {
            num_s = arg.substr(0, dbl);
            den_s = arg.substr(dbl + 2);
        } else {
            const auto parts = detail::split(arg, '/');
            if (parts.size() != 2)
                throw ParseError("ratio: ambiguous '/' split; separate numerator and denominator with '|'");
            num_s = parts[0];
            den_s = parts[1];
        }
        Polynomial num = detail::parse_coeff_list(num_s);
        Polynomial den = detail::parse_coeff_list(den_s);
        if (den.is_zero()) throw ParseError("ratio: zero denominator");
        if (num.degree() > degree_limit || den.degree() > degree_limit)
            throw DegreeLimitExceeded("ratio: degree above limit");
        return {std::move(num), std::move(den)};
    }
    throw ParseError("unknown scheme '" + std::string(spec) + "'");
}

}  // namespace semirat
