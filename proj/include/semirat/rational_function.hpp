#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "semirat/errors.hpp"
#include "semirat/exact.hpp"
#include "semirat/polynomial.hpp"

namespace semirat {

/// Largest numerator/denominator degree accepted by the exact constructors.
inline constexpr int kDefaultDegreeLimit = 64;

enum class EvalMode { fast, exact };

/// Taylor coefficients c_0..c_N of r at 0.
struct TaylorData {
    std::vector<ExactComplex> coeffs;
};

/// r(z) = value_at_inf - a / z^m + O(|z|^{-(m+1)}) as z -> infinity.
struct InfinityExpansion {
    ExactComplex value_at_inf;
    ExactComplex a;
    int m = 0;
};

/// Quotient num/den of exact polynomials, kept reduced (gcd = 1) and
/// normalised so that den(0) = 1 when den(0) != 0, otherwise den is monic.
class RationalFunction {
public:
    RationalFunction() : RationalFunction(Polynomial::constant(1), Polynomial::constant(1)) {}

    RationalFunction(Polynomial num, Polynomial den) {
        if (den.is_zero()) throw std::domain_error("RationalFunction: zero denominator");
        if (num.is_zero()) {
            num_ = {};
            den_ = Polynomial::constant(1);
        } else {
            const Polynomial g = gcd(num, den);
            num_ = divmod(num, g).first;
            den_ = divmod(den, g).first;
            const ExactComplex scale = den_.coeff(0).is_zero() ? den_.leading() : den_.coeff(0);
            if (scale != ExactComplex(1)) {
                num_ = Polynomial::constant(ExactComplex(1) / scale) * num_;
                den_ = Polynomial::constant(ExactComplex(1) / scale) * den_;
            }
        }
        num_d_ = num_.to_cplx();
        den_d_ = den_.to_cplx();
        dnum_d_ = num_.derivative().to_cplx();
        dden_d_ = den_.derivative().to_cplx();
        rnum_d_ = reversed_d(num_d_);
        rden_d_ = reversed_d(den_d_);
        rdnum_d_ = reversed_derivative_d(num_d_);
        rdden_d_ = reversed_derivative_d(den_d_);
    }

    [[nodiscard]] const Polynomial& num() const { return num_; }
    [[nodiscard]] const Polynomial& den() const { return den_; }

    [[nodiscard]] bool is_constant() const { return num_.degree() <= 0 && den_.degree() == 0; }
    [[nodiscard]] bool bounded_at_infinity() const { return num_.degree() <= den_.degree(); }
    [[nodiscard]] bool holomorphic_at_zero() const { return !den_.coeff(0).is_zero(); }
    [[nodiscard]] bool has_real_coeffs() const { return num_.has_real_coeffs() && den_.has_real_coeffs(); }

    /// num(z)/den(z). Throws PoleHit when |den(z)| is at rounding level.
    [[nodiscard]] cplx operator()(cplx z, EvalMode mode = EvalMode::fast) const {
        if (mode == EvalMode::exact) {
            const ExactComplex ze = ExactComplex::from_double(z);
            const ExactComplex d = den_.eval(ze);
            if (d.is_zero()) throw PoleHit("denominator vanishes at " + ze.to_string());
            return (num_.eval(ze) / d).to_cplx();
        }
        if (std::abs(z) > 1.0) return value_and_derivative(z).first;
        const cplx d = horner(den_d_, z);
        check_pole(d, den_d_, z);
        return horner(num_d_, z) / d;
    }

    /// Value and derivative at z in one pass. For |z| > 1 the reversed
    /// polynomials are evaluated at 1/z so that large arguments cannot overflow.
    [[nodiscard]] std::pair<cplx, cplx> value_and_derivative(cplx z) const {
        if (num_d_.empty()) return {0.0, 0.0};
        if (std::abs(z) <= 1.0) {
            const cplx d = horner(den_d_, z);
            check_pole(d, den_d_, z);
            const cplx n = horner(num_d_, z);
            const cplx dn = horner(dnum_d_, z);
            const cplx dd = horner(dden_d_, z);
            return {n / d, (dn * d - n * dd) / (d * d)};
        }
        const cplx w = 1.0 / z;
        const cplx d = horner(rden_d_, w);
        check_pole(d, rden_d_, z);
        const cplx n = horner(rnum_d_, w);
        const cplx dn = horner(rdnum_d_, w);
        const cplx dd = horner(rdden_d_, w);
        const int shift = static_cast<int>(den_d_.size()) - static_cast<int>(num_d_.size());
        const cplx zpow = shift >= 0 ? ipow(w, shift) : ipow(z, -shift);
        return {zpow * n / d, zpow * w * (dn * d - n * dd) / (d * d)};
    }

    [[nodiscard]] cplx derivative_at(cplx z) const { return value_and_derivative(z).second; }

    /// r(infinity) as a double; only meaningful when bounded at infinity.
    [[nodiscard]] cplx value_at_infinity() const {
        if (!bounded_at_infinity()) throw UnboundedAtInfinity("deg num > deg den");
        if (num_.degree() < den_.degree()) return 0.0;
        return (num_.leading() / den_.leading()).to_cplx();
    }

    [[nodiscard]] ExactComplex exact_value_at_zero() const {
        if (!holomorphic_at_zero()) throw NotHolomorphicAtZero("den(0) = 0");
        return num_.coeff(0) / den_.coeff(0);
    }

    friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const RationalFunction& a, const RationalFunction& b) { return !(a == b); }

    /// `ratio:<num>|<den>` form accepted by parse_scheme.
    [[nodiscard]] std::string to_string() const {
        return "ratio:" + num_.to_string() + "|" + den_.to_string();
    }

private:
    static cplx ipow(cplx x, int k) {
        cplx out = 1.0;
        while (k > 0) {
            if (k & 1) out *= x;
            x *= x;
            k >>= 1;
        }
        return out;
    }

    // Reversed coefficients of p, with p' taken against the degree of p itself
    // so that p'(z) = z^{deg p - 1} rev'(1/z).
    static std::vector<cplx> reversed_d(const std::vector<cplx>& c) { return {c.rbegin(), c.rend()}; }
    static std::vector<cplx> reversed_derivative_d(const std::vector<cplx>& c) {
        std::vector<cplx> d;
        for (std::size_t k = c.size(); k-- > 1;) d.push_back(static_cast<double>(k) * c[k]);
        return d;
    }

    void check_pole(cplx d, const std::vector<cplx>& coeffs, cplx z) const {
        double scale = 0.0;
        const double az = std::abs(z) > 1.0 ? 1.0 / std::abs(z) : std::abs(z);
        double p = 1.0;
        for (const auto& c : coeffs) {
            scale += std::abs(c) * p;
            p *= az;
        }
        if (!(std::abs(d) > 64.0 * std::numeric_limits<double>::epsilon() * scale))
            throw PoleHit("|den(z)| at rounding level for z = (" + std::to_string(z.real()) + ", " +
                          std::to_string(z.imag()) + ")");
    }

    Polynomial num_;
    Polynomial den_;
    std::vector<cplx> num_d_, den_d_, dnum_d_, dden_d_;
    std::vector<cplx> rnum_d_, rden_d_, rdnum_d_, rdden_d_;
};

/// (num' den - num den') / den^2, reduced.
inline RationalFunction rational_derivative(const RationalFunction& r) {
    return {r.num().derivative() * r.den() - r.num() * r.den().derivative(), r.den() * r.den()};
}

/// Exact power series of a/b at 0 through degree n_terms-1; b(0) must be nonzero.
inline std::vector<ExactComplex> series_quotient(const Polynomial& a, const Polynomial& b, int n_terms) {
    const ExactComplex b0 = b.coeff(0);
    if (b0.is_zero()) throw NotHolomorphicAtZero("series of a quotient with b(0) = 0");
    std::vector<ExactComplex> c(static_cast<std::size_t>(std::max(n_terms, 0)));
    for (int k = 0; k < n_terms; ++k) {
        ExactComplex acc = a.coeff(k);
        for (int j = 1; j <= std::min(k, b.degree()); ++j)
            acc -= b.coeffs()[static_cast<std::size_t>(j)] * c[static_cast<std::size_t>(k - j)];
        c[static_cast<std::size_t>(k)] = acc / b0;
    }
    return c;
}

inline TaylorData taylor_at_zero(const RationalFunction& r, int N) {
    if (N < 0) throw PreconditionViolation("taylor_at_zero: N < 0");
    if (!r.holomorphic_at_zero()) throw NotHolomorphicAtZero("den(0) = 0");
    return {series_quotient(r.num(), r.den(), N + 1)};
}

inline InfinityExpansion expansion_at_infinity(const RationalFunction& r) {
    if (!r.bounded_at_infinity()) throw UnboundedAtInfinity("deg num > deg den");
    if (r.is_constant()) throw ConstantFunction("r is constant");
    const int dn = r.num().degree();
    const int dd = r.den().degree();
    // r(1/w) = w^(dd-dn) * rev(num)(w) / rev(den)(w), rev(den)(0) = lead(den) != 0
    const int shift = dd - dn;
    const int n_terms = dn + dd + 2;
    const auto s = series_quotient(r.num().reversed(), r.den().reversed(), n_terms);
    auto coeff = [&](int k) -> ExactComplex {
        const int j = k - shift;
        return (j >= 0 && j < n_terms) ? s[static_cast<std::size_t>(j)] : ExactComplex{};
    };
    InfinityExpansion out;
    out.value_at_inf = coeff(0);
    for (int k = 1; k <= shift + n_terms; ++k) {
        ExactComplex c = coeff(k);
        if (!c.is_zero()) {
            out.m = k;
            out.a = -c;
            return out;
        }
    }
    throw ConstantFunction("no non-constant term at infinity");
}

/// z -> r(z + eps).
inline RationalFunction shift(const RationalFunction& r, const Rational& eps) {
    if (sgn(eps) < 0) throw PreconditionViolation("shift: eps < 0");
    const ExactComplex one(1);
    const ExactComplex e(eps);
    return {r.num().compose_affine(one, e), r.den().compose_affine(one, e)};
}

/// z -> r(k z).
inline RationalFunction scale_arg(const RationalFunction& r, const Rational& k) {
    if (sgn(k) <= 0) throw PreconditionViolation("scale_arg: k must be positive");
    const ExactComplex kk(k);
    const ExactComplex zero;
    return {r.num().compose_affine(kk, zero), r.den().compose_affine(kk, zero)};
}

/// Solves M x = b exactly by Gauss-Jordan elimination with nonzero pivoting.
inline std::vector<Rational> solve_exact(std::vector<std::vector<Rational>> M, std::vector<Rational> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && sgn(M[piv][col]) == 0) ++piv;
        if (piv == n) throw std::domain_error("solve_exact: singular system");
        std::swap(M[piv], M[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col || sgn(M[row][col]) == 0) continue;
            const Rational f = M[row][col] / M[col][col];
            for (std::size_t j = col; j < n; ++j) M[row][j] -= f * M[col][j];
            b[row] -= f * b[col];
        }
    }
    std::vector<Rational> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / M[i][i];
    return x;
}

/// Exact Taylor coefficients of e^{-z} through degree N.
inline std::vector<Rational> exp_neg_taylor(int N) {
    std::vector<Rational> e(static_cast<std::size_t>(N) + 1);
    Rational term(1);
    for (int j = 0; j <= N; ++j) {
        e[static_cast<std::size_t>(j)] = term;
        term /= -(j + 1);
    }
    return e;
}

/// Diagonal (k,k) Pade approximant P_k/Q_k of e^{-z}, from the linear
/// order conditions with Q_k(0) = 1. The result is certified against the
/// order conditions before it is returned.
inline RationalFunction pade_exp(int k, int degree_limit = kDefaultDegreeLimit) {
    if (k < 1) throw PreconditionViolation("pade_exp: k must be >= 1");
    if (k > degree_limit) throw DegreeLimitExceeded("pade_exp: k = " + std::to_string(k));
    const auto e = exp_neg_taylor(2 * k);
    const auto K = static_cast<std::size_t>(k);
    // rows j = k+1..2k:  sum_{i=1..k} Q_i e_{j-i} = -e_j
    std::vector<std::vector<Rational>> M(K, std::vector<Rational>(K));
    std::vector<Rational> rhs(K);
    for (std::size_t row = 0; row < K; ++row) {
        const std::size_t j = K + 1 + row;
        for (std::size_t i = 1; i <= K; ++i) M[row][i - 1] = e[j - i];
        rhs[row] = -e[j];
    }
    const auto qsol = solve_exact(std::move(M), std::move(rhs));
    std::vector<ExactComplex> Q(K + 1), P(K + 1);
    Q[0] = ExactComplex(1);
    for (std::size_t i = 1; i <= K; ++i) Q[i] = ExactComplex(qsol[i - 1]);
    for (std::size_t j = 0; j <= K; ++j) {
        Rational acc(0);
        for (std::size_t i = 0; i <= j; ++i) acc += Q[i].re * e[j - i];
        P[j] = ExactComplex(acc);
    }
    // certify: P - Q * e^{-z} = O(z^{2k+1})
    for (std::size_t j = 0; j <= 2 * K; ++j) {
        Rational acc = j <= K ? P[j].re : Rational(0);
        for (std::size_t i = 0; i <= std::min(j, K); ++i) acc -= Q[i].re * e[j - i];
        if (sgn(acc) != 0) throw std::logic_error("pade_exp: order conditions not satisfied");
    }
    return {Polynomial(std::move(P)), Polynomial(std::move(Q))};
}

}  // namespace semirat
