#pragma once

#include <cmath>
#include <complex>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "semirat/exact.hpp"

namespace semirat {

/// Univariate polynomial with exact complex coefficients, ascending order.
/// The zero polynomial has no coefficients; otherwise the last one is nonzero.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<ExactComplex> coeffs) : c_(std::move(coeffs)) { trim(); }
    Polynomial(std::initializer_list<ExactComplex> coeffs) : c_(coeffs) { trim(); }

    static Polynomial constant(ExactComplex c) { return Polynomial({std::move(c)}); }
    /// z^k
    static Polynomial monomial(int k, ExactComplex c = ExactComplex(1)) {
        std::vector<ExactComplex> v(static_cast<std::size_t>(k) + 1);
        v.back() = std::move(c);
        return Polynomial(std::move(v));
    }

    [[nodiscard]] bool is_zero() const { return c_.empty(); }
    /// -1 for the zero polynomial.
    [[nodiscard]] int degree() const { return static_cast<int>(c_.size()) - 1; }
    [[nodiscard]] const std::vector<ExactComplex>& coeffs() const { return c_; }

    /// Coefficient of z^k (zero beyond the degree).
    [[nodiscard]] ExactComplex coeff(int k) const {
        if (k < 0 || k > degree()) return {};
        return c_[static_cast<std::size_t>(k)];
    }
    [[nodiscard]] const ExactComplex& leading() const { return c_.back(); }

    [[nodiscard]] bool has_real_coeffs() const {
        for (const auto& c : c_)
            if (!c.is_real()) return false;
        return true;
    }

    [[nodiscard]] ExactComplex eval(const ExactComplex& z) const {
        ExactComplex acc;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
            acc *= z;
            acc += *it;
        }
        return acc;
    }

    [[nodiscard]] cplx eval(cplx z) const {
        cplx acc = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + it->to_cplx();
        return acc;
    }

    [[nodiscard]] Polynomial derivative() const {
        if (c_.size() <= 1) return {};
        std::vector<ExactComplex> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * ExactComplex(static_cast<long>(k));
        return Polynomial(std::move(d));
    }

    /// p(a z + b), exact.
    [[nodiscard]] Polynomial compose_affine(const ExactComplex& a, const ExactComplex& b) const {
        Polynomial result;
        const Polynomial lin({b, a});
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) result = result * lin + constant(*it);
        return result;
    }

    /// z^d p(1/z) with d = degree(); coefficients reversed.
    [[nodiscard]] Polynomial reversed() const {
        return Polynomial(std::vector<ExactComplex>(c_.rbegin(), c_.rend()));
    }

    [[nodiscard]] Polynomial monic() const {
        if (is_zero()) return {};
        Polynomial p = *this;
        const ExactComplex lc = leading();
        for (auto& c : p.c_) c /= lc;
        return p;
    }

    [[nodiscard]] std::vector<cplx> to_cplx() const {
        std::vector<cplx> out;
        out.reserve(c_.size());
        for (const auto& c : c_) out.push_back(c.to_cplx());
        return out;
    }

    Polynomial& operator+=(const Polynomial& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
        trim();
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
        trim();
        return *this;
    }
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<ExactComplex> out(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i].is_zero()) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
        }
        return Polynomial(std::move(out));
    }
    friend Polynomial operator*(const ExactComplex& s, const Polynomial& p) {
        return constant(s) * p;
    }
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }
    friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

    /// Euclidean division: a = q*b + r with deg r < deg b.
    friend std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b) {
        if (b.is_zero()) throw std::domain_error("polynomial division by zero");
        if (a.degree() < b.degree()) return {Polynomial{}, a};
        std::vector<ExactComplex> rem = a.c_;
        std::vector<ExactComplex> quo(static_cast<std::size_t>(a.degree() - b.degree() + 1));
        const ExactComplex& lb = b.leading();
        for (int k = a.degree() - b.degree(); k >= 0; --k) {
            const auto top = static_cast<std::size_t>(k + b.degree());
            if (rem[top].is_zero()) continue;
            ExactComplex f = rem[top] / lb;
            for (std::size_t j = 0; j < b.c_.size(); ++j) rem[static_cast<std::size_t>(k) + j] -= f * b.c_[j];
            quo[static_cast<std::size_t>(k)] = std::move(f);
        }
        return {Polynomial(std::move(quo)), Polynomial(std::move(rem))};
    }

    /// Monic greatest common divisor (zero if both are zero).
    friend Polynomial gcd(Polynomial a, Polynomial b) {
        while (!b.is_zero()) {
            Polynomial r = divmod(a, b).second;
            a = std::move(b);
            // keep the remainder monic to slow coefficient growth
            b = r.monic();
        }
        return a.monic();
    }

    [[nodiscard]] std::string to_string() const {
        if (is_zero()) return "0";
        std::string s;
        for (std::size_t k = 0; k < c_.size(); ++k) {
            if (k) s += ",";
            s += c_[k].to_string();
        }
        return s;
    }

private:
    void trim() {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    }

    std::vector<ExactComplex> c_;
};

/// Horner evaluation of ascending double coefficients.
inline cplx horner(const std::vector<cplx>& c, cplx z) {
    cplx acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
}

}  // namespace semirat
