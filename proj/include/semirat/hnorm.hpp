#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "semirat/errors.hpp"
#include "semirat/quadrature.hpp"
#include "semirat/rational_function.hpp"
#include "semirat/roots.hpp"
#include "semirat/sampling.hpp"
#include "semirat/stability.hpp"

namespace semirat {

using HNormResult = QuadResult;

/// Holomorphic f on a sector, seen through its two boundary rays arg z = +-theta.
struct RayFunction {
    std::function<std::pair<cplx, cplx>(cplx)> value_and_derivative;
    double theta = 0.0;
    cplx value_at_inf{};
    bool conj_symmetric = false;  // f(conj z) = conj f(z): both rays carry the same |f'|

    [[nodiscard]] cplx at(cplx z) const { return value_and_derivative(z).first; }
    [[nodiscard]] cplx eval(double t, int sign) const { return at(std::polar(t, sign * theta)); }
    [[nodiscard]] cplx deriv(double t, int sign) const {
        return value_and_derivative(std::polar(t, sign * theta)).second;
    }
    [[nodiscard]] RayFunction at_angle(double new_theta) const {
        RayFunction g = *this;
        g.theta = new_theta;
        return g;
    }
};

inline RayFunction ray_function(const RationalFunction& r, double theta) {
    return {[r](cplx z) { return r.value_and_derivative(z); }, theta,
            r.bounded_at_infinity() ? r.value_at_infinity() : cplx(NAN, NAN), r.has_real_coeffs()};
}

/// e^{-z} / (z + eps)^s
inline RayFunction shifted_exp_ray_function(double eps, double s, double theta) {
    if (eps < 0) throw PreconditionViolation("eps < 0");
    return {[eps, s](cplx z) {
                const cplx e = std::exp(-z);
                const cplx p = std::pow(z + eps, -s);
                return std::pair{e * p, -e * p - s * e * p / (z + eps)};
            },
            theta, 0.0, true};
}

/// Taylor data of h(w) = log r(w) + w at 0, for r with r(0) = 1. Evaluating
/// r(z/n)^n = e^{-z} e^{n h(z/n)} through h keeps e^{-z} - r(z/n)^n free of
/// cancellation when z/n is small.
class LogSeries {
public:
    static constexpr int kTerms = 96;

    explicit LogSeries(const RationalFunction& r) {
        if (!r.holomorphic_at_zero()) throw NotHolomorphicAtZero("log series");
        if (r.exact_value_at_zero() != ExactComplex(1)) throw NotAnApproximation("r(0) != 1");
        const auto& N = r.num();
        const auto& D = r.den();
        const auto a = series_quotient(N.derivative(), N, kTerms);
        const auto b = series_quotient(D.derivative(), D, kTerms);
        // h'(w) = N'/N - D'/D + 1, h(0) = 0
        coeffs_.assign(kTerms + 1, 0.0);
        for (int k = 0; k < kTerms; ++k) {
            ExactComplex c = a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)];
            if (k == 0) c += ExactComplex(1);
            coeffs_[static_cast<std::size_t>(k + 1)] = (c / ExactComplex(k + 1)).to_cplx();
        }
        dcoeffs_.assign(kTerms, 0.0);
        for (int k = 1; k <= kTerms; ++k)
            dcoeffs_[static_cast<std::size_t>(k - 1)] = static_cast<double>(k) * coeffs_[static_cast<std::size_t>(k)];
        double rho = std::numeric_limits<double>::infinity();
        for (const auto& p : {N, D})
            if (p.degree() > 0)
                for (const cplx z : polynomial_roots(p)) rho = std::min(rho, std::abs(z));
        radius_ = 0.5 * rho;
    }

    /// |w| up to which the series is used.
    [[nodiscard]] double radius() const { return radius_; }

    /// h(w), h'(w)
    [[nodiscard]] std::pair<cplx, cplx> operator()(cplx w) const { return {horner(coeffs_, w), horner(dcoeffs_, w)}; }

private:
    std::vector<cplx> coeffs_, dcoeffs_;
    double radius_ = 0.0;
};

namespace detail {

/// expm1 for complex argument without cancellation near 0.
inline cplx expm1(cplx x) {
    const double s = std::sin(0.5 * x.imag());
    return {std::expm1(x.real()) * std::cos(x.imag()) - 2 * s * s, std::exp(x.real()) * std::sin(x.imag())};
}

inline bool is_integer(double s) { return std::floor(s) == s; }

}  // namespace detail

/// Delta_{n,s}(z) = (e^{-z} - r(z/n)^n) / z^s with the principal branch of z^s.
class DeltaSymbol {
public:
    DeltaSymbol(RationalFunction r, int n, double s, std::shared_ptr<const LogSeries> series = nullptr)
        : r_(std::move(r)), n_(n), s_(s), series_(series ? std::move(series) : std::make_shared<LogSeries>(r_)) {
        if (n < 1) throw PreconditionViolation("n must be positive");
        if (s < 0) throw PreconditionViolation("s must be nonnegative");
    }

    [[nodiscard]] int n() const { return n_; }
    [[nodiscard]] double s() const { return s_; }
    [[nodiscard]] const RationalFunction& scheme() const { return r_; }

    /// Value and derivative at z.
    [[nodiscard]] std::pair<cplx, cplx> operator()(cplx z) const {
        if (z.imag() == 0.0 && z.real() < 0.0 && !detail::is_integer(s_))
            throw BranchCutHit("z on the negative real axis with non-integer s");
        if (z == 0.0 && s_ > 0) throw PreconditionViolation("Delta_{n,s}(0) undefined for s > 0");
        const auto [v, d] = delta_n(z);
        if (s_ == 0.0) return {v, d};
        const cplx zs = std::exp(s_ * std::log(z));
        const cplx val = v / zs;
        return {val, d / zs - s_ * val / z};
    }

    [[nodiscard]] cplx value_at_infinity() const {
        if (s_ > 0) return 0.0;
        const cplx ri = r_.value_at_infinity();
        cplx p = 1.0;
        for (int i = 0; i < n_; ++i) p *= ri;
        return -p;
    }

    [[nodiscard]] RayFunction ray(double theta) const {
        auto self = std::make_shared<DeltaSymbol>(*this);
        return {[self](cplx z) { return (*self)(z); }, theta, value_at_infinity(), r_.has_real_coeffs()};
    }

private:
    // e^{-z} - r(z/n)^n and its derivative
    [[nodiscard]] std::pair<cplx, cplx> delta_n(cplx z) const {
        const double n = n_;
        const cplx w = z / n;
        const cplx ez = std::exp(-z);
        if (std::abs(w) <= series_->radius()) {
            const auto [h, dh] = (*series_)(w);
            const cplx nh = n * h;
            if (std::abs(nh) <= 1.0) {
                const cplx em = detail::expm1(nh);
                const cplx enh = em + 1.0;
                return {-ez * em, -ez * (-em + dh * enh)};
            }
            const cplx rn = std::exp(-z + nh);  // r(w)^n
            return {ez - rn, -ez - (dh - 1.0) * rn};
        }
        const auto [rv, rd] = r_.value_and_derivative(w);
        if (rv == 0.0) return {ez, -ez - (n_ == 1 ? rd : cplx(0.0))};
        const cplx L = std::log(rv);
        const cplx rn = std::exp(n * L);
        const cplx rn1 = n_ == 1 ? cplx(1.0) : std::exp((n - 1) * L);
        return {ez - rn, -ez - rd * rn1};
    }

    RationalFunction r_;
    int n_;
    double s_;
    std::shared_ptr<const LogSeries> series_;
};

inline std::pair<cplx, cplx> delta_ns(const RationalFunction& r, int n, double s, cplx z) {
    return DeltaSymbol(r, n, s)(z);
}

/// ||f'||_{L^1} over both boundary rays.
inline HNormResult hnorm0(const RayFunction& f, const QuadratureConfig& cfg = {}) {
    const cplx up = std::polar(1.0, f.theta);
    const cplx down = std::conj(up);
    if (f.conj_symmetric) {
        auto g = [&](double t) { return 2 * std::abs(f.value_and_derivative(t * up).second); };
        return integrate_half_line(g, cfg);
    }
    auto g = [&](double t) {
        return std::abs(f.value_and_derivative(t * up).second) + std::abs(f.value_and_derivative(t * down).second);
    };
    return integrate_half_line(g, cfg);
}

/// f_gamma(z) = f(z^gamma) with gamma = psi1 / psi2, measured at angle psi2.
inline RayFunction power_substitution(const RayFunction& f, double psi1, double psi2) {
    if (!(psi1 > 0 && psi2 > 0)) throw PreconditionViolation("angles must be positive");
    const double gamma = psi1 / psi2;
    RayFunction g = f;
    g.theta = psi2;
    if (gamma == 1.0) return g;
    g.value_and_derivative = [inner = f.value_and_derivative, gamma](cplx z) {
        const cplx zg = std::pow(z, gamma);
        const auto [v, d] = inner(zg);
        return std::pair{v, d * gamma * zg / z};
    };
    return g;
}

inline HNormResult power_substitution_hnorm(const RayFunction& f, double psi2, const QuadratureConfig& cfg = {}) {
    return hnorm0(power_substitution(f, f.theta, psi2), cfg);
}

/// Variable step sizes k_1..k_n.
struct StepSequence {
    std::vector<double> steps;

    explicit StepSequence(std::vector<double> k) : steps(std::move(k)) {
        if (steps.empty()) throw PreconditionViolation("empty step sequence");
        for (const double k : steps)
            if (!(k > 0)) throw PreconditionViolation("step sizes must be positive");
    }
    static StepSequence uniform(int n, double k) { return StepSequence(std::vector<double>(static_cast<std::size_t>(n), k)); }
    /// n steps k0 * ratio^{j/(n-1)}, j = 0..n-1
    static StepSequence geometric(int n, double k0, double ratio) {
        std::vector<double> k(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) k[static_cast<std::size_t>(j)] = n == 1 ? k0 : k0 * std::pow(ratio, double(j) / (n - 1));
        return StepSequence(std::move(k));
    }
    [[nodiscard]] double K0() const { return *std::min_element(steps.begin(), steps.end()); }
    [[nodiscard]] double K1() const { return *std::max_element(steps.begin(), steps.end()); }
};

/// P(z) = prod_j r(k_j z). Equal steps are grouped; P' uses prefix/suffix
/// products so zeros of individual factors need no special handling.
inline RayFunction product_ray_function(const RationalFunction& r, const StepSequence& K, double theta) {
    std::map<double, int> groups;
    for (const double k : K.steps) ++groups[k];
    std::vector<std::pair<double, int>> g(groups.begin(), groups.end());
    auto ipow = [](cplx x, int m) {
        cplx out = 1.0;
        while (m > 0) {
            if (m & 1) out *= x;
            x *= x;
            m >>= 1;
        }
        return out;
    };
    auto fn = [r, g, ipow](cplx z) {
        const std::size_t d = g.size();
        std::vector<cplx> pw(d), dpw(d);
        for (std::size_t i = 0; i < d; ++i) {
            const auto [k, m] = g[i];
            const auto [v, dv] = r.value_and_derivative(k * z);
            const cplx vm1 = ipow(v, m - 1);
            pw[i] = vm1 * v;
            dpw[i] = static_cast<double>(m) * k * dv * vm1;
        }
        std::vector<cplx> prefix(d + 1, 1.0), suffix(d + 1, 1.0);
        for (std::size_t i = 0; i < d; ++i) prefix[i + 1] = prefix[i] * pw[i];
        for (std::size_t i = d; i-- > 0;) suffix[i] = suffix[i + 1] * pw[i];
        cplx deriv = 0.0;
        for (std::size_t i = 0; i < d; ++i) deriv += prefix[i] * dpw[i] * suffix[i + 1];
        return std::pair{prefix[d], deriv};
    };
    cplx at_inf = 1.0;
    const cplx ri = r.value_at_infinity();
    for (std::size_t j = 0; j < K.steps.size(); ++j) at_inf *= ri;
    return {fn, theta, at_inf, r.has_real_coeffs()};
}

inline HNormResult product_hnorm(const RationalFunction& r, const StepSequence& K, double theta,
                                 const QuadratureConfig& cfg = {}) {
    return hnorm0(product_ray_function(r, K, theta), cfg);
}

/// Integral over t in [Rn, inf) of |d/dt (r(t e^{i phi}/n)^n / (t e^{i phi} + eps)^s)|,
/// evaluated after t = n u.
inline double q_integral(const RationalFunction& r, double eps, double R, double phi, int n, double s,
                         const QuadratureConfig& cfg = {}) {
    if (eps < 0 || R < 1 || n < 1 || s < 0) throw PreconditionViolation("q_integral arguments");
    const cplx dir = std::polar(1.0, phi);
    const double nn = n;
    auto g = [&](double u) {
        const cplx zeta = u * dir;
        const auto [v, dv] = r.value_and_derivative(zeta);
        const cplx w = nn * zeta + eps;
        return nn * std::pow(std::abs(v), nn - 1) * std::pow(std::abs(w), -s - 1) * std::abs(w * dv - s * v);
    };
    return integrate_tail(g, R, cfg).value;
}

struct SupResult {
    double sup = 0.0;
    cplx argmax{};
};

/// sup |f| over Sigma_theta from the boundary rays (log grid with Brent
/// refinement) and |f(inf)|, cross-checked against 1000 interior points.
inline SupResult sup_on_sector(const RayFunction& f, const GridSpec& grid = {}) {
    SupResult best{std::abs(f.value_at_inf), cplx(INFINITY, 0)};
    const auto ts = log_grid(grid.t_min, grid.t_max, grid.points);
    for (const int sign : {+1, -1}) {
        if (sign < 0 && f.conj_symmetric) break;
        const cplx dir = std::polar(1.0, sign * f.theta);
        auto mod = [&](double lt) { return std::abs(f.at(std::exp(lt) * dir)); };
        std::vector<double> v(ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i) v[i] = mod(std::log(ts[i]));
        for (std::size_t i = 0; i < ts.size(); ++i) {
            if (v[i] > best.sup) best = {v[i], ts[i] * dir};
            const bool local = i > 0 && i + 1 < ts.size() && v[i] >= v[i - 1] && v[i] >= v[i + 1];
            if (local) {
                const auto [lt, m] = refine_max(mod, std::log(ts[i - 1]), std::log(ts[i + 1]));
                if (m > best.sup) best = {m, std::exp(lt) * dir};
            }
        }
    }
    // interior sanity check of the maximum principle
    const int n_ang = 10, n_rad = 100;
    for (int i = 0; i < n_ang; ++i) {
        const double a = f.theta * (2.0 * i + 1 - n_ang) / n_ang;
        for (const double t : log_grid(grid.t_min, grid.t_max, n_rad)) {
            const double m = std::abs(f.at(std::polar(t, a)));
            if (m > best.sup + 1e-8)
                throw MaximumPrincipleViolation("interior value " + std::to_string(m) + " exceeds boundary sup " +
                                                std::to_string(best.sup));
        }
    }
    return best;
}

/// ||Delta_{n,s}||_{H_{theta,0}} for each n.
inline std::vector<std::pair<int, HNormResult>> delta_hnorm_sweep(const RationalFunction& r, double theta, double s,
                                                                  const std::vector<int>& n_list,
                                                                  const QuadratureConfig& cfg = {}) {
    const auto series = std::make_shared<const LogSeries>(r);
    std::vector<std::pair<int, HNormResult>> out;
    for (const int n : n_list) out.emplace_back(n, hnorm0(DeltaSymbol(r, n, s, series).ray(theta), cfg));
    return out;
}

struct AppendixSampling {
    int angles = 5;          // fitting set: equispaced in [-theta, theta]
    int radii = 60;          // log-spaced in [r_min, R n)
    double r_min = 1e-3;
    int verify_angles = 9;   // independent denser set used for the violation count
    int verify_radii = 157;
    double alpha_max = 2.0;
    int alpha_steps = 401;
    double alpha_slack = 10.0;  // largest alpha with C(alpha) <= alpha_slack * C(0)
    double safety = 1.25;
};

struct AppendixViolation {
    cplx z;
    int n;
    double s;
    double ratio;  // |Delta'| / bound
};

struct AppendixFit {
    double C_fit = 0.0;
    double alpha_fit = 0.0;
    std::vector<AppendixViolation> violations;
    int samples = 0;
};

/// Fits |Delta'_{n,s}(z)| <= C (q+1-s+|z|) |z|^{q-s} n^{-q} e^{-alpha |z|} over
/// z in Sigma_theta with |z| < R n, then counts violations on a denser grid.
inline AppendixFit appendix_bound_check(const RationalFunction& r, double theta, double R, const std::vector<int>& n_list,
                                        const std::vector<double>& s_list, const AppendixSampling& smp = {}) {
    const int q = approximation_order(r).q;
    const auto series = std::make_shared<const LogSeries>(r);
    struct Sample {
        double absz, ratio0;  // ratio without the exponential factor
        cplx z;
        int n;
        double s;
    };
    auto collect = [&](int n_ang, int n_rad, double offset) {
        std::vector<Sample> out;
        for (const int n : n_list)
            for (const double s : s_list) {
                const DeltaSymbol delta(r, n, s, series);
                const double top = R * n * (1 - 1e-9);
                for (int i = 0; i < n_ang; ++i) {
                    const double a = n_ang == 1 ? 0.0 : -theta + 2 * theta * i / (n_ang - 1);
                    for (int j = 0; j < n_rad; ++j) {
                        // the fitting grid includes both ends, the check grid sits between its nodes
                        const double x = (j + offset) / (n_rad - 1 + 2 * offset);
                        const double t = smp.r_min * std::pow(top / smp.r_min, x);
                        const cplx z = std::polar(t, a);
                        const double d = std::abs(delta(z).second);
                        const double b = (q + 1 - s + t) * std::pow(t, q - s) * std::pow(double(n), -q);
                        out.push_back({t, d / b, z, n, s});
                    }
                }
            }
        return out;
    };
    const auto fit = collect(smp.angles, smp.radii, 0.0);
    auto C_of = [&](double alpha) {
        double c = 0.0;
        for (const auto& p : fit) c = std::max(c, p.ratio0 * std::exp(alpha * p.absz));
        return c;
    };
    const double c0 = C_of(0.0);
    double alpha = 0.0;
    for (int k = 1; k < smp.alpha_steps; ++k) {
        const double a = smp.alpha_max * k / (smp.alpha_steps - 1);
        if (C_of(a) <= smp.alpha_slack * c0) alpha = a;
        else break;
    }
    AppendixFit res;
    res.alpha_fit = alpha;
    res.C_fit = smp.safety * C_of(alpha);
    const auto check = collect(smp.verify_angles, smp.verify_radii, 0.5);
    res.samples = static_cast<int>(check.size());
    for (const auto& p : check) {
        const double ratio = p.ratio0 * std::exp(alpha * p.absz) / res.C_fit;
        if (ratio > 1.0) res.violations.push_back({p.z, p.n, p.s, ratio});
    }
    return res;
}

}  // namespace semirat
