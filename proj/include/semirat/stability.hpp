#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "semirat/errors.hpp"
#include "semirat/rational_function.hpp"
#include "semirat/roots.hpp"
#include "semirat/sampling.hpp"

namespace semirat {

/// Slack allowed on |r| <= 1 when certifying.
inline constexpr double kCertTol = 1e-12;
/// Angular widening when deciding whether a pole lies in a closed sector.
inline constexpr double kPoleAngleWidening = 1e-9;

struct ApproximationOrder {
    int q = 0;
    bool q_is_exact = true;
};

/// Largest q with r^{(k)}(0)/k! = (-1)^k/k! for all k <= q, in exact arithmetic.
/// A rational function of type (dn, dd) cannot match e^{-z} beyond order
/// dn + dd, so the search is finite.
inline ApproximationOrder approximation_order(const RationalFunction& r) {
    if (!r.holomorphic_at_zero()) throw NotHolomorphicAtZero("den(0) = 0");
    const int N = std::max(r.num().degree(), 0) + r.den().degree() + 2;
    const auto c = taylor_at_zero(r, N).coeffs;
    const auto e = exp_neg_taylor(N);
    if (c[0] != ExactComplex(e[0])) throw NotAnApproximation("r(0) != 1");
    for (int k = 1; k <= N; ++k)
        if (c[static_cast<std::size_t>(k)] != ExactComplex(e[static_cast<std::size_t>(k)])) return {k - 1, true};
    return {N, false};
}

/// Coefficient of z^{q+1} in r(z) - e^{-z} (the leading error constant).
inline ExactComplex leading_error_coefficient(const RationalFunction& r) {
    const auto ord = approximation_order(r);
    const auto c = taylor_at_zero(r, ord.q + 1).coeffs;
    const auto e = exp_neg_taylor(ord.q + 1);
    return c.back() - ExactComplex(e.back());
}

struct StabilityCertificate {
    double psi = 0.0;
    bool is_stable = false;
    double max_boundary_modulus = 0.0;
    cplx worst_point{};
    std::vector<cplx> poles_in_closed_sector;
    std::string grid_spec;
};

inline bool in_closed_sector(cplx z, double angle, double widen = kPoleAngleWidening) {
    return std::abs(z) == 0.0 || std::abs(std::arg(z)) <= angle + widen;
}

/// Numerical certificate of |r| <= 1 on the sector |arg z| < psi: poles are
/// located, |r| is sampled on both boundary rays together with |r(inf)|, and
/// the maximum principle carries the bound into the pole-free interior.
inline StabilityCertificate certify_sector_stability(const RationalFunction& r, double psi,
                                                     const GridSpec& grid = {}) {
    if (r.is_constant()) throw PreconditionViolation("certify_sector_stability: r is constant");
    if (!r.bounded_at_infinity()) throw UnboundedAtInfinity("certify_sector_stability");
    if (!(psi > 0.0 && psi <= M_PI / 2 + 1e-15)) throw PreconditionViolation("psi must lie in (0, pi/2]");

    StabilityCertificate cert;
    cert.psi = psi;
    cert.grid_spec = grid.describe();
    for (const cplx p : polynomial_roots(r.den()))
        if (in_closed_sector(p, psi)) cert.poles_in_closed_sector.push_back(p);

    const auto ts = log_grid(grid.t_min, grid.t_max, grid.points);
    double best = -1.0;
    for (const int sign : {+1, -1}) {
        const cplx dir = std::polar(1.0, sign * psi);
        std::vector<double> mod(ts.size()), dmod(ts.size());
        bool pole_on_ray = false;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            try {
                const auto [v, dv] = r.value_and_derivative(ts[i] * dir);
                mod[i] = std::abs(v);
                dmod[i] = std::abs(dv);
            } catch (const PoleHit&) {
                pole_on_ray = true;
                mod[i] = std::numeric_limits<double>::infinity();
                dmod[i] = 0.0;
            }
            if (mod[i] > best) {
                best = mod[i];
                cert.worst_point = ts[i] * dir;
            }
        }
        if (pole_on_ray) continue;
        // Lipschitz consistency between neighbours: a jump larger than the
        // sampled derivative bound allows means a feature fell between samples.
        double c_hat = 0.0;
        for (std::size_t i = 0; i < ts.size(); ++i) c_hat = std::max(c_hat, (1 + ts[i]) * (1 + ts[i]) * dmod[i]);
        for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
            const double bound = c_hat * (ts[i + 1] - ts[i]) / ((1 + ts[i]) * (1 + ts[i]));
            if (std::abs(mod[i + 1] - mod[i]) > 2.0 * bound + 1e-14)
                throw GridTooCoarse("modulus jump between t=" + std::to_string(ts[i]) + " and " +
                                    std::to_string(ts[i + 1]));
        }
    }
    const double at_inf = std::abs(r.value_at_infinity());
    cert.max_boundary_modulus = std::max(best, at_inf);
    cert.is_stable = cert.poles_in_closed_sector.empty() && cert.max_boundary_modulus <= 1.0 + kCertTol;
    return cert;
}

/// sup |r| over {z in Sigma_theta : |z| >= 1}, from both rays, the unit arc
/// and |r(inf)|.
inline double kappa_sup(const RationalFunction& r, double theta, const GridSpec& grid = {}) {
    const double at_inf = std::abs(r.value_at_infinity());
    if (at_inf >= 1.0) throw NotStrictlyContractiveAtInfinity("|r(inf)| = " + std::to_string(at_inf));
    for (const cplx p : polynomial_roots(r.den()))
        if (std::abs(p) >= 1.0 - 1e-12 && in_closed_sector(p, theta))
            throw PreconditionViolation("kappa_sup: pole in the truncated sector");

    double sup = at_inf;
    const auto ts = log_grid(1.0, grid.t_max, grid.points);
    for (const int sign : {+1, -1}) {
        const cplx dir = std::polar(1.0, sign * theta);
        auto f = [&](double logt) { return std::abs(r(std::exp(logt) * dir)); };
        std::vector<double> v(ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i) v[i] = f(std::log(ts[i]));
        for (std::size_t i = 0; i < ts.size(); ++i) {
            sup = std::max(sup, v[i]);
            const bool local = (i == 0 || v[i] >= v[i - 1]) && (i + 1 == ts.size() || v[i] >= v[i + 1]);
            if (local && i > 0 && i + 1 < ts.size())
                sup = std::max(sup, refine_max(f, std::log(ts[i - 1]), std::log(ts[i + 1])).second);
        }
    }
    const auto angles = linear_grid(-theta, theta, grid.points);
    auto g = [&](double a) { return std::abs(r(std::polar(1.0, a))); };
    std::vector<double> va(angles.size());
    for (std::size_t i = 0; i < angles.size(); ++i) va[i] = g(angles[i]);
    for (std::size_t i = 0; i < angles.size(); ++i) {
        sup = std::max(sup, va[i]);
        const bool local = (i == 0 || va[i] >= va[i - 1]) && (i + 1 == angles.size() || va[i] >= va[i + 1]);
        if (local && i > 0 && i + 1 < angles.size())
            sup = std::max(sup, refine_max(g, angles[i - 1], angles[i + 1]).second);
    }
    if (sup >= 1.0) throw PreconditionViolation("kappa_sup: |r| reaches 1 on the truncated sector");
    return sup;
}

/// Numerical c_r: sup of (1+|z|)^2 |r'(z)| over the closed sector of angle psi.
inline double derivative_bound_constant(const RationalFunction& r, double psi, const GridSpec& grid = {},
                                        int n_angles = 33) {
    const auto ts = log_grid(grid.t_min, grid.t_max, std::max(grid.points / 4, 64));
    const auto angles = linear_grid(-psi, psi, n_angles);
    auto h = [&](double logt, double ang) {
        const double t = std::exp(logt);
        return (1 + t) * (1 + t) * std::abs(r.derivative_at(std::polar(t, ang)));
    };
    double best = 0.0, best_lt = std::log(ts[0]), best_a = 0.0;
    for (const double a : angles)
        for (const double t : ts) {
            const double v = h(std::log(t), a);
            if (v > best) {
                best = v;
                best_lt = std::log(t);
                best_a = a;
            }
        }
    // coordinate-wise polishing around the best sample
    const double dlt = (std::log(grid.t_max) - std::log(grid.t_min)) / (static_cast<double>(ts.size()) - 1);
    const double da = n_angles > 1 ? 2 * psi / (n_angles - 1) : 0.0;
    for (int sweep = 0; sweep < 3; ++sweep) {
        const double lo = std::max(best_lt - dlt, std::log(grid.t_min));
        const double hi = std::min(best_lt + dlt, std::log(grid.t_max));
        auto [lt, v] = refine_max([&](double x) { return h(x, best_a); }, lo, hi);
        if (v > best) {
            best = v;
            best_lt = lt;
        }
        if (da > 0) {
            const double alo = std::max(best_a - da, -psi);
            const double ahi = std::min(best_a + da, psi);
            auto [a, va] = refine_max([&](double x) { return h(best_lt, x); }, alo, ahi);
            if (va > best) {
                best = va;
                best_a = a;
            }
        }
    }
    return best;
}

struct EnvelopeConstants {
    double b1 = 0.0;
    double b2 = 0.0;
    double R = 1.0;
    double theta = 0.0;
    // data behind b1, b2
    double beta = 0.0;
    double omega = 0.0;
    double abs_a = 0.0;
    int m = 0;
};

/// Two-sided envelope exp(-b2/|z|^m) <= |r(z)| <= exp(-b1/|z|^m) for
/// |z| >= R in Sigma_theta, for r with |r(inf)| = 1. R is the smallest grid
/// point beyond which every sample on the rays {0, +-theta/2, +-theta} obeys
/// both inequalities.
inline EnvelopeConstants envelope_constants(const RationalFunction& r, double theta, const GridSpec& grid = {}) {
    const auto inf = expansion_at_infinity(r);
    if (inf.value_at_inf.norm2() != 1) throw PreconditionViolation("envelope_constants requires |r(inf)| = 1");
    // normalise r~ = r / r(inf); |r| is unchanged
    const cplx a_tilde = (inf.a / inf.value_at_inf).to_cplx();
    EnvelopeConstants env;
    env.theta = theta;
    env.m = inf.m;
    env.abs_a = std::abs(a_tilde);
    env.beta = std::arg(a_tilde);
    env.omega = std::max(std::abs(env.beta - inf.m * theta), std::abs(env.beta + inf.m * theta));
    if (env.omega >= M_PI / 2) throw EnvelopeFailed("omega >= pi/2: theta too large for (a, m)");
    env.b1 = env.abs_a * std::cos(env.omega) / 4;
    env.b2 = 4 * env.abs_a;

    const auto ts = log_grid(1.0, grid.t_max, grid.points);
    const auto& num = r.num();
    const auto& den = r.den();
    double last_bad = 0.0;
    for (const double phi : {0.0, theta / 2, -theta / 2, theta, -theta}) {
        const cplx dir = std::polar(1.0, phi);
        for (const double t : ts) {
            const cplx z = t * dir;
            const double log_mod = std::log(std::abs(num.eval(z))) - std::log(std::abs(den.eval(z)));
            const double tm = std::pow(t, inf.m);
            const bool ok = log_mod <= -env.b1 / tm && log_mod >= -env.b2 / tm;
            if (!ok) last_bad = std::max(last_bad, t);
        }
    }
    if (last_bad == 0.0) {
        env.R = 1.0;
    } else {
        auto it = std::upper_bound(ts.begin(), ts.end(), last_bad);
        if (it == ts.end() || *it > 1e3) throw EnvelopeFailed("no R <= 1e3 certifies the envelope");
        env.R = *it;
    }
    return env;
}

struct DiagnosticSample {
    double t = 0.0;
    double abs_derivative = 0.0;     // |r'(t e^{i theta})|
    double modulus = 0.0;            // r_theta(t) = |r(t e^{i theta})|
    double modulus_derivative = 0.0; // d/dt r_theta(t)
};

struct DiagnosticReport {
    double theta = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    std::vector<DiagnosticSample> samples;
    double sup_ratio = 0.0;          // sup |r'| / |r_theta'|
    int negative = 0;
    int positive = 0;
    int zero = 0;
    std::string sign_pattern;        // run-length collapsed, e.g. "-+"
    bool likely_exceptional = false; // ratio > 1e6 on most samples
};

inline constexpr double kExceptionalRatio = 1e6;

/// Tabulates |r'(t e^{i theta})|, r_theta(t) = |r(t e^{i theta})| and
/// r_theta'(t) = Re(e^{i theta} r' conj(r)) / |r| on a uniform grid.
inline DiagnosticReport ray_modulus_diagnostic(const RationalFunction& r, double theta, double t_lo, double t_hi,
                                               int samples) {
    if (r.is_constant()) throw PreconditionViolation("ray_modulus_diagnostic: r is constant");
    if (!r.holomorphic_at_zero()) throw NotHolomorphicAtZero("ray_modulus_diagnostic");
    if (!r.bounded_at_infinity()) throw UnboundedAtInfinity("ray_modulus_diagnostic");
    if (samples < 2 || !(t_hi > t_lo) || t_lo < 0) throw PreconditionViolation("bad diagnostic interval");

    DiagnosticReport rep;
    rep.theta = theta;
    rep.t_lo = t_lo;
    rep.t_hi = t_hi;
    const cplx dir = std::polar(1.0, theta);
    const auto num = r.num().to_cplx();
    int huge = 0;
    for (const double t : linear_grid(t_lo, t_hi, samples)) {
        const auto [v, dv] = r.value_and_derivative(t * dir);
        const double mod = std::abs(v);
        // zero up to the rounding level of the numerator
        double scale = 0.0;
        for (std::size_t k = 0; k < num.size(); ++k) scale += std::abs(num[k]) * std::pow(t, static_cast<double>(k));
        if (std::abs(horner(num, t * dir)) <= 64 * std::numeric_limits<double>::epsilon() * scale)
            throw ZeroModulusEncountered("r vanishes at t = " + std::to_string(t));
        DiagnosticSample s{t, std::abs(dv), mod, std::real(dir * dv * std::conj(v)) / mod};
        const double ratio = s.abs_derivative / std::abs(s.modulus_derivative);
        rep.sup_ratio = std::max(rep.sup_ratio, std::isnan(ratio) ? 0.0 : ratio);
        if (ratio > kExceptionalRatio) ++huge;
        char sign;
        if (std::abs(s.modulus_derivative) <= 1e-13 * std::max(s.abs_derivative, 1e-300)) {
            ++rep.zero;
            sign = '0';
        } else if (s.modulus_derivative < 0) {
            ++rep.negative;
            sign = '-';
        } else {
            ++rep.positive;
            sign = '+';
        }
        if (rep.sign_pattern.empty() || rep.sign_pattern.back() != sign) rep.sign_pattern.push_back(sign);
        rep.samples.push_back(s);
    }
    // r_theta' has isolated zeros on ordinary rays, so a single huge ratio is
    // expected there; an exceptional ray has r_theta' = 0 throughout.
    rep.likely_exceptional = 2 * huge > samples;
    return rep;
}

struct SchemeClassification {
    int q = 0;
    bool q_is_exact = true;
    InfinityExpansion inf;
    std::optional<double> kappa;
    double c_r = 0.0;
    double mass_at_inf_abs = 0.0;
    ExactComplex error_constant;  // coefficient of z^{q+1} in r - e^{-z}
};

/// Order, behaviour at infinity, c_r at psi and, when |r(inf)| < 1 and r is
/// stable on Sigma_psi, kappa_r on Sigma_theta with theta = theta_fraction * psi.
inline SchemeClassification classify(const RationalFunction& r, double psi, double theta_fraction = 0.99,
                                     const GridSpec& grid = {}) {
    SchemeClassification c;
    const auto ord = approximation_order(r);
    c.q = ord.q;
    c.q_is_exact = ord.q_is_exact;
    c.inf = expansion_at_infinity(r);
    c.mass_at_inf_abs = std::abs(c.inf.value_at_inf.to_cplx());
    c.error_constant = leading_error_coefficient(r);
    c.c_r = derivative_bound_constant(r, psi, grid);
    if (c.mass_at_inf_abs < 1.0) {
        try {
            if (certify_sector_stability(r, psi, grid).is_stable) c.kappa = kappa_sup(r, theta_fraction * psi, grid);
        } catch (const Error&) {
            c.kappa.reset();
        }
    }
    return c;
}

}  // namespace semirat
