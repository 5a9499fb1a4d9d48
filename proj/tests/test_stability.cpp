#include <gtest/gtest.h>

#include <cmath>

#include "semirat/scheme.hpp"
#include "semirat/stability.hpp"

using namespace semirat;

namespace {

// Brute-force sup of |r| over {|z| >= 1, |arg z| <= theta} on a polar grid.
double brute_kappa(const RationalFunction& r, double theta, int n_ang, int n_rad) {
    double best = std::abs(r.value_at_infinity());
    for (int i = 0; i < n_ang; ++i) {
        const double a = -theta + 2 * theta * i / (n_ang - 1);
        for (int j = 0; j < n_rad; ++j) {
            const double t = std::exp(std::log(1e4) * j / (n_rad - 1));
            best = std::max(best, std::abs(r(std::polar(t, a))));
        }
    }
    return best;
}

double brute_cr(const RationalFunction& r, double psi, int n_ang, int n_rad) {
    double best = 0.0;
    for (int i = 0; i < n_ang; ++i) {
        const double a = -psi + 2 * psi * i / (n_ang - 1);
        for (int j = 0; j < n_rad; ++j) {
            const double t = std::exp(-8 + 16.0 * j / (n_rad - 1));
            best = std::max(best, (1 + t) * (1 + t) * std::abs(r.derivative_at(std::polar(t, a))));
        }
    }
    return best;
}

}  // namespace

TEST(ApproximationOrder, PadeAndSimpleSchemes) {
    for (int k = 1; k <= 5; ++k) {
        const auto o = approximation_order(pade_exp(k));
        EXPECT_EQ(o.q, 2 * k) << k;
        EXPECT_TRUE(o.q_is_exact);
    }
    EXPECT_EQ(approximation_order(backward_euler()).q, 1);
    EXPECT_EQ(approximation_order(crank_nicolson()).q, 2);
    EXPECT_EQ(approximation_order(pi6_cubic_example()).q, 1);
    EXPECT_TRUE(approximation_order(pi6_cubic_example()).q_is_exact);
}

TEST(ApproximationOrder, LeadingErrorCoefficient) {
    // 1/(1+z) - e^{-z} = z^2 - z^2/2 + ...
    EXPECT_EQ(leading_error_coefficient(backward_euler()), ExactComplex(Rational(1, 2)));
    // cn: c_3 = -1/4, exp: -1/6
    EXPECT_EQ(leading_error_coefficient(crank_nicolson()), ExactComplex(Rational(-1, 12)));
    // paper-pi6: c_2 = 1, exp: 1/2
    EXPECT_EQ(leading_error_coefficient(pi6_cubic_example()), ExactComplex(Rational(1, 2)));
}

TEST(ApproximationOrder, NotAnApproximation) {
    const RationalFunction r(Polynomial{ExactComplex(2)}, Polynomial{ExactComplex(1), ExactComplex(1)});
    EXPECT_THROW((void)approximation_order(r), NotAnApproximation);
    const RationalFunction s(Polynomial{ExactComplex(1)}, Polynomial{ExactComplex(0), ExactComplex(1)});
    EXPECT_THROW((void)approximation_order(s), NotHolomorphicAtZero);
}

TEST(Certificate, CrankNicolsonRightHalfPlane) {
    const auto c = certify_sector_stability(crank_nicolson(), M_PI / 2);
    EXPECT_TRUE(c.is_stable);
    EXPECT_TRUE(c.poles_in_closed_sector.empty());
    EXPECT_LE(c.max_boundary_modulus, 1.0 + kCertTol);
}

TEST(Certificate, CubicExample) {
    const auto r = pi6_cubic_example();
    const auto c = certify_sector_stability(r, M_PI / 6);
    EXPECT_TRUE(c.is_stable);
    const auto poles = polynomial_roots(r.den());
    ASSERT_EQ(poles.size(), 3U);
    const double phi = std::atan(std::sqrt(7.0));
    EXPECT_NEAR(std::abs(poles[0] - cplx(-0.5, 0)), 0.0, 1e-12);
    bool found_upper = false;
    for (const auto& p : poles)
        if (std::abs(p - std::polar(1 / std::sqrt(2.0), phi)) < 1e-12) found_upper = true;
    EXPECT_TRUE(found_upper);

    const auto c2 = certify_sector_stability(r, M_PI / 2);
    EXPECT_FALSE(c2.is_stable);
    EXPECT_EQ(c2.poles_in_closed_sector.size(), 2U);
}

TEST(Certificate, MonotoneInAngle) {
    for (const auto& r : {backward_euler(), crank_nicolson(), pade_exp(2), pade_exp(3)}) {
        double prev = 0.0;
        for (const double psi : {0.2, 0.6, 1.0, 1.4, M_PI / 2}) {
            const auto c = certify_sector_stability(r, psi);
            EXPECT_TRUE(c.is_stable);
            EXPECT_GE(c.max_boundary_modulus, prev - 1e-14);
            prev = c.max_boundary_modulus;
        }
    }
}

TEST(Certificate, Preconditions) {
    const RationalFunction c(Polynomial{ExactComplex(1)}, Polynomial{ExactComplex(1)});
    EXPECT_THROW((void)certify_sector_stability(c, 1.0), PreconditionViolation);
    const RationalFunction u(Polynomial{ExactComplex(1), ExactComplex(0), ExactComplex(1)},
                             Polynomial{ExactComplex(1), ExactComplex(1)});
    EXPECT_THROW((void)certify_sector_stability(u, 1.0), UnboundedAtInfinity);
}

TEST(Kappa, BackwardEulerMatchesBruteForce) {
    const auto r = backward_euler();
    const double k = kappa_sup(r, M_PI / 4);
    const double oracle = brute_kappa(r, M_PI / 4, 2001, 2001);
    EXPECT_NEAR(k, oracle, 1e-6);
    // attained at the arc/ray corner
    EXPECT_NEAR(k, 1 / (2 * std::cos(M_PI / 8)), 1e-9);
}

TEST(Kappa, SubdiagonalPadeBelowOne) {
    // (1,2) Pade approximant: (1 - z/3)/(1 + 2z/3 + z^2/6)
    const auto r = parse_scheme("ratio:1,-1/3|1,2/3,1/6");
    const double k = kappa_sup(r, M_PI / 4);
    EXPECT_LT(k, 1.0);
    EXPECT_GE(k, std::abs(r.value_at_infinity()));
    EXPECT_NEAR(k, brute_kappa(r, M_PI / 4, 801, 801), 1e-6);
}

TEST(Kappa, ContractiveAtInfinityRequired) {
    EXPECT_THROW((void)kappa_sup(crank_nicolson(), M_PI / 4), NotStrictlyContractiveAtInfinity);
    // diagonal Pade has |r(inf)| = 1
    EXPECT_THROW((void)kappa_sup(pade_exp(2), M_PI / 4), NotStrictlyContractiveAtInfinity);
    EXPECT_THROW((void)kappa_sup(pade_exp(3), M_PI / 4), NotStrictlyContractiveAtInfinity);
}

TEST(DerivativeBound, BackwardEulerHalfPlane) {
    const auto r = backward_euler();
    // (1+t)^2/(1+t^2) on the imaginary axis, maximal at t = 1
    EXPECT_NEAR(derivative_bound_constant(r, M_PI / 2), 2.0, 1e-8);
    EXPECT_NEAR(derivative_bound_constant(r, M_PI / 2), brute_cr(r, M_PI / 2, 181, 4001), 1e-4);
}

TEST(DerivativeBound, CrankNicolsonGridRefinement) {
    const auto r = crank_nicolson();
    const double coarse = derivative_bound_constant(r, M_PI / 2, GridSpec{1e-6, 1e6, 1024}, 17);
    const double fine = derivative_bound_constant(r, M_PI / 2, GridSpec{1e-6, 1e6, 8192}, 65);
    EXPECT_NEAR(coarse, fine, 0.01 * fine);
    EXPECT_NEAR(fine, 5.0, 1e-6);
}

TEST(DerivativeBound, ScaleArgument) {
    // c_r for r(k.) against brute force at k = 1/2 and 2
    for (const auto& k : {Rational(1, 2), Rational(2)}) {
        const auto rk = scale_arg(backward_euler(), k);
        EXPECT_NEAR(derivative_bound_constant(rk, M_PI / 3), brute_cr(rk, M_PI / 3, 241, 4001), 1e-3);
    }
}

TEST(Envelope, CrankNicolsonQuarterPi) {
    const auto env = envelope_constants(crank_nicolson(), M_PI / 4);
    EXPECT_NEAR(env.b1, std::sqrt(2.0) / 2, 1e-14);
    EXPECT_NEAR(env.b2, 16.0, 1e-14);
    EXPECT_NEAR(env.omega, M_PI / 4, 1e-14);
    EXPECT_EQ(env.m, 1);
    EXPECT_GE(env.R, 1.0);
    EXPECT_LE(env.R, 1e3);
    // pointwise check on the certified grid
    for (const double phi : {0.0, M_PI / 8, -M_PI / 8, M_PI / 4, -M_PI / 4})
        for (const double t : log_grid(env.R, 1e6, 4096)) {
            const double lm = std::log(std::abs(crank_nicolson()(std::polar(t, phi))));
            EXPECT_LE(lm, -env.b1 / t);
            EXPECT_GE(lm, -env.b2 / t);
        }
}

TEST(Envelope, CubicExample) {
    const auto env = envelope_constants(pi6_cubic_example(), M_PI / 12);
    EXPECT_EQ(env.m, 2);
    EXPECT_NEAR(env.abs_a, 0.25, 1e-15);
    EXPECT_NEAR(env.b2, 1.0, 1e-15);
}

TEST(Envelope, NeedsUnitModulusAtInfinity) {
    EXPECT_THROW((void)envelope_constants(backward_euler(), M_PI / 4), PreconditionViolation);
}

TEST(RayDiagnostic, CayleySignPattern) {
    const auto r = cayley(1.0, 0.5);
    const auto lo = ray_modulus_diagnostic(r, 0.5, 0.0, 0.9, 200);
    EXPECT_EQ(lo.sign_pattern, "-");
    const auto hi = ray_modulus_diagnostic(r, 0.5, 1.1, 100.0, 200);
    EXPECT_EQ(hi.sign_pattern, "+");
}

TEST(RayDiagnostic, ZeroModulus) {
    EXPECT_THROW((void)ray_modulus_diagnostic(cayley(1.0, 0.5), 0.5, 0.0, 2.0, 3), ZeroModulusEncountered);
}

TEST(RayDiagnostic, ShiftedCayleyFlatAtOrigin) {
    for (const double phi : {0.1, 0.3, 0.7, 1.2}) {
        const auto r = shifted_cayley(phi);
        const auto rep = ray_modulus_diagnostic(r, 0.0, 0.0, 1.0, 11);
        const auto& s0 = rep.samples.front();
        EXPECT_NEAR(s0.modulus_derivative, 0.0, 1e-14);
        const double expected = 2 * std::cos(phi) / std::norm(1.0 + std::polar(1.0, phi));
        EXPECT_NEAR(s0.abs_derivative, expected, 1e-14);
        EXPECT_GT(s0.abs_derivative, 0.0);
    }
}

TEST(RayDiagnostic, RotatedCayleyExceptionalRay) {
    const double phi = 0.4;
    const auto rep = ray_modulus_diagnostic(rotated_cayley(phi), M_PI / 2 - phi, 0.1, 10.0, 100);
    for (const auto& s : rep.samples) {
        EXPECT_NEAR(s.modulus, 1.0, 1e-14);
        EXPECT_NEAR(s.modulus_derivative, 0.0, 1e-14);
    }
    EXPECT_TRUE(rep.likely_exceptional);
    // a generic ray is not flagged
    EXPECT_FALSE(ray_modulus_diagnostic(rotated_cayley(phi), 0.3, 0.1, 10.0, 100).likely_exceptional);
}

TEST(Classify, Fixtures) {
    const auto be = classify(backward_euler(), M_PI / 2);
    EXPECT_EQ(be.q, 1);
    ASSERT_TRUE(be.kappa.has_value());
    EXPECT_GT(*be.kappa, be.mass_at_inf_abs);
    EXPECT_LT(*be.kappa, 1.0);
    EXPECT_NEAR(be.c_r, 2.0, 1e-8);

    const auto cn = classify(crank_nicolson(), M_PI / 2);
    EXPECT_EQ(cn.q, 2);
    EXPECT_FALSE(cn.kappa.has_value());
    EXPECT_DOUBLE_EQ(cn.mass_at_inf_abs, 1.0);

    const auto l = classify(pade_exp(1), M_PI / 2);
    EXPECT_EQ(l.q, 2);
}
