#include <gtest/gtest.h>

#include <random>

#include "semirat/rational_function.hpp"
#include "semirat/scheme.hpp"

using namespace semirat;

namespace {

Rational q(long p, long d = 1) { return Rational(p, d); }
ExactComplex xc(long p, long d = 1) { return ExactComplex(q(p, d)); }

// Independent oracle: product of truncated series a * (1/b) where 1/b is
// expanded as a geometric series in (1 - b/b0).
std::vector<Rational> series_by_geometric_inverse(const std::vector<Rational>& a,
                                                  const std::vector<Rational>& b, int N) {
    const Rational b0 = b[0];
    // u = 1 - b/b0 has u_0 = 0; 1/b = (1/b0) sum u^j
    std::vector<Rational> u(N + 1, Rational(0));
    for (std::size_t k = 1; k < b.size() && static_cast<int>(k) <= N; ++k) u[k] = -b[k] / b0;
    std::vector<Rational> inv(N + 1, Rational(0)), power(N + 1, Rational(0));
    power[0] = 1;
    for (int j = 0; j <= N; ++j) {
        for (int k = 0; k <= N; ++k) inv[k] += power[k] / b0;
        std::vector<Rational> next(N + 1, Rational(0));
        for (int i = 0; i <= N; ++i)
            for (int k = 0; i + k <= N; ++k) next[i + k] += power[i] * u[k];
        power = next;
    }
    std::vector<Rational> out(N + 1, Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (int k = 0; static_cast<int>(i) + k <= N; ++k) out[i + k] += a[i] * inv[k];
    return out;
}

Rational factorial(int n) {
    Rational f(1);
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace

TEST(RationalEval, Basics) {
    EXPECT_EQ(crank_nicolson()(0.0), cplx(1.0));
    EXPECT_DOUBLE_EQ(backward_euler()(1.0).real(), 0.5);
    EXPECT_THROW((void)pi6_cubic_example()(-0.5), PoleHit);
}

TEST(RationalEval, ExactModeMatchesFast) {
    const auto r = pade_exp(3);
    const cplx z(0.3, -1.7);
    EXPECT_NEAR(std::abs(r(z, EvalMode::exact) - r(z)), 0.0, 1e-14);
    EXPECT_THROW((void)pi6_cubic_example()(-0.5, EvalMode::exact), PoleHit);
}

TEST(RationalDerivative, QuotientRule) {
    const RationalFunction be_d = rational_derivative(backward_euler());
    EXPECT_EQ(be_d, RationalFunction(Polynomial{xc(-1)}, Polynomial{xc(1), xc(1)} * Polynomial{xc(1), xc(1)}));

    // (1 - z/2)' (1 + z/2) - (1 - z/2)(1 + z/2)' = -1
    const Polynomial d{xc(1), xc(1, 2)};
    EXPECT_EQ(rational_derivative(crank_nicolson()), RationalFunction(Polynomial{xc(-1)}, d * d));
}

TEST(RationalDerivative, DegreeBookkeeping) {
    for (const auto& r : {backward_euler(), crank_nicolson(), pade_exp(2), pade_exp(4), pi6_cubic_example(),
                          cayley(1.0, 0.5)}) {
        const Polynomial top = r.num().derivative() * r.den() - r.num() * r.den().derivative();
        EXPECT_LE(top.degree(), r.num().degree() + r.den().degree() - 1);
    }
}

TEST(RationalDerivative, FiniteDifferenceAgreement) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> logt(-2.0, 2.0), ang(-M_PI / 2 * 0.95, M_PI / 2 * 0.95);
    for (const auto& r : {backward_euler(), crank_nicolson(), pade_exp(3), pi6_cubic_example()}) {
        const auto dr = rational_derivative(r);
        for (int i = 0; i < 100; ++i) {
            const cplx z = std::polar(std::pow(10.0, logt(rng)), ang(rng));
            cplx exact;
            try {
                exact = dr(z);
            } catch (const PoleHit&) {
                continue;
            }
            const double h = 1e-5 * std::max(1.0, std::abs(z));
            const cplx fd = (r(z + h) - r(z - h)) / (2 * h);
            EXPECT_LE(std::abs(fd - exact), 1e-6 * std::max(std::abs(exact), 1e-3)) << z;
        }
    }
}

TEST(TaylorAtZero, GeometricSeries) {
    const auto t = taylor_at_zero(backward_euler(), 3);
    ASSERT_EQ(t.coeffs.size(), 4u);
    EXPECT_EQ(t.coeffs[0], xc(1));
    EXPECT_EQ(t.coeffs[1], xc(-1));
    EXPECT_EQ(t.coeffs[2], xc(1));
    EXPECT_EQ(t.coeffs[3], xc(-1));
}

TEST(TaylorAtZero, CrankNicolsonAgainstLongDivisionOracle) {
    const auto oracle = series_by_geometric_inverse({q(1), q(-1, 2)}, {q(1), q(1, 2)}, 4);
    // frozen from the oracle
    const std::vector<Rational> expected{q(1), q(-1), q(1, 2), q(-1, 4), q(1, 8)};
    ASSERT_EQ(oracle, expected);
    const auto t = taylor_at_zero(crank_nicolson(), 4);
    for (int k = 0; k <= 4; ++k) EXPECT_EQ(t.coeffs[k], ExactComplex(expected[k])) << k;
}

TEST(TaylorAtZero, CubicExampleDerivatives) {
    const auto t = taylor_at_zero(pi6_cubic_example(), 2);
    EXPECT_EQ(t.coeffs[1], xc(-1));
    EXPECT_EQ(t.coeffs[2] * xc(2), xc(2));
}

TEST(TaylorAtZero, RejectsPoleAtZero) {
    const RationalFunction r(Polynomial{xc(1)}, Polynomial{xc(0), xc(1)});
    EXPECT_THROW(taylor_at_zero(r, 2), NotHolomorphicAtZero);
}

TEST(ExpansionAtInfinity, Fixtures) {
    const auto e6 = expansion_at_infinity(pi6_cubic_example());
    EXPECT_EQ(e6.value_at_inf, xc(-1));
    EXPECT_EQ(e6.a, xc(-1, 4));
    EXPECT_EQ(e6.m, 2);

    // oracle: r(1/w) = w/(1+w) = w - w^2 + ...
    const auto ebe = expansion_at_infinity(backward_euler());
    EXPECT_EQ(ebe.value_at_inf, xc(0));
    EXPECT_EQ(ebe.a, xc(-1));
    EXPECT_EQ(ebe.m, 1);

    // oracle: (w - 1/2)/(w + 1/2) = -1 + 4w - 8w^2 + ...
    const auto ecn = expansion_at_infinity(crank_nicolson());
    EXPECT_EQ(ecn.value_at_inf, xc(-1));
    EXPECT_EQ(ecn.a, xc(-4));
    EXPECT_EQ(ecn.m, 1);
}

TEST(ExpansionAtInfinity, Errors) {
    EXPECT_THROW(expansion_at_infinity(RationalFunction(Polynomial{xc(3)}, Polynomial{xc(2)})), ConstantFunction);
    EXPECT_THROW(expansion_at_infinity(RationalFunction(Polynomial{xc(0), xc(0), xc(1)}, Polynomial{xc(1), xc(1)})),
                 UnboundedAtInfinity);
}

TEST(PadeExp, LowOrders) {
    EXPECT_EQ(pade_exp(1), crank_nicolson());
    const RationalFunction p2(Polynomial{xc(1), xc(-1, 2), xc(1, 12)}, Polynomial{xc(1), xc(1, 2), xc(1, 12)});
    EXPECT_EQ(pade_exp(2), p2);
}

TEST(PadeExp, OrderConditionOracle) {
    for (int k = 1; k <= 8; ++k) {
        const auto r = pade_exp(k);
        // e^{-z} Q(z) - P(z) through z^{2k}, using factorials directly
        for (int j = 0; j <= 2 * k; ++j) {
            Rational acc = -r.num().coeff(j).re;
            for (int i = 0; i <= std::min(j, k); ++i) {
                Rational e = Rational(1) / factorial(j - i);
                if ((j - i) % 2) e = -e;
                acc += r.den().coeff(i).re * e;
            }
            EXPECT_EQ(sgn(acc), 0) << "k=" << k << " j=" << j;
        }
        EXPECT_EQ(r.num().degree(), k);
        EXPECT_EQ(r.den().degree(), k);
    }
}

TEST(PadeExp, SymmetryAndLimits) {
    for (int k = 1; k <= 6; ++k) {
        const auto r = pade_exp(k);
        for (int j = 0; j <= k; ++j) {
            ExactComplex qneg = r.den().coeff(j);
            if (j % 2) qneg = -qneg;
            EXPECT_EQ(r.num().coeff(j), qneg);
        }
    }
    EXPECT_THROW(pade_exp(0), PreconditionViolation);
    EXPECT_THROW(pade_exp(65), DegreeLimitExceeded);
}

TEST(Shift, SubstitutionAndIdentity) {
    EXPECT_EQ(shift(backward_euler(), q(1)), RationalFunction(Polynomial{xc(1)}, Polynomial{xc(2), xc(1)}));
    EXPECT_EQ(shift(crank_nicolson(), q(0)), crank_nicolson());
    EXPECT_EQ(expansion_at_infinity(shift(crank_nicolson(), q(1))).a, xc(-4));
}

TEST(Shift, PreservesInfinityExpansion) {
    for (const auto& r : {backward_euler(), crank_nicolson(), pade_exp(2), pade_exp(3), pi6_cubic_example(),
                          shifted_cayley(0.4)}) {
        const auto base = expansion_at_infinity(r);
        for (const Rational& eps : {q(0), q(1, 2), q(1)}) {
            const auto e = expansion_at_infinity(shift(r, eps));
            EXPECT_EQ(e.a, base.a);
            EXPECT_EQ(e.m, base.m);
            EXPECT_EQ(e.value_at_inf, base.value_at_inf);
        }
    }
}

TEST(ScaleArg, Substitution) {
    EXPECT_EQ(scale_arg(backward_euler(), q(2)), RationalFunction(Polynomial{xc(1)}, Polynomial{xc(1), xc(2)}));
    EXPECT_EQ(scale_arg(pade_exp(2), q(1)), pade_exp(2));
    for (const auto& r : {backward_euler(), crank_nicolson(), pi6_cubic_example()})
        for (const Rational& k : {q(1, 3), q(2), q(7, 2)})
            EXPECT_EQ(taylor_at_zero(scale_arg(r, k), 1).coeffs[1], ExactComplex(k) * taylor_at_zero(r, 1).coeffs[1]);
    EXPECT_THROW(scale_arg(backward_euler(), q(0)), PreconditionViolation);
}

TEST(Reduction, GcdIsOneAfterConstruction) {
    // (1+z)(1-z) / ((1+z)(2+z))
    const Polynomial a{xc(1), xc(1)}, b{xc(1), xc(-1)}, c{xc(2), xc(1)};
    const RationalFunction r(a * b, a * c);
    EXPECT_EQ(gcd(r.num(), r.den()).degree(), 0);
    EXPECT_EQ(r, RationalFunction(b, c));
    for (const auto& f : {backward_euler(), crank_nicolson(), pade_exp(5), pi6_cubic_example(), cayley(2.0, -0.3),
                          shifted_cayley(1.0), rational_derivative(pade_exp(3)), shift(pade_exp(2), q(1, 2)),
                          scale_arg(pi6_cubic_example(), q(3))})
        EXPECT_EQ(gcd(f.num(), f.den()).degree(), 0);
}

TEST(SchemeParser, Tokens) {
    EXPECT_EQ(parse_scheme("be"), backward_euler());
    EXPECT_EQ(parse_scheme("cn"), crank_nicolson());
    EXPECT_EQ(parse_scheme("pade:3"), pade_exp(3));
    EXPECT_EQ(parse_scheme("paper-pi6"), pi6_cubic_example());
    EXPECT_EQ(parse_scheme("cayley:1,0.5"), cayley(1.0, 0.5));
    EXPECT_EQ(parse_scheme("shiftcayley:0.7"), shifted_cayley(0.7));
    EXPECT_EQ(parse_scheme("ratio:1,-1/2|1,1/2"), crank_nicolson());
    EXPECT_EQ(parse_scheme("ratio:1,-1/2//1,1/2"), crank_nicolson());
    EXPECT_EQ(parse_scheme("ratio:1/1,1"), backward_euler());
    const auto rc = parse_scheme("ratio:-1/2+3/4i,1|1/2+3/4i,1");
    const ExactComplex w(q(-1, 2), q(3, 4));
    EXPECT_EQ(rc, RationalFunction(Polynomial{w, xc(1)}, Polynomial{w.conj() * xc(-1), xc(1)}));
    EXPECT_EQ(parse_scheme(rc.to_string()), rc);
    EXPECT_THROW(parse_scheme("ratio:1,-1/2/1,1/2"), ParseError);
    EXPECT_THROW(parse_scheme("bogus"), ParseError);
    EXPECT_THROW(parse_scheme("pade:0"), ParseError);
}

TEST(ExactComplexFormat, RoundTrip) {
    for (const char* s : {"0", "-3/4", "1/2+3/4i", "1/2-3/4i", "-5i", "i", "-i", "2+i"}) {
        const auto z = parse_exact_complex(s);
        EXPECT_EQ(parse_exact_complex(z.to_string()), z) << s;
    }
    EXPECT_THROW(parse_exact_complex("1/0"), ParseError);
    EXPECT_THROW(parse_exact_complex("1+2"), ParseError);
}
