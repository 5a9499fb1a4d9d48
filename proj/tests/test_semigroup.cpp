#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "semirat/scheme.hpp"
#include "semirat/semigroup.hpp"

using namespace semirat;

namespace {

double ls_slope(const std::vector<int>& ns, const std::vector<double>& v) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        mx += std::log(ns[i]);
        my += std::log(v[i]);
    }
    mx /= ns.size();
    my /= ns.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        sxy += (std::log(ns[i]) - mx) * (std::log(v[i]) - my);
        sxx += (std::log(ns[i]) - mx) * (std::log(ns[i]) - mx);
    }
    return sxy / sxx;
}

SectorialMatrix random_fixture(int dim, double theta, double cond, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> lm(-2, 2), ang(-theta, theta);
    std::vector<cplx> l;
    for (int j = 0; j < dim; ++j) l.push_back(std::polar(std::pow(10.0, lm(rng)), ang(rng)));
    return make_sectorial(l, random_basis(dim, cond, seed + 1), theta);
}

}  // namespace

TEST(Sectorial, Construction) {
    EXPECT_EQ(make_diagonal_sectorial({1.0}, M_PI / 4).dim, 1);
    std::vector<cplx> l;
    for (int j = -10; j <= 10; ++j) l.push_back(std::polar(std::pow(2.0, j), M_PI / 4 * (j % 2 == 0 ? 1 : -1)));
    EXPECT_EQ(make_diagonal_sectorial(l, M_PI / 4).dim, 21);
    EXPECT_THROW((void)make_diagonal_sectorial({std::polar(1.0, 1.0)}, M_PI / 4), OutsideSector);
    EXPECT_THROW((void)make_diagonal_sectorial({0.0}, M_PI / 4), OutsideSector);
}

TEST(Sectorial, RandomBasisReconstructs) {
    const auto A = random_fixture(6, M_PI / 4, 100.0, 11);
    EXPECT_NEAR(A.cond_V, 100.0, 1e-8);
    Eigen::ComplexEigenSolver<CMatrix> es(A.matrix());
    std::vector<double> got, want;
    for (int i = 0; i < 6; ++i) got.push_back(std::abs(es.eigenvalues()(i)));
    for (const cplx l : A.lambda) want.push_back(std::abs(l));
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(got[i], want[i], 1e-10 * A.cond_V * want.back());
}

TEST(Sectorial, JsonFixtureDeterministic) {
    const auto j = nlohmann::json::parse(
        R"({"dim": 3, "eigenvalues": [[1, 0.5], [2, -1], [0.1, 0]], "basis": "random_cond:50", "seed": 42})");
    const auto A = sectorial_from_json(j);
    const auto B = sectorial_from_json(j);
    EXPECT_EQ(A.V, B.V);
    EXPECT_NEAR(A.cond_V, 50.0, 1e-9);
    EXPECT_NEAR(A.theta, std::atan(0.5), 1e-15);
    const auto D = sectorial_from_json(nlohmann::json::parse(R"({"eigenvalues": [[1, 0]], "basis": "identity"})"));
    EXPECT_TRUE(D.identity_basis);
    EXPECT_THROW((void)sectorial_from_json(nlohmann::json::parse(R"({"eigenvalues": [[1, 0]], "basis": "lu"})")),
                 ParseError);
}

TEST(Sectoriality, ScalarClosedForms) {
    const auto A = make_diagonal_sectorial({1.0}, M_PI / 4);
    EXPECT_NEAR(sectoriality_constant(A, M_PI / 4).M, std::sqrt(2.0), 1e-9);
    EXPECT_NEAR(sectoriality_constant(A, M_PI / 2).M, 1.0, 1e-9);
    for (const double c : {1e-3, 7.0, 1e4}) {
        const auto B = make_diagonal_sectorial({c}, M_PI / 4);
        EXPECT_NEAR(sectoriality_constant(B, M_PI / 3).M, sectoriality_constant(A, M_PI / 3).M, 1e-9);
    }
}

TEST(Sectoriality, AtLeastOneAndSpectrumTooClose) {
    const auto A = random_fixture(5, M_PI / 4, 10.0, 3);
    EXPECT_GE(sectoriality_constant(A, M_PI / 3).M, 1.0);
    const auto B = make_diagonal_sectorial({std::polar(1.0, -M_PI / 4)}, M_PI / 4);
    EXPECT_THROW((void)sectoriality_constant(B, M_PI / 4, GridSpec{1e-6, 1e6, 3}), SpectrumTooClose);
}

TEST(Semigroup, ExponentialBasics) {
    const auto I = make_diagonal_sectorial({1.0, std::polar(3.0, 0.5)}, 0.5);
    EXPECT_TRUE(matrix_exp_semigroup(I, 0.0).isApprox(CMatrix::Identity(2, 2)));
    EXPECT_NEAR(std::abs(matrix_exp_semigroup(make_diagonal_sectorial({1.0}, 0.1), 1.0)(0, 0) - std::exp(-1.0)), 0.0,
                1e-16);
    const auto A = random_fixture(5, M_PI / 4, 100.0, 5);
    const CMatrix lhs = matrix_exp_semigroup(A, 0.7);
    const CMatrix rhs = matrix_exp_semigroup(A, 0.3) * matrix_exp_semigroup(A, 0.4);
    EXPECT_LE(spectral_norm(lhs - rhs), 1e-12 * A.cond_V * A.cond_V);
}

TEST(Semigroup, RationalOfMatrix) {
    EXPECT_NEAR(std::abs(rational_of_matrix(backward_euler(), make_diagonal_sectorial({1.0}, 0.1))(0, 0) - 0.5), 0.0,
                1e-16);
    const std::vector<cplx> l = {0.5, std::polar(2.0, 0.7), std::polar(9.0, -0.3)};
    const CMatrix cn = rational_of_matrix(crank_nicolson(), make_diagonal_sectorial(l, 0.7));
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(std::abs(cn(j, j) - crank_nicolson()(l[static_cast<std::size_t>(j)])), 0.0, 1e-15);

    const auto A = random_fixture(5, M_PI / 4, 100.0, 17);
    const CMatrix spectral = rational_of_matrix(pade_exp(2), A);
    const CMatrix M = A.matrix();
    const auto P = pade_exp(2);
    // independent path: den(A)^{-1} num(A) with explicit matrix powers
    CMatrix num = CMatrix::Zero(5, 5), den = CMatrix::Zero(5, 5), pw = CMatrix::Identity(5, 5);
    for (int k = 0; k <= 2; ++k) {
        num += P.num().coeff(k).to_cplx() * pw;
        den += P.den().coeff(k).to_cplx() * pw;
        pw = pw * M;
    }
    const CMatrix solve = den.fullPivLu().solve(num);
    EXPECT_LE(spectral_norm(solve - spectral), 1e-10 * A.cond_V * A.cond_V * std::max(1.0, spectral_norm(spectral)));

    const RationalFunction pole(Polynomial{ExactComplex(1)}, Polynomial{ExactComplex(1), ExactComplex(Rational(-1, 2))});
    EXPECT_THROW((void)rational_of_matrix(pole, make_diagonal_sectorial({2.0}, 0.1)), PoleMeetsSpectrum);
}

TEST(Semigroup, FractionalPower) {
    EXPECT_NEAR(std::abs(fractional_power(make_diagonal_sectorial({4.0}, 0.1), 0.5)(0, 0) - 2.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(fractional_power(make_diagonal_sectorial({std::polar(1.0, M_PI / 4)}, M_PI / 4), 2.0)(0, 0) -
                         cplx(0, 1)),
                0.0, 1e-15);
    const auto A = random_fixture(5, M_PI / 4, 10.0, 23);
    const CMatrix M = A.matrix();
    for (const double s : {0.25, 0.5, 0.75}) {
        const CMatrix prod = fractional_power(A, s) * fractional_power(A, 1 - s);
        EXPECT_LE(spectral_norm(prod - M), 1e-12 * A.cond_V * A.cond_V * spectral_norm(M));
    }
}

TEST(ApproximationError, IdentityOperator) {
    const auto I = make_diagonal_sectorial(std::vector<cplx>(4, 1.0), 0.1);
    CVector y(4);
    y << 1.0, 2.0, cplx(0, 1), -0.5;
    for (const int n : {1, 8, 64})
        for (const double s : {0.0, 0.5, 2.0}) {
            const double e = approximation_error(I, crank_nicolson(), n, 1.0, s, y);
            EXPECT_NEAR(e, std::abs(delta_ns(crank_nicolson(), n, 0.0, 1.0).first) * y.norm(), 1e-15);
        }
}

TEST(ApproximationError, MatchesDirectEvaluation) {
    // moderate n, no cancellation issue: compare with e^{-tA} - r(tA/n)^n applied to A^{-s} y
    const auto A = random_fixture(5, M_PI / 4, 20.0, 29);
    CVector y = CVector::Ones(5);
    for (const int n : {1, 3, 10})
        for (const double s : {0.0, 0.5}) {
            const double t = 0.8;
            const auto B = make_sectorial([&] {
                std::vector<cplx> l;
                for (const cplx x : A.lambda) l.push_back(t * x / double(n));
                return l;
            }(), A.V, A.theta);
            CMatrix rn = CMatrix::Identity(5, 5);
            const CMatrix rB = rational_of_matrix(crank_nicolson(), B);
            for (int k = 0; k < n; ++k) rn = rn * rB;
            const CVector x = fractional_power(A, -s) * y;
            const double direct = ((matrix_exp_semigroup(A, t) - rn) * x).norm();
            EXPECT_NEAR(approximation_error(A, crank_nicolson(), n, t, s, y), direct, 1e-10 * direct);
        }
}

TEST(ApproximationError, Scaling) {
    const auto A = ray_spectrum_fixture(M_PI / 4, 12, 1e-2, 1e2);
    const CVector y = CVector::Ones(12);
    for (const double t : {0.1, 3.0, 50.0}) {
        std::vector<cplx> tl;
        for (const cplx l : A.lambda) tl.push_back(t * l);
        const auto tA = make_diagonal_sectorial(tl, A.theta);
        for (const double s : {0.0, 0.5, 2.0}) {
            const double lhs = approximation_error(A, crank_nicolson(), 16, t, s, y);
            const double rhs = std::pow(t, s) * approximation_error(tA, crank_nicolson(), 16, 1.0, s, y);
            EXPECT_NEAR(lhs, rhs, 1e-12 * lhs);
        }
    }
}

TEST(ApproximationError, OperatorRates) {
    const auto A = ray_spectrum_fixture(M_PI / 4);
    const CVector y = CVector::Ones(40) / std::sqrt(40.0);
    std::vector<int> ns = {16, 32, 64, 128};
    std::vector<double> v;
    // spectrum of tA must reach past n^2 for the n^{-2s} regime to be visible
    for (const int n : ns) v.push_back(approximation_error(A, crank_nicolson(), n, 1e3, 0.5, y));
    EXPECT_NEAR(ls_slope(ns, v), -1.0, 0.1);
    ns = {128, 256, 512, 1024};
    v.clear();
    for (const int n : ns) v.push_back(approximation_error(A, backward_euler(), n, 1.0, 0.0, y));
    EXPECT_NEAR(ls_slope(ns, v), -1.0, 0.1);
}

TEST(CalculusBound, NormalFixtures) {
    // spectrum in the closed quarter-pi sector, calculus angle pi/3
    const double theta = M_PI / 3;
    const std::vector<SectorialMatrix> ops = {ray_spectrum_fixture(M_PI / 4), ray_spectrum_fixture(M_PI / 4, 9, 0.3, 30.0),
                                              make_diagonal_sectorial({1.0}, 0.0)};
    for (const auto& A : ops) {
        const double M = sectoriality_constant(A, theta).M;
        auto check = [&](const RayFunction& f) {
            double norm = 0.0;
            for (const cplx l : A.lambda) norm = std::max(norm, std::abs(f.at(l)));
            EXPECT_LE(norm, std::abs(f.value_at_inf) + 0.5 * M * hnorm0(f).value + 1e-8);
        };
        check(ray_function(backward_euler(), theta));
        for (const auto& r : {backward_euler(), crank_nicolson(), pade_exp(2)})
            for (const int n : {1, 4, 32}) {
                check(product_ray_function(r, StepSequence::uniform(n, 1.0 / n), theta));
                for (const double s : {0.5, 1.0, 2.0}) check(DeltaSymbol(r, n, s).ray(theta));
            }
    }
}

TEST(CalculusBound, ContractiveProducts) {
    const auto A = ray_spectrum_fixture(M_PI / 4);
    for (const auto& r : {backward_euler(), crank_nicolson(), pade_exp(2), pade_exp(3)})
        for (const int n : {1, 7, 64, 1024}) {
            std::vector<cplx> l;
            for (const cplx x : A.lambda) l.push_back(x / double(n));
            const CMatrix rA = rational_of_matrix(r, make_diagonal_sectorial(l, A.theta));
            double norm = 0.0;
            for (int j = 0; j < A.dim; ++j) norm = std::max(norm, std::pow(std::abs(rA(j, j)), n));
            EXPECT_LE(norm, 1.0);
        }
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> lk(std::log(1e-3), std::log(1e1));
    std::uniform_int_distribution<int> len(1, 128);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> k(static_cast<std::size_t>(len(rng)));
        for (auto& x : k) x = std::exp(lk(rng));
        const auto P = product_ray_function(backward_euler(), StepSequence(k), M_PI / 4);
        double norm = 0.0;
        for (const cplx l : A.lambda) norm = std::max(norm, std::abs(P.at(l)));
        EXPECT_LE(norm, 1.0);
    }
}
