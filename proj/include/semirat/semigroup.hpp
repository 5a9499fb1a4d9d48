#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "semirat/errors.hpp"
#include "semirat/hnorm.hpp"
#include "semirat/rational_function.hpp"
#include "semirat/sampling.hpp"

namespace semirat {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Diagonalizable A = V diag(lambda) V^{-1} with spectrum in the closed sector of angle theta.
struct SectorialMatrix {
    int dim = 0;
    CMatrix V;
    CMatrix V_inv;
    std::vector<cplx> lambda;
    double theta = 0.0;
    double cond_V = 1.0;
    bool identity_basis = true;

    /// V diag(f(lambda)) V^{-1}
    template <class F>
    [[nodiscard]] CMatrix apply(F&& f) const {
        CVector d(dim);
        for (int j = 0; j < dim; ++j) d(j) = f(lambda[static_cast<std::size_t>(j)]);
        if (identity_basis) return d.asDiagonal();
        return V * d.asDiagonal() * V_inv;
    }

    [[nodiscard]] CMatrix matrix() const {
        return apply([](cplx l) { return l; });
    }
};

inline double spectral_norm(const CMatrix& M) {
    if (M.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(M);
    return svd.singularValues()(0);
}

inline double condition_number(const CMatrix& M) {
    Eigen::JacobiSVD<CMatrix> svd(M);
    const auto& s = svd.singularValues();
    return s(0) / s(s.size() - 1);
}

namespace detail {

inline void check_sector(const std::vector<cplx>& lambdas, double theta) {
    for (const cplx l : lambdas) {
        if (l == 0.0) throw OutsideSector("zero eigenvalue");
        if (std::abs(std::arg(l)) > theta + 1e-12)
            throw OutsideSector("eigenvalue with arg " + std::to_string(std::arg(l)) + " > " + std::to_string(theta));
    }
}

}  // namespace detail

inline SectorialMatrix make_diagonal_sectorial(const std::vector<cplx>& lambdas, double theta) {
    detail::check_sector(lambdas, theta);
    SectorialMatrix A;
    A.dim = static_cast<int>(lambdas.size());
    A.V = CMatrix::Identity(A.dim, A.dim);
    A.V_inv = A.V;
    A.lambda = lambdas;
    A.theta = theta;
    return A;
}

inline SectorialMatrix make_sectorial(const std::vector<cplx>& lambdas, const CMatrix& V, double theta) {
    detail::check_sector(lambdas, theta);
    if (V.rows() != static_cast<Eigen::Index>(lambdas.size()) || V.cols() != V.rows())
        throw PreconditionViolation("basis dimension does not match spectrum");
    SectorialMatrix A;
    A.dim = static_cast<int>(lambdas.size());
    A.V = V;
    A.V_inv = V.partialPivLu().inverse();
    A.lambda = lambdas;
    A.theta = theta;
    A.cond_V = condition_number(V);
    A.identity_basis = false;
    return A;
}

/// Random basis U diag(sigma) W with Haar-like unitary U, W and singular
/// values log-spaced in [1, cond_bound], so cond(V) = cond_bound.
inline CMatrix random_basis(int dim, double cond_bound, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    auto unitary = [&] {
        CMatrix G(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) G(i, j) = cplx(g(rng), g(rng));
        Eigen::HouseholderQR<CMatrix> qr(G);
        return CMatrix(qr.householderQ());
    };
    const CMatrix U = unitary();
    const CMatrix W = unitary();
    CVector sigma(dim);
    for (int j = 0; j < dim; ++j) sigma(j) = dim == 1 ? 1.0 : std::pow(cond_bound, double(j) / (dim - 1));
    return U * sigma.asDiagonal() * W;
}

/// Fixture from {dim, eigenvalues: [[re, im], ...], basis: "identity" | "random_cond:<bound>", seed, theta?}.
inline SectorialMatrix sectorial_from_json(const nlohmann::json& j) {
    std::vector<cplx> lambdas;
    for (const auto& e : j.at("eigenvalues")) lambdas.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
    const int dim = j.value("dim", static_cast<int>(lambdas.size()));
    if (dim != static_cast<int>(lambdas.size())) throw ParseError("dim does not match eigenvalue count");
    double theta = 0.0;
    for (const cplx l : lambdas) theta = std::max(theta, std::abs(std::arg(l)));
    theta = j.value("theta", theta);
    const std::string basis = j.value("basis", std::string("identity"));
    if (basis == "identity") return make_diagonal_sectorial(lambdas, theta);
    const std::string prefix = "random_cond:";
    if (basis.rfind(prefix, 0) != 0) throw ParseError("unknown basis '" + basis + "'");
    const double bound = std::stod(basis.substr(prefix.size()));
    if (!(bound >= 1.0)) throw ParseError("condition bound must be >= 1");
    return make_sectorial(lambdas, random_basis(dim, bound, j.value("seed", std::uint64_t{0})), theta);
}

struct SectorialityEstimate {
    double theta = 0.0;
    double M = 0.0;
    cplx worst_lambda{};
};

/// Grid maximum of ||mu (mu + A)^{-1}|| over mu on the rays arg mu = +-(pi - theta)
/// and arg mu = 0. The grid is scaled to the spectrum, maxima are polished with Brent.
inline SectorialityEstimate sectoriality_constant(const SectorialMatrix& A, double theta, const GridSpec& grid = {}) {
    double lo = INFINITY, hi = 0.0;
    for (const cplx l : A.lambda) {
        lo = std::min(lo, std::abs(l));
        hi = std::max(hi, std::abs(l));
    }
    auto value = [&](cplx mu) {
        for (const cplx l : A.lambda)
            if (std::abs(mu + l) < 1e-12) throw SpectrumTooClose("resolvent point within 1e-12 of -spectrum");
        if (A.identity_basis) {
            double m = 0.0;
            for (const cplx l : A.lambda) m = std::max(m, std::abs(mu / (mu + l)));
            return m;
        }
        return spectral_norm(A.apply([mu](cplx l) { return mu / (mu + l); }));
    };
    SectorialityEstimate est{theta, 0.0, 0.0};
    const auto ts = log_grid(grid.t_min * lo, grid.t_max * hi, grid.points);
    for (const double ang : {M_PI - theta, -(M_PI - theta), 0.0}) {
        const cplx dir = std::polar(1.0, ang);
        auto f = [&](double lt) { return value(std::exp(lt) * dir); };
        std::vector<double> v(ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i) v[i] = f(std::log(ts[i]));
        for (std::size_t i = 0; i < ts.size(); ++i) {
            if (v[i] > est.M) {
                est.M = v[i];
                est.worst_lambda = ts[i] * dir;
            }
            if (i > 0 && i + 1 < ts.size() && v[i] >= v[i - 1] && v[i] >= v[i + 1]) {
                const auto [lt, m] = refine_max(f, std::log(ts[i - 1]), std::log(ts[i + 1]));
                if (m > est.M) {
                    est.M = m;
                    est.worst_lambda = std::exp(lt) * dir;
                }
            }
        }
    }
    return est;
}

inline CMatrix matrix_exp_semigroup(const SectorialMatrix& A, double t) {
    if (t < 0) throw PreconditionViolation("t must be nonnegative");
    return A.apply([t](cplx l) { return std::exp(-t * l); });
}

namespace detail {

inline CMatrix matrix_polynomial(const Polynomial& p, const CMatrix& A) {
    const auto c = p.to_cplx();
    CMatrix acc = CMatrix::Zero(A.rows(), A.cols());
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = acc * A;
        acc.diagonal().array() += *it;
    }
    return acc;
}

}  // namespace detail

/// r(A) through the eigendecomposition; for a non-trivial basis also checked
/// against den(A)^{-1} num(A) computed by a linear solve.
inline CMatrix rational_of_matrix(const RationalFunction& r, const SectorialMatrix& A) {
    CMatrix out;
    try {
        out = A.apply([&](cplx l) { return r(l); });
    } catch (const PoleHit& e) {
        throw PoleMeetsSpectrum(e.what());
    }
    if (!A.identity_basis) {
        const CMatrix M = A.matrix();
        const CMatrix X = detail::matrix_polynomial(r.den(), M).partialPivLu().solve(detail::matrix_polynomial(r.num(), M));
        const double scale = std::max(1.0, spectral_norm(out));
        if (spectral_norm(X - out) > 1e-10 * A.cond_V * A.cond_V * scale)
            throw NumericalMismatch("spectral and linear-solve evaluations of r(A) disagree");
    }
    return out;
}

/// A^s with the principal branch.
inline CMatrix fractional_power(const SectorialMatrix& A, double s) {
    return A.apply([s](cplx l) { return s == 0.0 ? cplx(1.0) : std::exp(s * std::log(l)); });
}

/// ||(e^{-tA} - r(tA/n)^n) x|| for x = A^{-s} y. The symbol
/// (e^{-t lambda} - r(t lambda/n)^n) lambda^{-s} equals t^s Delta_{n,s}(t lambda)
/// and is evaluated through DeltaSymbol to avoid cancellation.
inline double approximation_error(const SectorialMatrix& A, const RationalFunction& r, int n, double t, double s,
                                  const CVector& y, std::shared_ptr<const LogSeries> series = nullptr) {
    if (y.size() != A.dim) throw PreconditionViolation("vector dimension does not match operator");
    if (!(t > 0)) throw PreconditionViolation("t must be positive");
    const DeltaSymbol delta(r, n, s, std::move(series));
    const double ts = std::pow(t, s);
    auto symbol = [&](cplx l) { return ts * delta(t * l).first; };
    if (A.identity_basis) {
        double acc = 0.0;
        for (int j = 0; j < A.dim; ++j) acc += std::norm(symbol(A.lambda[static_cast<std::size_t>(j)]) * y(j));
        return std::sqrt(acc);
    }
    return (A.apply(symbol) * y).norm();
}

/// lambda_j = 10^{-3 + 6 j/(count-1)} e^{+-i theta}, alternating sides.
inline SectorialMatrix ray_spectrum_fixture(double theta, int count = 40, double lo = 1e-3, double hi = 1e3) {
    std::vector<cplx> l;
    for (int j = 0; j < count; ++j) {
        const double m = lo * std::pow(hi / lo, double(j) / (count - 1));
        l.push_back(std::polar(m, j % 2 == 0 ? theta : -theta));
    }
    return make_diagonal_sectorial(l, theta);
}

}  // namespace semirat
