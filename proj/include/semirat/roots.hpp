#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "semirat/polynomial.hpp"

namespace semirat {

/// Roots of p from the eigenvalues of its companion matrix, polished by a
/// few Newton steps. Each root is accepted only if |p(root)| is at rounding
/// level relative to sum |c_k||root|^k (widened by `residual_tol`).
inline std::vector<cplx> polynomial_roots(const Polynomial& p, double residual_tol = 1e-9) {
    const int d = p.degree();
    if (d <= 0) return {};
    const auto c = p.to_cplx();
    const cplx lead = c.back();
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i) comp(i, d - 1) = -c[static_cast<std::size_t>(i)] / lead;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    std::vector<cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + d);

    const auto dc = p.derivative().to_cplx();
    for (auto& z : roots) {
        for (int it = 0; it < 4; ++it) {
            const cplx f = horner(c, z);
            const cplx df = horner(dc, z);
            if (std::abs(df) == 0.0) break;
            const cplx step = f / df;
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
            z -= step;
            if (std::abs(step) <= 4 * std::numeric_limits<double>::epsilon() * std::abs(z)) break;
        }
        double scale = 0.0;
        double pw = 1.0;
        for (const auto& ck : c) {
            scale += std::abs(ck) * pw;
            pw *= std::abs(z);
        }
        if (std::abs(horner(c, z)) > residual_tol * scale)
            throw std::runtime_error("polynomial_roots: residual check failed");
    }
    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
        return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : std::arg(a) < std::arg(b);
    });
    return roots;
}

}  // namespace semirat
