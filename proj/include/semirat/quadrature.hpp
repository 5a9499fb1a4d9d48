#pragma once

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <tuple>
#include <vector>

#include "semirat/errors.hpp"

namespace semirat {

struct QuadratureConfig {
    double rtol = 1e-9;
    double atol = 1e-14;
    int max_depth = 40;
    double t_split = 1.0;      // (0, t_split] directly, [t_split, inf) via t = t_split / u
    int min_panels = 30;       // graded panels [4^{-k-1}, 4^{-k}] always laid down
    int max_panels = 150;      // beyond this the endpoint behaviour counts as non-integrable
    long max_segments = 200000;
};

struct QuadResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    int segments = 0;
};

namespace detail {

struct Neumaier {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    [[nodiscard]] double value() const { return sum + comp; }
};

struct Panel {
    double a, b;
    double value, error;
    int depth;
    int source;  // which integrand
    bool operator<(const Panel& o) const { return error < o.error; }
};

/// 15-point Kronrod estimate with the QUADPACK error heuristic.
template <class F>
Panel gk15(const F& f, double a, double b, int depth, int source) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    using G = boost::math::quadrature::gauss<double, 7>;
    const auto& x = GK::abscissa();
    const auto& wk = GK::weights();
    const auto& wg = G::weights();
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    std::array<double, 15> fv{};
    fv[0] = f(c);
    for (std::size_t i = 1; i < 8; ++i) {
        fv[2 * i - 1] = f(c - h * x[i]);
        fv[2 * i] = f(c + h * x[i]);
    }
    double k = fv[0] * wk[0];
    double g = fv[0] * wg[0];
    double abs_k = std::abs(fv[0]) * wk[0];
    for (std::size_t i = 1; i < 8; ++i) {
        const double s = fv[2 * i - 1] + fv[2 * i];
        k += s * wk[i];
        abs_k += (std::abs(fv[2 * i - 1]) + std::abs(fv[2 * i])) * wk[i];
        if (i % 2 == 0) g += s * wg[i / 2];
    }
    const double mean = 0.5 * k;
    double asc = std::abs(fv[0] - mean) * wk[0];
    for (std::size_t i = 1; i < 8; ++i) asc += (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean)) * wk[i];
    double err = std::abs((k - g) * h);
    asc *= std::abs(h);
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * abs_k * std::abs(h);
    if (roundoff > std::numeric_limits<double>::min()) err = std::max(err, roundoff);
    if (!std::isfinite(k)) throw NonIntegrable("integrand not finite on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    return {a, b, k * h, err, depth, source};
}

}  // namespace detail

/// Integrates each f_j over (0, 1] with panels graded geometrically toward 0,
/// then refines all panels against one global error budget. The returned
/// value is the sum of the integrals.
template <class F>
QuadResult integrate_graded_unit(const std::vector<F>& fs, const QuadratureConfig& cfg) {
    if (!(cfg.rtol > 0 && cfg.atol > 0)) throw PreconditionViolation("quadrature tolerances must be positive");
    std::priority_queue<detail::Panel> heap;
    std::vector<detail::Panel> frozen;
    double remainder_err = 0.0;  // geometric estimate of what lies below the last panel

    // lay down graded panels per integrand until the geometric remainder is negligible
    double running = 0.0;
    for (std::size_t j = 0; j < fs.size(); ++j) {
        std::vector<double> contrib;
        double hi = 1.0;
        bool done = false;
        for (int k = 0; k < cfg.max_panels; ++k) {
            const double lo = hi / 4;
            const auto p = detail::gk15(fs[j], lo, hi, 0, static_cast<int>(j));
            heap.push(p);
            running += std::abs(p.value);
            contrib.push_back(std::abs(p.value) + p.error);
            hi = lo;
            if (k + 1 < cfg.min_panels) continue;
            const double c0 = contrib[contrib.size() - 1];
            const double c1 = contrib[contrib.size() - 2];
            const double c2 = contrib[contrib.size() - 3];
            if (c0 == 0.0 && c1 == 0.0) {
                done = true;
                break;
            }
            const double rho = std::max(c0 / c1, c1 / c2);
            if (!(rho < 0.95)) continue;
            const double rest = c0 * rho / (1 - rho);
            if (rest <= 0.1 * std::max(cfg.atol, cfg.rtol * running)) {
                remainder_err += rest;
                done = true;
                break;
            }
        }
        if (!done)
            throw NonIntegrable("endpoint contributions do not decay after " + std::to_string(cfg.max_panels) +
                                " graded panels");
    }

    auto total = [&] {
        detail::Neumaier v, e;
        auto copy = heap;
        while (!copy.empty()) {
            v.add(copy.top().value);
            e.add(copy.top().error);
            copy.pop();
        }
        for (const auto& p : frozen) {
            v.add(p.value);
            e.add(p.error);
        }
        return std::pair{v.value(), e.value() + remainder_err};
    };

    // global adaptive bisection
    double val_sum = 0.0, err_sum = 0.0;
    {
        auto [v, e] = total();
        val_sum = v;
        err_sum = e;
    }
    long segments = static_cast<long>(heap.size());
    int since_resum = 0;
    for (;;) {
        if (err_sum <= std::max(cfg.atol, cfg.rtol * std::abs(val_sum))) {
            // confirm against a fresh sum before accepting
            std::tie(val_sum, err_sum) = total();
            if (err_sum <= std::max(cfg.atol, cfg.rtol * std::abs(val_sum))) break;
        }
        if (heap.empty())
            throw NonIntegrable("maximum bisection depth reached with error " + std::to_string(err_sum));
        const auto p = heap.top();
        heap.pop();
        if (p.depth >= cfg.max_depth) {
            frozen.push_back(p);
            continue;
        }
        if (segments >= cfg.max_segments) throw NonIntegrable("segment budget exhausted");
        const double mid = 0.5 * (p.a + p.b);
        const auto l = detail::gk15(fs[static_cast<std::size_t>(p.source)], p.a, mid, p.depth + 1, p.source);
        const auto r = detail::gk15(fs[static_cast<std::size_t>(p.source)], mid, p.b, p.depth + 1, p.source);
        heap.push(l);
        heap.push(r);
        ++segments;
        val_sum += l.value + r.value - p.value;
        err_sum += l.error + r.error - p.error;
        if (++since_resum == 256) {
            std::tie(val_sum, err_sum) = total();
            since_resum = 0;
        }
    }
    return {val_sum, err_sum, static_cast<int>(segments)};
}

/// Integral of f over [a, inf) via t = a / u (a > 0).
template <class F>
QuadResult integrate_tail(const F& f, double a, const QuadratureConfig& cfg = {}) {
    if (!(a > 0)) throw PreconditionViolation("integrate_tail: lower limit must be positive");
    auto g = [&](double u) { return f(a / u) * a / (u * u); };
    return integrate_graded_unit(std::vector<std::function<double(double)>>{g}, cfg);
}

/// Integral of f over (0, inf): (0, t_split] directly, the rest via t = t_split / u.
template <class F>
QuadResult integrate_half_line(const F& f, const QuadratureConfig& cfg = {}) {
    const double c = cfg.t_split;
    auto head = [&](double u) { return f(c * u) * c; };
    auto tail = [&](double u) { return f(c / u) * c / (u * u); };
    return integrate_graded_unit(std::vector<std::function<double(double)>>{head, tail}, cfg);
}

}  // namespace semirat
