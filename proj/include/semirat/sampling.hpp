#pragma once

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace semirat {

/// Logarithmic sampling grid on a ray segment [t_min, t_max].
struct GridSpec {
    double t_min = 1e-6;
    double t_max = 1e6;
    int points = 4096;

    [[nodiscard]] std::string describe() const {
        return "log grid t in [" + std::to_string(t_min) + ", " + std::to_string(t_max) + "], " +
               std::to_string(points) + " points per ray";
    }
};

inline std::vector<double> log_grid(double t_min, double t_max, int points) {
    std::vector<double> t(static_cast<std::size_t>(points));
    const double a = std::log(t_min);
    const double b = std::log(t_max);
    for (int i = 0; i < points; ++i)
        t[static_cast<std::size_t>(i)] = points == 1 ? t_min : std::exp(a + (b - a) * i / (points - 1));
    if (points > 1) {
        t.front() = t_min;
        t.back() = t_max;
    }
    return t;
}

inline std::vector<double> linear_grid(double lo, double hi, int points) {
    std::vector<double> x(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        x[static_cast<std::size_t>(i)] = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
    return x;
}

/// Brent maximisation of f on [lo, hi]; returns (argmax, max).
inline std::pair<double, double> refine_max(const std::function<double(double)>& f, double lo, double hi) {
    auto neg = [&](double x) { return -f(x); };
    const auto r = boost::math::tools::brent_find_minima(neg, lo, hi, 45);
    return {r.first, -r.second};
}

}  // namespace semirat
