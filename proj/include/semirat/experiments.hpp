#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "semirat/errors.hpp"
#include "semirat/hnorm.hpp"
#include "semirat/semigroup.hpp"
#include "semirat/stability.hpp"

namespace semirat {

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
    std::vector<int> n_used;
    double r_squared = 1.0;
};

/// Fraction of the smallest n dropped before fitting.
inline constexpr double kPreAsymptoticCut = 0.25;

/// Least squares of log value on log n after dropping the smallest 25% of n.
inline RateFit fit_rate(const std::vector<std::pair<int, double>>& points) {
    if (points.size() < 4) throw DegenerateInput("need at least 4 points");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].second > 0) || !std::isfinite(points[i].second))
            throw DegenerateInput("values must be positive and finite");
        if (points[i].first < 1 || (i > 0 && points[i].first <= points[i - 1].first))
            throw DegenerateInput("n must be positive and strictly increasing");
    }
    const auto cut = static_cast<std::size_t>(std::floor(kPreAsymptoticCut * static_cast<double>(points.size())));
    std::vector<double> x, y;
    RateFit fit;
    for (std::size_t i = cut; i < points.size(); ++i) {
        x.push_back(std::log(points[i].first));
        y.push_back(std::log(points[i].second));
        fit.n_used.push_back(points[i].first);
    }
    const auto m = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - fit.intercept - fit.slope * x[i];
        ssr += e * e;
    }
    fit.stderr_slope = x.size() > 2 ? std::sqrt(ssr / (m - 2) / sxx) : 0.0;
    fit.r_squared = syy > 0 ? 1 - ssr / syy : 1.0;
    return fit;
}

/// Exponent the theory predicts for ||Delta_{n,s}||: min{s(m+1)/m, q} when
/// |r(inf)| = 1 and q when |r(inf)| < 1.
inline double predicted_rate(const SchemeClassification& c, double s) {
    if (c.mass_at_inf_abs < 1.0) return c.q;
    return std::min(s * (c.inf.m + 1.0) / c.inf.m, static_cast<double>(c.q));
}

struct SeriesPoint {
    int n = 0;
    double value = 0.0;
    double err_est = 0.0;
};

struct ReportRun {
    std::string name;
    std::string mode;
    double theta = 0.0;
    double s = 0.0;
    std::vector<SeriesPoint> points;
    std::optional<RateFit> fit;
    std::optional<double> expected_slope;
    double tolerance = 0.0;
    nlohmann::json details = nlohmann::json::object();
    bool pass = false;
};

struct ExperimentReport {
    static constexpr int schema_version = 1;
    std::string scheme;
    std::optional<SchemeClassification> classification;
    std::vector<ReportRun> runs;
    bool pass = true;

    void add(ReportRun run) {
        pass = pass && run.pass;
        runs.push_back(std::move(run));
    }
};

inline nlohmann::json complex_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

inline nlohmann::json to_json(const SchemeClassification& c) {
    nlohmann::json j;
    j["q"] = c.q;
    j["q_is_exact"] = c.q_is_exact;
    j["m"] = c.inf.m;
    j["r_inf"] = c.inf.value_at_inf.to_string();
    j["a"] = c.inf.a.to_string();
    j["a_taylor"] = c.error_constant.to_string();
    j["mass_at_inf_abs"] = c.mass_at_inf_abs;
    j["c_r"] = c.c_r;
    j["kappa"] = c.kappa ? nlohmann::json(*c.kappa) : nlohmann::json(nullptr);
    return j;
}

inline nlohmann::json to_json(const RateFit& f) {
    return {{"slope", f.slope}, {"intercept", f.intercept}, {"stderr", f.stderr_slope}, {"n_used", f.n_used},
            {"r_squared", f.r_squared}};
}

inline nlohmann::json to_json(const ReportRun& r) {
    nlohmann::json j;
    j["name"] = r.name;
    j["mode"] = r.mode;
    j["theta"] = r.theta;
    j["s"] = r.s;
    j["points"] = nlohmann::json::array();
    for (const auto& p : r.points) j["points"].push_back({{"n", p.n}, {"value", p.value}, {"err_est", p.err_est}});
    if (r.fit) j["fit"] = to_json(*r.fit);
    if (r.expected_slope) {
        j["expected_slope"] = *r.expected_slope;
        j["tolerance"] = r.tolerance;
    }
    if (!r.details.empty()) j["details"] = r.details;
    j["pass"] = r.pass;
    return j;
}

inline nlohmann::json to_json(const ExperimentReport& rep) {
    nlohmann::json j;
    j["schema_version"] = ExperimentReport::schema_version;
    j["scheme"] = rep.scheme;
    j["classification"] = rep.classification ? to_json(*rep.classification) : nlohmann::json(nullptr);
    j["runs"] = nlohmann::json::array();
    for (const auto& r : rep.runs) j["runs"].push_back(to_json(r));
    j["pass"] = rep.pass;
    return j;
}

inline nlohmann::json to_json(const StabilityCertificate& c) {
    nlohmann::json poles = nlohmann::json::array();
    for (const cplx p : c.poles_in_closed_sector) poles.push_back(complex_json(p));
    return {{"schema_version", 1},
            {"psi", c.psi},
            {"is_stable", c.is_stable},
            {"max_boundary_modulus", c.max_boundary_modulus},
            {"worst_point", complex_json(c.worst_point)},
            {"poles_in_closed_sector", poles},
            {"grid_spec", c.grid_spec}};
}

inline nlohmann::json to_json(const DiagnosticReport& d) {
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& s : d.samples)
        samples.push_back({{"t", s.t},
                           {"abs_derivative", s.abs_derivative},
                           {"modulus", s.modulus},
                           {"modulus_derivative", s.modulus_derivative}});
    return {{"schema_version", 1},
            {"theta", d.theta},
            {"interval", {d.t_lo, d.t_hi}},
            {"sup_ratio", d.sup_ratio},
            {"sign_pattern", d.sign_pattern},
            {"negative", d.negative},
            {"positive", d.positive},
            {"zero", d.zero},
            {"likely_exceptional", d.likely_exceptional},
            {"samples", samples}};
}

/// One CSV row per series point: scheme, mode, theta, s, n, value, err_est.
inline void write_csv(std::ostream& os, const ExperimentReport& rep, bool header = true) {
    if (header) os << "scheme,mode,theta,s,n,value,err_est\n";
    std::ostringstream line;
    line.precision(17);
    for (const auto& r : rep.runs)
        for (const auto& p : r.points) {
            line.str("");
            line << rep.scheme << ',' << r.mode << ',' << r.theta << ',' << r.s << ',' << p.n << ',' << p.value << ','
                 << p.err_est << '\n';
            os << line.str();
        }
}

/// "8,16,32" or "8,16,...,1024". With an ellipsis the first two entries fix the
/// progression: geometric when the second is an integer multiple (>= 2) of the
/// first, arithmetic otherwise; the last entry must lie on it.
inline std::vector<int> parse_n_list(const std::string& text) {
    std::vector<std::string> tok;
    std::stringstream ss(text);
    for (std::string t; std::getline(ss, t, ',');) tok.push_back(t);
    auto to_int = [](const std::string& t) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(t, &used);
            if (used != t.size() || v < 1) throw ParseError("bad n '" + t + "'");
            return v;
        } catch (const std::logic_error&) {
            throw ParseError("bad n '" + t + "'");
        }
    };
    std::vector<int> out;
    const auto dots = std::find(tok.begin(), tok.end(), "...");
    if (dots == tok.end()) {
        for (const auto& t : tok) out.push_back(to_int(t));
    } else {
        if (dots - tok.begin() != 2 || tok.end() - dots != 2) throw ParseError("expected a,b,...,c");
        const int a = to_int(tok[0]), b = to_int(tok[1]), c = to_int(tok[3]);
        if (b <= a || c < b) throw ParseError("progression must increase");
        const bool geometric = b % a == 0 && b / a >= 2;
        long long v = a;
        while (v <= c) {
            out.push_back(static_cast<int>(v));
            v = geometric ? v * (b / a) : v + (b - a);
        }
        if (out.back() != c) throw ParseError("last entry " + std::to_string(c) + " is not on the progression");
    }
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i] <= out[i - 1]) throw ParseError("n list must be strictly increasing");
    if (out.empty()) throw ParseError("empty n list");
    return out;
}

inline std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    for (std::string t; std::getline(ss, t, ',');) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(t, &used));
            if (used != t.size()) throw ParseError("bad number '" + t + "'");
        } catch (const std::logic_error&) {
            throw ParseError("bad number '" + t + "'");
        }
    }
    if (out.empty()) throw ParseError("empty list");
    return out;
}

enum class RateMode { hnorm, sup, op };

inline std::string to_string(RateMode m) {
    switch (m) {
        case RateMode::hnorm: return "hnorm";
        case RateMode::sup: return "sup";
        case RateMode::op: return "operator";
    }
    return "?";
}

inline RateMode parse_rate_mode(const std::string& s) {
    if (s == "hnorm") return RateMode::hnorm;
    if (s == "sup") return RateMode::sup;
    if (s == "operator" || s == "op") return RateMode::op;
    throw ParseError("unknown mode '" + s + "'");
}

struct RateOptions {
    double slope_tolerance = 0.15;
    QuadratureConfig quad{};
    // operator mode: 40 eigenvalues on the rays +-theta, moduli 1e-3..1e3, y = ones / sqrt(40)
    int op_count = 40;
    double op_lo = 1e-3;
    double op_hi = 1e3;
    double op_time = 1.0;
    // sup mode: boundary grid t in [1e-6, sup_span * n^2]
    double sup_span = 1e3;
    int sup_points = 4096;
};

/// The n-series of ||Delta_{n,s}|| (hnorm), sup |Delta_{n,s}| (sup) or the
/// semigroup error on the ray-spectrum fixture (operator), with slope verdicts.
inline ExperimentReport run_rate_suite(const std::string& scheme_id, const RationalFunction& r, double theta,
                                       const std::vector<double>& s_list, const std::vector<int>& n_list, RateMode mode,
                                       const RateOptions& opt = {}) {
    const auto cert = certify_sector_stability(r, theta);
    if (!cert.is_stable) throw PreconditionViolation("scheme is not stable on the sector of angle theta");
    ExperimentReport rep;
    rep.scheme = scheme_id;
    rep.classification = classify(r, theta);
    const auto series = std::make_shared<const LogSeries>(r);
    std::optional<SectorialMatrix> A;
    CVector y;
    if (mode == RateMode::op) {
        A = ray_spectrum_fixture(theta, opt.op_count, opt.op_lo, opt.op_hi);
        y = CVector::Ones(opt.op_count) / std::sqrt(static_cast<double>(opt.op_count));
    }
    for (const double s : s_list) {
        ReportRun run;
        run.name = "rate";
        run.mode = to_string(mode);
        run.theta = theta;
        run.s = s;
        for (const int n : n_list) {
            SeriesPoint p{n, 0.0, 0.0};
            const DeltaSymbol delta(r, n, s, series);
            if (mode == RateMode::hnorm) {
                const auto h = hnorm0(delta.ray(theta), opt.quad);
                p.value = h.value;
                p.err_est = h.abs_error_estimate;
            } else if (mode == RateMode::sup) {
                p.value = sup_on_sector(delta.ray(theta), GridSpec{1e-6, opt.sup_span * n * n, opt.sup_points}).sup;
            } else {
                p.value = approximation_error(*A, r, n, opt.op_time, s, y, series);
            }
            run.points.push_back(p);
        }
        std::vector<std::pair<int, double>> pts;
        for (const auto& p : run.points) pts.emplace_back(p.n, p.value);
        run.fit = fit_rate(pts);
        run.expected_slope = -predicted_rate(*rep.classification, s);
        run.tolerance = opt.slope_tolerance;
        run.pass = std::abs(run.fit->slope - *run.expected_slope) <= run.tolerance;
        if (mode == RateMode::op) run.details = {{"t", opt.op_time}, {"eigenvalues", opt.op_count}};
        rep.add(std::move(run));
    }
    return rep;
}

struct StabilityOptions {
    std::uint64_t seed = 20240601;
    int trials = 100;        // random sequences (|r(inf)| < 1 branch)
    int n_max = 128;         // longest random sequence
    double ratio_bound = 1e3;
    int j_max = 10;          // dyadic ladders 2^0 .. 2^j, j <= j_max (|r(inf)| = 1 branch)
    int per_ratio = 3;       // shuffles per ladder, the max is kept
    double max_over_min = 3.0;
    QuadratureConfig quad{};
};

namespace detail {

/// Polynomial least squares in j; returns coefficients c_0..c_deg.
inline std::vector<double> poly_fit(const std::vector<double>& x, const std::vector<double>& y, int deg) {
    Eigen::MatrixXd V(static_cast<Eigen::Index>(x.size()), deg + 1);
    Eigen::VectorXd b(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (int k = 0; k <= deg; ++k) V(static_cast<Eigen::Index>(i), k) = std::pow(x[i], k);
        b(static_cast<Eigen::Index>(i)) = y[i];
    }
    const Eigen::VectorXd c = V.colPivHouseholderQr().solve(b);
    return {c.data(), c.data() + c.size()};
}

/// Log-uniform steps in [k0, k0 * ratio] containing both endpoints.
inline StepSequence random_steps(std::mt19937_64& rng, int n, double k0, double ratio) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> k(static_cast<std::size_t>(n));
    for (auto& x : k) x = k0 * std::pow(ratio, u(rng));
    k.front() = k0;
    if (n > 1) k.back() = k0 * ratio;
    std::shuffle(k.begin(), k.end(), rng);
    return StepSequence(std::move(k));
}

}  // namespace detail

/// Variable-step products: for |r(inf)| = 1 the norm is regressed against
/// j = log2(K1/K0); for |r(inf)| < 1 random sequences must stay uniformly bounded.
inline ExperimentReport run_stability_suite(const std::string& scheme_id, const RationalFunction& r, double theta,
                                            const StabilityOptions& opt = {}) {
    const auto cert = certify_sector_stability(r, theta);
    if (!cert.is_stable) throw PreconditionViolation("scheme is not stable on the sector of angle theta");
    ExperimentReport rep;
    rep.scheme = scheme_id;
    rep.classification = classify(r, theta);
    std::mt19937_64 rng(opt.seed);

    {
        ReportRun single;
        single.name = "single-step";
        single.mode = "product";
        single.theta = theta;
        const double a = product_hnorm(r, StepSequence({1.0}), theta, opt.quad).value;
        const double b = hnorm0(ray_function(r, theta), opt.quad).value;
        single.points.push_back({1, a, 0.0});
        single.details = {{"hnorm0_of_factor", b}};
        single.pass = std::abs(a - b) <= 1e-8 * b;
        rep.add(std::move(single));
    }

    if (rep.classification->mass_at_inf_abs >= 1.0) {
        ReportRun run;
        run.name = "ratio-sweep";
        run.mode = "product";
        run.theta = theta;
        std::vector<double> js, vals;
        for (int j = 0; j <= opt.j_max; ++j) {
            double v = 0.0;
            std::vector<double> ladder;
            for (int i = 0; i <= j; ++i) ladder.push_back(std::ldexp(1.0, i));
            for (int t = 0; t < opt.per_ratio; ++t) {
                std::shuffle(ladder.begin(), ladder.end(), rng);
                v = std::max(v, product_hnorm(r, StepSequence(ladder), theta, opt.quad).value);
            }
            // n column carries j = log2(K1/K0)
            run.points.push_back({j, v, 0.0});
            js.push_back(j);
            vals.push_back(v);
        }
        const auto lin = detail::poly_fit(js, vals, 1);
        const auto quad = detail::poly_fit(js, vals, 2);
        const double jmax = opt.j_max;
        run.details = {{"linear", lin}, {"quadratic", quad}, {"x", "log2(K1/K0)"}};
        run.pass = lin[1] > 0 && quad[2] * jmax <= 0.5 * lin[1];
        rep.add(std::move(run));
    } else {
        ReportRun run;
        run.name = "random-sequences";
        run.mode = "product";
        run.theta = theta;
        std::uniform_int_distribution<int> len(1, opt.n_max);
        double lo = INFINITY, hi = 0.0;
        for (int t = 0; t < opt.trials; ++t) {
            const int n = len(rng);
            const auto K = detail::random_steps(rng, n, 1.0, opt.ratio_bound);
            const double v = product_hnorm(r, K, theta, opt.quad).value;
            run.points.push_back({n, v, 0.0});
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        run.details = {{"max", hi}, {"min", lo}, {"max_over_min", hi / lo}, {"seed", opt.seed}};
        run.pass = hi / lo < opt.max_over_min;
        rep.add(std::move(run));
    }
    return rep;
}

struct LowerBoundOptions {
    double scalar_rel_tol = 0.01;
    double slope_tolerance = 0.15;
    QuadratureConfig quad{};
};

/// (a) n^q |Delta_{n,s}(1)| against |a_taylor| / e; (b) for |r(inf)| = 1 the
/// shifted symbol Delta_{n,s}(z + 1) must not decay faster than n^{-s(m+1)/m}.
inline ExperimentReport run_lower_bound_suite(const std::string& scheme_id, const RationalFunction& r, double theta,
                                              const std::vector<double>& s_list, const std::vector<int>& n_list,
                                              const LowerBoundOptions& opt = {}) {
    ExperimentReport rep;
    rep.scheme = scheme_id;
    rep.classification = classify(r, theta);
    const auto& cls = *rep.classification;
    const double target = std::abs(cls.error_constant.to_cplx()) / std::exp(1.0);
    const auto series = std::make_shared<const LogSeries>(r);
    for (const double s : s_list) {
        ReportRun run;
        run.name = "scalar";
        run.mode = "scalar";
        run.theta = theta;
        run.s = s;
        for (const int n : n_list) {
            const double v = std::pow(double(n), cls.q) * std::abs(DeltaSymbol(r, n, s, series)(1.0).first);
            run.points.push_back({n, v, 0.0});
        }
        const double last = run.points.back().value;
        run.details = {{"target", target}, {"relative_deviation", std::abs(last - target) / target}};
        run.pass = std::abs(last - target) <= opt.scalar_rel_tol * target;
        rep.add(std::move(run));
    }
    if (cls.mass_at_inf_abs >= 1.0) {
        for (const double s : s_list) {
            ReportRun run;
            run.name = "shifted-symbol";
            run.mode = "hnorm";
            run.theta = theta;
            run.s = s;
            for (const int n : n_list) {
                auto delta = std::make_shared<DeltaSymbol>(r, n, s, series);
                RayFunction f{[delta](cplx z) { return (*delta)(z + 1.0); }, theta, delta->value_at_infinity(),
                              r.has_real_coeffs()};
                const auto h = hnorm0(f, opt.quad);
                run.points.push_back({n, h.value, h.abs_error_estimate});
            }
            std::vector<std::pair<int, double>> pts;
            for (const auto& p : run.points) pts.emplace_back(p.n, p.value);
            run.fit = fit_rate(pts);
            const double bound = -s * (cls.inf.m + 1.0) / cls.inf.m;
            run.expected_slope = bound;
            run.tolerance = opt.slope_tolerance;
            run.details = {{"verdict", "slope >= expected_slope - tolerance"}};
            run.pass = run.fit->slope >= bound - opt.slope_tolerance;
            rep.add(std::move(run));
        }
    }
    return rep;
}

}  // namespace semirat
