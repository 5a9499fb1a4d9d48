#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "semirat/experiments.hpp"
#include "semirat/scheme.hpp"

namespace semirat::acceptance {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

namespace detail {

inline std::string fmt(double v, int prec = 6) {
    std::ostringstream os;
    os << std::setprecision(prec) << v;
    return os.str();
}

struct Tally {
    bool pass = true;
    std::ostringstream detail;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << "FAILED " << what << "; ";
        }
    }
};

inline std::vector<int> powers_of_two(int lo, int hi) {
    std::vector<int> out;
    for (int n = lo; n <= hi; n *= 2) out.push_back(n);
    return out;
}

}  // namespace detail

inline CriterionResult classification_exactness() {
    detail::Tally t;
    auto expect = [&](const std::string& id, const RationalFunction& r, double psi, int q, int m, const ExactComplex& rinf,
                      const ExactComplex& a) {
        const auto c = classify(r, psi);
        const bool ok = c.q == q && c.q_is_exact && c.inf.m == m && c.inf.value_at_inf == rinf && c.inf.a == a;
        t.check(ok, id + " got (q=" + std::to_string(c.q) + ", m=" + std::to_string(c.inf.m) +
                        ", r_inf=" + c.inf.value_at_inf.to_string() + ", a=" + c.inf.a.to_string() + ")");
    };
    expect("be", backward_euler(), M_PI / 2, 1, 1, ExactComplex(0), ExactComplex(-1));
    expect("cn", crank_nicolson(), M_PI / 2, 2, 1, ExactComplex(-1), ExactComplex(-4));
    // Q_k has q_{k-1}/q_k = k(k+1) and P_k(z) = Q_k(-z), so r = (-1)^k (1 - 2k(k+1)/z + ...)
    for (int k = 1; k <= 6; ++k) {
        const long sign = k % 2 == 0 ? 1 : -1;
        expect("pade:" + std::to_string(k), pade_exp(k), M_PI / 2, 2 * k, 1, ExactComplex(sign),
               ExactComplex(sign * 2L * k * (k + 1)));
    }
    expect("paper-pi6", pi6_cubic_example(), M_PI / 6, 1, 2, ExactComplex(-1), ExactComplex(Rational(-1, 4)));
    t.detail << "be, cn, pade:1..6, paper-pi6 checked exactly";
    return {1, "classification exactness", t.pass, t.detail.str()};
}

inline CriterionResult pade_symmetry() {
    detail::Tally t;
    for (int k = 1; k <= 6; ++k) {
        const auto r = pade_exp(k);
        t.check(r.num() == r.den().compose_affine(ExactComplex(-1), ExactComplex(0)), "k=" + std::to_string(k));
    }
    t.detail << "P_k(z) = Q_k(-z) for k = 1..6";
    return {2, "Pade symmetry", t.pass, t.detail.str()};
}

inline CriterionResult quadrature_oracle() {
    detail::Tally t;
    const double a = hnorm0(ray_function(backward_euler(), M_PI / 3)).value;
    const double b = hnorm0(ray_function(backward_euler(), M_PI / 2)).value;
    const double ea = std::abs(a - 4 * M_PI / (3 * std::sqrt(3.0)));
    const double eb = std::abs(b - M_PI);
    t.check(ea <= 1e-7, "theta=pi/3");
    t.check(eb <= 1e-7, "theta=pi/2");
    t.detail << "resolvent norm errors " << detail::fmt(ea, 3) << " (pi/3), " << detail::fmt(eb, 3) << " (pi/2)";
    return {3, "quadrature oracle", t.pass, t.detail.str()};
}

inline CriterionResult isometry() {
    detail::Tally t;
    double worst = 0.0;
    const std::vector<RayFunction> fixtures = {ray_function(backward_euler(), M_PI / 2),
                                               DeltaSymbol(crank_nicolson(), 8, 1.0).ray(M_PI / 2)};
    for (std::size_t i = 0; i < fixtures.size(); ++i)
        for (const double gamma : {1.0 / 3, 0.5, 2.0 / 3}) {
            const auto f = fixtures[i].at_angle(gamma * M_PI / 2);
            const double direct = hnorm0(f).value;
            const double rel = std::abs(power_substitution_hnorm(f, M_PI / 2).value - direct) / direct;
            worst = std::max(worst, rel);
            t.check(rel < 1e-6, "fixture " + std::to_string(i) + " gamma " + detail::fmt(gamma, 3));
        }
    t.detail << "max relative deviation " << detail::fmt(worst, 3);
    return {4, "power-substitution isometry", t.pass, t.detail.str()};
}

/// Operator mode needs t * |lambda_max| well beyond n^2 to leave the pre-asymptotic
/// regime, hence the long horizon and n <= 128.
inline RateOptions operator_rate_options() {
    RateOptions opt;
    opt.op_time = 1e3;
    return opt;
}

inline CriterionResult sharpened_rates() {
    detail::Tally t;
    const double theta = M_PI / 4;
    const std::vector<double> s_list = {0.25, 0.5, 0.75, 1, 1.5, 2, 2.5, 3};
    const auto hn = run_rate_suite("cn", crank_nicolson(), theta, s_list, detail::powers_of_two(8, 1024), RateMode::hnorm);
    for (const auto& run : hn.runs) {
        t.check(run.pass, "hnorm s=" + detail::fmt(run.s) + " slope " + detail::fmt(run.fit->slope, 4));
        t.detail << "s=" << run.s << ":" << detail::fmt(run.fit->slope, 4) << " ";
    }
    const auto op = run_rate_suite("cn", crank_nicolson(), theta, {0.5, 2.0}, detail::powers_of_two(8, 128), RateMode::op,
                                   operator_rate_options());
    for (const auto& run : op.runs) {
        double ref = NAN;
        for (const auto& h : hn.runs)
            if (h.s == run.s) ref = h.fit->slope;
        t.check(std::abs(run.fit->slope - ref) <= 0.1, "operator s=" + detail::fmt(run.s));
        t.detail << "op s=" << run.s << ":" << detail::fmt(run.fit->slope, 4) << " ";
    }
    return {5, "sharpened rates (cn)", t.pass, t.detail.str()};
}

inline CriterionResult contractive_branch() {
    detail::Tally t;
    const auto rep =
        run_rate_suite("be", backward_euler(), M_PI / 4, {0, 0.5, 1, 2}, detail::powers_of_two(8, 1024), RateMode::hnorm);
    for (const auto& run : rep.runs) {
        t.check(std::abs(run.fit->slope + 1.0) <= 0.15, "s=" + detail::fmt(run.s));
        t.detail << "s=" << run.s << ":" << detail::fmt(run.fit->slope, 4) << " ";
    }
    return {6, "s-independent rate (be)", t.pass, t.detail.str()};
}

inline CriterionResult scalar_lower_bound() {
    detail::Tally t;
    // cn: a_taylor = -1/12; paper-pi6: r = 1 - z + z^2 - 9z^3 + ..., so a_taylor = 1/2
    t.check(leading_error_coefficient(crank_nicolson()) == ExactComplex(Rational(-1, 12)), "cn a_taylor");
    t.check(leading_error_coefficient(pi6_cubic_example()) == ExactComplex(Rational(1, 2)), "paper-pi6 a_taylor");
    auto run = [&](const std::string& id, const RationalFunction& r, double theta, int n_max, double target) {
        const auto rep = run_lower_bound_suite(id, r, theta, {0.0}, detail::powers_of_two(8, n_max));
        const double v = rep.runs.front().points.back().value;
        const double rel = std::abs(v - target) / target;
        t.check(rel <= 0.01, id);
        t.detail << id << " n=" << n_max << " rel.dev " << detail::fmt(rel, 3) << " ";
    };
    run("cn", crank_nicolson(), M_PI / 4, 512, 1.0 / (12 * std::exp(1.0)));
    run("paper-pi6", pi6_cubic_example(), M_PI / 8, 2048, 0.5 / std::exp(1.0));
    return {7, "scalar lower bound", t.pass, t.detail.str()};
}

inline CriterionResult q_integral_exponents() {
    detail::Tally t;
    const auto ns = detail::powers_of_two(16, 1024);
    for (const double eps : {0.0, 1.0})
        for (const double s : {0.25, 0.5}) {
            std::vector<std::pair<int, double>> pts;
            for (const int n : ns) pts.emplace_back(n, q_integral(crank_nicolson(), eps, 1.0, M_PI / 4, n, s));
            const double slope = fit_rate(pts).slope;
            t.check(std::abs(slope + 2 * s) <= 0.15, "eps=" + detail::fmt(eps) + " s=" + detail::fmt(s));
            t.detail << "eps=" << eps << ",s=" << s << ":" << detail::fmt(slope, 4) << " ";
        }
    const double be = q_integral(backward_euler(), 0.0, 1.0, 0.0, 1, 0.0);
    t.check(std::abs(be - 0.5) <= 1e-9, "be closed form");
    t.detail << "be err " << detail::fmt(std::abs(be - 0.5), 3);
    return {8, "Q-integral exponents", t.pass, t.detail.str()};
}

inline CriterionResult variable_steps() {
    detail::Tally t;
    const auto cn = run_stability_suite("cn", crank_nicolson(), M_PI / 4);
    const auto be = run_stability_suite("be", backward_euler(), M_PI / 4);
    for (const auto* rep : {&cn, &be})
        for (const auto& run : rep->runs) {
            t.check(run.pass, rep->scheme + " " + run.name);
            t.detail << rep->scheme << " " << run.name << " " << run.details.dump() << " ";
        }
    return {9, "variable-step stability", t.pass, t.detail.str()};
}

inline CriterionResult appendix_bound() {
    detail::Tally t;
    std::vector<double> s_grid;
    for (int i = 0; i <= 6; ++i) s_grid.push_back(0.5 * i);
    const auto fit = appendix_bound_check(crank_nicolson(), M_PI / 4, 1.0, {4, 16, 64}, s_grid);
    t.check(fit.violations.empty(), std::to_string(fit.violations.size()) + " violations");
    t.detail << "C=" << detail::fmt(fit.C_fit, 4) << " alpha=" << detail::fmt(fit.alpha_fit, 4) << " samples=" << fit.samples;
    return {10, "appendix derivative bound", t.pass, t.detail.str()};
}

inline CriterionResult operator_calculus_bound() {
    detail::Tally t;
    const double theta = M_PI / 3;
    const std::vector<SectorialMatrix> ops = {ray_spectrum_fixture(M_PI / 4), ray_spectrum_fixture(M_PI / 4, 9, 0.3, 30.0),
                                              make_diagonal_sectorial({1.0}, 0.0)};
    double worst_margin = INFINITY, worst_power = 0.0;
    int pairs = 0;
    for (const auto& A : ops) {
        const double M = sectoriality_constant(A, theta).M;
        auto check = [&](const RayFunction& f, const std::string& what) {
            const double lhs = spectral_norm(A.apply([&](cplx l) { return f.at(l); }));
            const double rhs = std::abs(f.value_at_inf) + 0.5 * M * hnorm0(f).value + 1e-8;
            worst_margin = std::min(worst_margin, rhs - lhs);
            ++pairs;
            t.check(lhs <= rhs, what);
        };
        check(ray_function(backward_euler(), theta), "resolvent");
        for (const auto& r : {backward_euler(), crank_nicolson(), pade_exp(2)})
            for (const int n : {1, 4, 32}) {
                check(product_ray_function(r, StepSequence::uniform(n, 1.0 / n), theta), "r_n n=" + std::to_string(n));
                for (const double s : {0.5, 1.0, 2.0})
                    check(DeltaSymbol(r, n, s).ray(theta), "Delta n=" + std::to_string(n) + " s=" + detail::fmt(s));
            }
        for (const auto& r : {backward_euler(), crank_nicolson(), pade_exp(2), pade_exp(3)})
            for (const int n : {1, 7, 64}) {
                std::vector<cplx> l;
                for (const cplx x : A.lambda) l.push_back(x / double(n));
                const CMatrix rA = rational_of_matrix(r, make_diagonal_sectorial(l, A.theta));
                CMatrix P = CMatrix::Identity(A.dim, A.dim);
                for (int j = 0; j < n; ++j) P = P * rA;
                const double norm = spectral_norm(P);
                worst_power = std::max(worst_power, norm);
                t.check(norm <= 1.0, "||r(A/n)^n|| n=" + std::to_string(n));
            }
    }
    t.detail << pairs << " pairs, min margin " << detail::fmt(worst_margin, 3) << ", max ||r(A/n)^n|| "
             << detail::fmt(worst_power, 6);
    return {11, "operator calculus bound", t.pass, t.detail.str()};
}

inline std::vector<std::function<CriterionResult()>> criteria() {
    return {classification_exactness, pade_symmetry, quadrature_oracle, isometry,
            sharpened_rates,          contractive_branch, scalar_lower_bound, q_integral_exponents,
            variable_steps,           appendix_bound, operator_calculus_bound};
}

inline std::string format_line(const CriterionResult& c) {
    std::ostringstream os;
    os << (c.pass ? "PASS" : "FAIL") << "  criterion " << std::setw(2) << c.id << "  " << c.title << "  ("
       << std::fixed << std::setprecision(2) << c.seconds << " s)  " << c.detail;
    return os.str();
}

/// Runs every criterion, printing one line each; exceptions count as failures.
inline std::vector<CriterionResult> run_all(std::ostream& out) {
    std::vector<CriterionResult> results;
    int id = 0;
    for (const auto& fn : criteria()) {
        ++id;
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult c;
        try {
            c = fn();
        } catch (const std::exception& e) {
            c = {id, "criterion " + std::to_string(id), false, std::string("exception: ") + e.what()};
        }
        c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out << format_line(c) << std::endl;
        results.push_back(std::move(c));
    }
    return results;
}

inline nlohmann::json to_json(const std::vector<CriterionResult>& results) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["criteria"] = nlohmann::json::array();
    bool all = true;
    for (const auto& c : results) {
        all = all && c.pass;
        j["criteria"].push_back({{"id", c.id}, {"title", c.title}, {"pass", c.pass}, {"detail", c.detail}});
    }
    j["pass"] = all;
    return j;
}

}  // namespace semirat::acceptance
