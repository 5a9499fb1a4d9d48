#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "semirat/acceptance.hpp"
#include "semirat/experiments.hpp"
#include "semirat/scheme.hpp"

using namespace semirat;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitError = 1;
constexpr int kExitVerdict = 2;

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void emit_json(const nlohmann::json& j, const std::string& out) {
    if (out.empty()) {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot open " + out);
    f << j.dump(2) << '\n';
}

/// CSV when --out ends in .csv, JSON otherwise (stdout without --out).
void emit_report(const ExperimentReport& rep, const std::string& out) {
    if (!out.empty() && ends_with(out, ".csv")) {
        std::ofstream f(out);
        if (!f) throw std::runtime_error("cannot open " + out);
        write_csv(f, rep);
    } else {
        emit_json(to_json(rep), out);
    }
    if (!out.empty())
        for (const auto& run : rep.runs) {
            std::cerr << rep.scheme << ' ' << run.name << " mode=" << run.mode << " s=" << run.s;
            if (run.fit) std::cerr << " slope=" << run.fit->slope;
            if (run.expected_slope) std::cerr << " expected=" << *run.expected_slope;
            std::cerr << (run.pass ? " pass" : " FAIL") << '\n';
        }
}

int verdict(bool pass) { return pass ? kExitPass : kExitVerdict; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rational approximations of the exponential: classification, sector norms, rate experiments"};
    app.require_subcommand(1);

    std::string scheme = "cn", out, n_text = "8,16,...,1024", s_text = "0.5", mode_text = "hnorm";
    double psi = M_PI / 2, theta = M_PI / 4, theta_fraction = 0.99, op_time = 1.0, t_lo = 1e-3, t_hi = 1e3;
    int samples = 200, trials = 100, n_max = 128;
    std::uint64_t seed = StabilityOptions{}.seed;

    auto add_scheme = [&](CLI::App* sub) {
        sub->add_option("--scheme", scheme, "be | cn | pade:k | cayley:tau,phi | shiftcayley:phi | paper-pi6 | ratio:num|den")
            ->capture_default_str();
    };
    auto add_out = [&](CLI::App* sub) { sub->add_option("--out", out, "output file (.csv or .json)"); };
    auto add_theta = [&](CLI::App* sub) { sub->add_option("--theta", theta, "sector half-angle")->capture_default_str(); };
    auto add_series = [&](CLI::App* sub) {
        sub->add_option("--s", s_text, "comma-separated smoothness exponents")->capture_default_str();
        sub->add_option("--n", n_text, "n list, e.g. 8,16,...,1024")->capture_default_str();
    };

    auto* classify_cmd = app.add_subcommand("classify", "order, behaviour at infinity, constants and sector certificate");
    add_scheme(classify_cmd);
    add_out(classify_cmd);
    classify_cmd->add_option("--psi", psi, "sector half-angle")->capture_default_str();
    classify_cmd->add_option("--theta-fraction", theta_fraction, "kappa angle as a fraction of psi")->capture_default_str();

    auto* diag_cmd = app.add_subcommand("diagnose", "modulus derivative along a ray");
    add_scheme(diag_cmd);
    add_out(diag_cmd);
    add_theta(diag_cmd);
    diag_cmd->add_option("--t-lo", t_lo)->capture_default_str();
    diag_cmd->add_option("--t-hi", t_hi)->capture_default_str();
    diag_cmd->add_option("--samples", samples)->capture_default_str();

    auto* sweep_cmd = app.add_subcommand("hnorm-sweep", "sector seminorm of the weighted error symbol over n");
    add_scheme(sweep_cmd);
    add_out(sweep_cmd);
    add_theta(sweep_cmd);
    add_series(sweep_cmd);

    auto* rates_cmd = app.add_subcommand("rates", "fitted convergence rates against the predicted exponent");
    add_scheme(rates_cmd);
    add_out(rates_cmd);
    add_theta(rates_cmd);
    add_series(rates_cmd);
    rates_cmd->add_option("--mode", mode_text, "hnorm | sup | operator")->capture_default_str();
    rates_cmd->add_option("--t", op_time, "time for operator mode")->capture_default_str();

    auto* stab_cmd = app.add_subcommand("stability", "variable-step products");
    add_scheme(stab_cmd);
    add_out(stab_cmd);
    add_theta(stab_cmd);
    stab_cmd->add_option("--trials", trials)->capture_default_str();
    stab_cmd->add_option("--n-max", n_max)->capture_default_str();
    stab_cmd->add_option("--seed", seed)->capture_default_str();

    auto* lower_cmd = app.add_subcommand("lower-bounds", "scalar and shifted-symbol lower bounds");
    add_scheme(lower_cmd);
    add_out(lower_cmd);
    add_theta(lower_cmd);
    add_series(lower_cmd);

    auto* accept_cmd = app.add_subcommand("accept", "run the acceptance suite");
    add_out(accept_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitError;
    }

    try {
        if (*accept_cmd) {
            const auto results = acceptance::run_all(std::cout);
            const auto j = acceptance::to_json(results);
            if (!out.empty()) emit_json(j, out);
            return verdict(j["pass"].get<bool>());
        }
        const RationalFunction r = parse_scheme(scheme);
        if (*classify_cmd) {
            const auto c = classify(r, psi, theta_fraction);
            nlohmann::json j = to_json(c);
            j["schema_version"] = 1;
            j["scheme"] = scheme;
            j["psi"] = psi;
            j["certificate"] = to_json(certify_sector_stability(r, psi));
            emit_json(j, out);
            return kExitPass;
        }
        if (*diag_cmd) {
            const auto d = ray_modulus_diagnostic(r, theta, t_lo, t_hi, samples);
            emit_json(to_json(d), out);
            if (d.likely_exceptional) std::cerr << "ray at theta=" << theta << " is likely exceptional\n";
            return kExitPass;
        }
        if (*sweep_cmd) {
            ExperimentReport rep;
            rep.scheme = scheme;
            rep.classification = classify(r, theta);
            const auto ns = parse_n_list(n_text);
            for (const double s : parse_double_list(s_text)) {
                ReportRun run;
                run.name = "hnorm-sweep";
                run.mode = "hnorm";
                run.theta = theta;
                run.s = s;
                for (const auto& [n, h] : delta_hnorm_sweep(r, theta, s, ns))
                    run.points.push_back({n, h.value, h.abs_error_estimate});
                if (run.points.size() >= 4) {
                    std::vector<std::pair<int, double>> pts;
                    for (const auto& p : run.points) pts.emplace_back(p.n, p.value);
                    run.fit = fit_rate(pts);
                }
                run.pass = true;
                rep.add(std::move(run));
            }
            emit_report(rep, out);
            return kExitPass;
        }
        if (*rates_cmd) {
            RateOptions opt;
            opt.op_time = op_time;
            const auto rep = run_rate_suite(scheme, r, theta, parse_double_list(s_text), parse_n_list(n_text),
                                            parse_rate_mode(mode_text), opt);
            emit_report(rep, out);
            return verdict(rep.pass);
        }
        if (*stab_cmd) {
            StabilityOptions opt;
            opt.trials = trials;
            opt.n_max = n_max;
            opt.seed = seed;
            const auto rep = run_stability_suite(scheme, r, theta, opt);
            emit_report(rep, out);
            return verdict(rep.pass);
        }
        if (*lower_cmd) {
            const auto rep =
                run_lower_bound_suite(scheme, r, theta, parse_double_list(s_text), parse_n_list(n_text));
            emit_report(rep, out);
            return verdict(rep.pass);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
