// Command-line front end: profiles, constants, modulation trajectories,
// residual and kernel reports, radial simulation, and the verify-all gate.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "glueheat/acceptance.hpp"
#include "glueheat/bubble.hpp"
#include "glueheat/errors.hpp"
#include "glueheat/glue.hpp"
#include "glueheat/kernel.hpp"
#include "glueheat/modulation.hpp"
#include "glueheat/pde.hpp"
#include "glueheat/profile.hpp"
#include "glueheat/report.hpp"
#include "glueheat/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::vector<double> A{0.05};
    std::string Rkind = "log";
    double t0 = 1e3;
    double horizon = 0; // end time; 0 = subcommand default
    double a = 0.9, a1 = 0.5, a2 = 0.25;
    std::string out = ".";
    std::string format = "csv";
};

glueheat::RateFunction make_rate(const std::string& spec) {
    if (spec.rfind("table:", 0) == 0) {
        std::ifstream is(spec.substr(6));
        if (!is) throw glueheat::domain_error("cannot open rate table " + spec.substr(6));
        std::vector<double> t, R;
        double a, b;
        while (is >> a >> b) {
            t.push_back(a);
            R.push_back(b);
        }
        return glueheat::RateFunction::from_table(std::move(t), std::move(R));
    }
    return glueheat::RateFunction::parse(spec);
}

std::string a_tag(double A) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", A);
    std::string s = buf;
    for (auto& ch : s)
        if (ch == '-') ch = 'm';
    return s;
}

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--A", o.A, "amplitude(s) of the self-similar profile");
    cmd->add_option("--R", o.Rkind, "rate function: log|sqrtlog|sqrtlogloglog|table:<path>");
    cmd->add_option("--t0", o.t0, "start time");
    cmd->add_option("--horizon", o.horizon, "end time (default per subcommand)");
    cmd->add_option("--a", o.a, "weight exponent a");
    cmd->add_option("--a1", o.a1, "weight exponent a1");
    cmd->add_option("--a2", o.a2, "weight exponent a2");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--format", o.format, "summary format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
}

glueheat::ModulationParams make_params(const CommonOpts& o, double A, double T) {
    glueheat::ModulationParams mp;
    mp.A = A;
    mp.R = make_rate(o.Rkind);
    mp.t0 = o.t0;
    mp.T = T;
    mp.a = o.a;
    mp.a1 = o.a1;
    mp.a2 = o.a2;
    return mp;
}

int cmd_profile(const CommonOpts& o) {
    fs::create_directories(o.out);
    json summary = json::array();
    for (double A : o.A) {
        glueheat::ProfileParams p;
        p.A = A;
        auto sol = glueheat::solve_theta(p);
        std::ofstream os(fs::path(o.out) / ("profile_A" + a_tag(A) + ".csv"));
        sol.write_csv(os);
        summary.push_back({{"A", A}, {"ell", sol.ell},
                           {"ell_uncertainty", sol.ell_uncertainty}});
    }
    if (o.format == "json")
        std::cout << summary.dump(2) << "\n";
    else
        for (const auto& row : summary)
            std::cout << row["A"].get<double>() << ","
                      << glueheat::format_g17(row["ell"].get<double>()) << ","
                      << glueheat::format_g17(row["ell_uncertainty"].get<double>())
                      << "\n";
    return 0;
}

int cmd_constants(const CommonOpts& o) {
    using namespace glueheat;
    json out;
    out["u_l2sq"] = radial_integral([](double r) { return sq(bubble_u(r)); }, 0.0,
                                    4e4, 1e-10) +
                    s5_area * 331776.0 / (2.0 * sq(4e4));
    out["z_l2sq"] = radial_integral([](double r) { return sq(kernel_z(r)); }, 0.0,
                                    4e4, 1e-10) +
                    s5_area * 4.0 * 331776.0 / (2.0 * sq(4e4));
    json table = json::array();
    for (double R : {50.0, 100.0, 200.0, 400.0, 800.0}) {
        auto e = ortho_ratio(R, 1e-11);
        table.push_back(
            {{"R", e.R}, {"ratio", e.ratio}, {"second", e.second}, {"omega", e.omega}});
    }
    out["ratio_table"] = table;
    out["gamma0"] = solve_eigenpair().gamma0;
    (void)o;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_modulation(const CommonOpts& o) {
    fs::create_directories(o.out);
    double T = o.horizon > 0 ? o.horizon : o.t0 * 1e4;
    for (double A : o.A) {
        auto mp = make_params(o, A, T);
        glueheat::ProfileParams pp;
        pp.A = A;
        auto profile = glueheat::solve_theta(pp);
        auto traj = glueheat::solve_lambda0(mp);
        glueheat::solve_mu(mp, traj, profile);
        auto resid = glueheat::orthogonality_residual_per_time(traj, profile);
        std::ofstream os(fs::path(o.out) / ("modulation_A" + a_tag(A) + ".csv"));
        traj.write_csv(os, resid);
    }
    return 0;
}

int cmd_residual(const CommonOpts& o) {
    fs::create_directories(o.out);
    double T = o.horizon > 0 ? o.horizon : 1e6;
    for (double A : o.A) {
        auto mp = make_params(o, A, 2.0 * T);
        glueheat::ProfileParams pp;
        pp.A = A;
        auto profile = glueheat::solve_theta(pp);
        auto traj0 = glueheat::solve_lambda0(mp);
        auto traj = traj0.rescaled(0.999 * traj0.separation_scale());
        glueheat::solve_mu(mp, traj, profile);
        glueheat::GlueContext ctx{&traj, &profile, {}, {}};
        glueheat::PointwiseBoundOptions bo;
        bo.times = glueheat::geomspace(o.t0, T, 16);
        auto reps = glueheat::verify_pointwise_bounds(ctx, bo);
        for (const auto& rep : reps) {
            std::ofstream os(fs::path(o.out) /
                             ("residual_A" + a_tag(A) + "_" + rep.name + ".csv"));
            rep.write_csv(os);
        }
        std::ofstream js(fs::path(o.out) / ("residual_A" + a_tag(A) + "_summary.json"));
        glueheat::write_reports_json(js, reps);
        for (const auto& rep : reps)
            std::cout << rep.summary_json() << "\n";
    }
    return 0;
}

int cmd_kernel_check(const CommonOpts& o) {
    using namespace glueheat;
    fs::create_directories(o.out);
    RateFunction R = make_rate(o.Rkind);
    double A = o.A.front();
    double t0 = o.t0;

    KernelLemmaOptions ko;
    ko.times = geomspace(4.0 * t0, (o.horizon > 0 ? o.horizon : 1e4 * t0), 9);

    SourceSpec s1{[R, &o](double t) {
                      return std::pow(t, -2.0) * std::pow(R.value(t), -o.a1);
                  },
                  0, [](double) { return 0.0; },
                  [](double t) { return 2.0 * std::sqrt(t); }, t0};
    SourceSpec s2{[A](double t) { return std::pow(t, -1.0 + 2.5 * A); }, 4,
                  [R, A](double t) { return 0.25 * std::pow(t, 1.25 * A) * R.value(t); },
                  [](double t) { return 2.0 * std::sqrt(t); }, t0};
    SourceSpec s3{[R, A, &o](double t) { return sq(A) * std::pow(R.value(t), -o.a1); },
                  4, [](double t) { return std::sqrt(t); },
                  [](double) { return std::numeric_limits<double>::infinity(); }, t0};

    std::vector<BoundReport> reps;
    reps.push_back(verify_kernel_lemma_compact(s1, ko, "compact_b0"));
    reps.push_back(verify_kernel_lemma_compact(s2, ko, "compact_b4"));
    reps.push_back(verify_kernel_lemma_selfsimilar(s3, ko, "selfsim_b4"));
    for (const auto& rep : reps) {
        std::ofstream os(fs::path(o.out) / ("kernel_" + rep.name + ".csv"));
        rep.write_csv(os);
        std::cout << rep.summary_json() << "\n";
    }
    std::ofstream js(fs::path(o.out) / "kernel_summary.json");
    write_reports_json(js, reps);
    return 0;
}

int cmd_simulate(const CommonOpts& o, const std::string& initial_kind) {
    using namespace glueheat;
    fs::create_directories(o.out);
    double A = o.A.front();
    ProfileParams pp;
    pp.A = A;
    auto profile = solve_theta(pp);

    SimConfig cfg;
    cfg.t0 = o.t0;
    cfg.t_end = o.horizon > 0 ? o.horizon : 2.0 * o.t0;
    cfg.r_max = 20.0 * std::sqrt(cfg.t_end);
    cfg.ell = profile.ell;

    std::function<double(double)> initial;
    ModulationTrajectory traj;
    if (initial_kind == "theta") {
        cfg.dr_core = std::max(0.02, 0.025 * std::sqrt(cfg.t0 + 1.0));
        initial = [&profile, &cfg](double r) { return profile.space_time(r, cfg.t0); };
    } else {
        auto mp = make_params(o, A, 10.0 * cfg.t_end);
        auto traj0 = solve_lambda0(mp);
        traj = traj0.rescaled(0.999 * traj0.separation_scale());
        solve_mu(mp, traj, profile);
        GlueContext ctx{&traj, &profile, {}, {}};
        cfg.dr_core = traj.lambda_at(cfg.t0) / 30.0;
        initial = ansatz_evaluator(ctx, cfg.t0);
    }
    cfg.snapshot_times = {cfg.t0 + 0.5 * (cfg.t_end - cfg.t0), cfg.t_end};
    auto trace = simulate(cfg, initial);

    std::ofstream os(fs::path(o.out) / ("trace_A" + a_tag(A) + ".csv"));
    os << "t,sup_norm,sup_location,local_exponent\n";
    for (std::size_t i = 0; i < trace.times.size(); ++i)
        os << format_g17(trace.times[i]) << ',' << format_g17(trace.sup_norm[i]) << ','
           << format_g17(trace.sup_location[i]) << ','
           << format_g17(trace.local_exponent[i]) << "\n";
    int k = 0;
    for (const auto& snap : trace.fields_at) {
        std::ofstream ss(fs::path(o.out) /
                         ("snapshot_A" + a_tag(A) + "_" + std::to_string(k++) + ".csv"));
        ss << "r,u\n";
        for (std::size_t i = 0; i < snap.r.size(); ++i)
            ss << format_g17(snap.r[i]) << ',' << format_g17(snap.u[i]) << "\n";
    }
    if (trace.blew_up)
        std::cerr << "warning: finite-time blow-up abort at t = " << trace.last_valid_time
                  << " (partial trace written)\n";
    if (trace.nan_abort)
        std::cerr << "warning: instability abort at t = " << trace.last_valid_time << "\n";
    return 0;
}

int cmd_verify_all(const CommonOpts& o) {
    glueheat::acceptance::Options ao;
    if (!o.out.empty() && o.out != ".") ao.artifact_dir = o.out;
    auto results = glueheat::acceptance::run(ao);
    bool all_pass = true;
    for (const auto& r : results) {
        std::printf("[%s] %-28s (%.1fs)%s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.seconds, r.exploratory ? " [exploratory]" : "");
        if (!r.pass) std::fputs(r.details.c_str(), stdout);
        all_pass &= r.pass;
    }
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"glueheat: bubble-to-self-similar gluing diagnostics for the "
                 "6-D energy-critical heat equation"};
    app.set_config("--config", "", "config file with key = value lines");
    app.require_subcommand(1);

    CommonOpts o;
    std::string initial_kind = "glued";

    auto* profile = app.add_subcommand("profile", "solve self-similar profiles");
    add_common(profile, o);
    auto* constants = app.add_subcommand("constants", "bubble constants and eigenvalue");
    add_common(constants, o);
    auto* modulation = app.add_subcommand("modulation", "modulation trajectories");
    add_common(modulation, o);
    auto* residual = app.add_subcommand("residual", "pointwise residual bound reports");
    add_common(residual, o);
    auto* kernel = app.add_subcommand("kernel-check", "heat-kernel convolution bounds");
    add_common(kernel, o);
    auto* simulate = app.add_subcommand("simulate", "radial method-of-lines run");
    add_common(simulate, o);
    simulate->add_option("--initial", initial_kind, "initial data: glued|theta")
        ->check(CLI::IsMember({"glued", "theta"}));
    auto* verify = app.add_subcommand("verify-all", "run the full acceptance suite");
    add_common(verify, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (profile->parsed()) return cmd_profile(o);
        if (constants->parsed()) return cmd_constants(o);
        if (modulation->parsed()) return cmd_modulation(o);
        if (residual->parsed()) return cmd_residual(o);
        if (kernel->parsed()) return cmd_kernel_check(o);
        if (simulate->parsed()) return cmd_simulate(o, initial_kind);
        if (verify->parsed()) return cmd_verify_all(o);
    } catch (const glueheat::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
