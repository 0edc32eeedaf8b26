#include "glueheat/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "glueheat/bubble.hpp"
#include "glueheat/errors.hpp"
#include "glueheat/glue.hpp"
#include "glueheat/kernel.hpp"
#include "glueheat/modulation.hpp"
#include "glueheat/pde.hpp"
#include "glueheat/profile.hpp"
#include "glueheat/util.hpp"

namespace glueheat::acceptance {

namespace {

struct Check {
    bool ok = true;
    std::ostringstream ss;

    void require(bool cond, const std::string& what) {
        ok &= cond;
        ss << (cond ? "  ok: " : "  FAIL: ") << what << "\n";
    }
    void note(const std::string& what) { ss << "  " << what << "\n"; }
};

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

void maybe_write_reports(const Options& opt, const std::string& stem,
                         const std::vector<BoundReport>& reports) {
    if (opt.artifact_dir.empty()) return;
    std::filesystem::create_directories(opt.artifact_dir);
    for (const auto& rep : reports) {
        std::ofstream os(opt.artifact_dir + "/" + stem + "_" + rep.name + ".csv");
        rep.write_csv(os);
    }
    std::ofstream js(opt.artifact_dir + "/" + stem + "_summary.json");
    write_reports_json(js, reports);
}

// ---- criterion: exact constants -------------------------------------------

void crit_exact_constants(Check& c, const Options&) {
    double u2 = radial_integral([](double r) { return sq(bubble_u(r)); }, 0.0, 4e4,
                                1e-10) +
                s5_area * 331776.0 / (2.0 * sq(4e4));
    double z2 = radial_integral([](double r) { return sq(kernel_z(r)); }, 0.0, 4e4,
                                1e-10) +
                s5_area * 4.0 * 331776.0 / (2.0 * sq(4e4));
    double e_u = std::abs(u2 / u_l2sq() - 1.0);
    double e_z = std::abs(z2 / z_l2sq() - 1.0);
    c.require(e_u <= 1e-8, fmt("|U|_L2^2 quadrature vs 24^3 pi^3/6: rel err %.3e", e_u));
    c.require(e_z <= 1e-8, fmt("|Z|_L2^2 quadrature vs 4*24^3 pi^3/15: rel err %.3e", e_z));
}

// ---- criterion: ratio expansion --------------------------------------------

void crit_ratio_expansion(Check& c, const Options& opt) {
    auto sweep = ratio_sweep(50.0, 800.0, 8, 1e-11);
    double worst_second = 0;
    for (const auto& e : sweep)
        worst_second = std::max(worst_second, std::abs(e.second / (45.0 / 16.0) - 1.0));
    c.require(worst_second <= 0.01,
              fmt("(ratio - 5/4) R^2 within 1%% of 45/16 on [50,800]: worst %.4f%%",
                  100 * worst_second));

    double lo = 1e300, hi = 0;
    for (double R : {50.0, 100.0, 200.0, 400.0, 800.0}) {
        auto e = ortho_ratio(R, 1e-11);
        double w4 = std::abs(e.omega) * sq(sq(R));
        lo = std::min(lo, w4);
        hi = std::max(hi, w4);
    }
    c.require(hi / lo < 4.0, fmt("omega R^4 spread over {50..800}: %.4f (< 4)", hi / lo));

    if (!opt.artifact_dir.empty()) {
        std::filesystem::create_directories(opt.artifact_dir);
        std::ofstream os(opt.artifact_dir + "/ratio_sweep.csv");
        os << "R,ratio,second,omega\n";
        for (const auto& e : sweep)
            os << format_g17(e.R) << ',' << format_g17(e.ratio) << ','
               << format_g17(e.second) << ',' << format_g17(e.omega) << '\n';
    }
}

// ---- criterion: profile bounds ---------------------------------------------

void crit_profile_bounds(Check& c, const Options&) {
    for (double A : {0.01, 0.05, 0.1}) {
        ProfileParams p;
        p.A = A;
        auto sol = solve_theta(p);
        double upper_viol = -1e300, lower_min = 1e300;
        for (std::size_t i = 0; i < sol.grid.size(); ++i) {
            double tt = tilde_theta(sol.grid[i]);
            upper_viol = std::max(upper_viol, sol.theta[i] - A * tt);
            lower_min = std::min(lower_min, sol.theta[i] / (A * tt));
        }
        c.require(upper_viol <= 1e-12,
                  fmt("A=%.2f: Theta <= A tilde (max violation %.2e)", A, upper_viol));
        c.require(lower_min >= 0.5,
                  fmt("A=%.2f: Theta >= A tilde / 2 (min h/A %.4f)", A, lower_min));
        if (A == 0.01) {
            double rel = std::abs(sol.ell / A / 8.0 - 1.0);
            c.require(rel <= 0.05,
                      fmt("ell/A at A=0.01 within 5%% of 8: %.6f (err %.2f%%)",
                          sol.ell / A, 100 * rel));
        }
    }
}

// ---- criterion: modulation asymptotics --------------------------------------

void crit_modulation_asymptotics(Check& c, const Options&) {
    for (double A : {0.05, -0.05}) {
        ModulationParams mp;
        mp.A = A;
        mp.R = RateFunction::log_t();
        mp.t0 = 1e3;
        mp.T = 1e9;
        auto traj = solve_lambda0(mp);
        double el = traj.local_exponent_lambda0(1e8);
        double es = traj.local_exponent_sigma(1e8);
        c.require(std::abs(el - 1.25 * A) <= 1e-3,
                  fmt("A=%+.2f: lambda0 exponent at 1e8 = %.6f (target %.6f)", A, el,
                      1.25 * A));
        c.require(std::abs(es - (1.0 - 2.5 * A)) <= 1e-3,
                  fmt("A=%+.2f: sigma exponent at 1e8 = %.6f (target %.6f)", A, es,
                      1.0 - 2.5 * A));
    }
    // rho growth for R = sqrt(log t)
    OmegaInterp om(default_ratio_sweep());
    double A = 0.05;
    double lr = log_rho(A, RateFunction::sqrt_log(), 1e9, om);
    double target = 45.0 * A / 16.0;
    double got = lr / std::log(std::log(1e9));
    c.require(std::abs(got / target - 1.0) <= 0.05,
              fmt("sqrtlog: log rho / log log t at 1e9 = %.6f (target %.6f)", got,
                  target));
    // rho boundedness for R = log t at |A| <= 0.1
    double r9 = log_rho(0.1, RateFunction::log_t(), 1e9, om);
    double r3 = log_rho(0.1, RateFunction::log_t(), 1e3, om);
    c.require(std::exp(r9 - r3) < 1.2,
              fmt("log kind: rho(1e9)/rho(1e3) = %.4f (< 1.2)", std::exp(r9 - r3)));
}

// ---- criterion: orthogonality fixed point -----------------------------------

void crit_orthogonality(Check& c, const Options&) {
    for (double A : {0.05, -0.05}) {
        ProfileParams pp;
        pp.A = A;
        auto profile = solve_theta(pp);
        ModulationParams mp;
        mp.A = A;
        mp.t0 = 1e3;
        mp.T = 1e7;
        auto traj = solve_lambda0(mp);
        auto info = solve_mu(mp, traj, profile);
        double worst_factor = 0;
        for (double f : info.contraction_factors) worst_factor = std::max(worst_factor, f);
        c.require(worst_factor < 1.0,
                  fmt("A=%+.2f: contraction factors < 1 (worst %.3f, %d iters)", A,
                      worst_factor, info.iterations));
        c.require(info.sc_norm_mu <= 1.0,
                  fmt("A=%+.2f: ||mu||_sc = %.3e (<= 1)", A, info.sc_norm_mu));
        double resid = orthogonality_residual(traj, profile);
        c.require(resid < 1e-8,
                  fmt("A=%+.2f: normalized int G Z residual = %.3e (< 1e-8)", A, resid));
    }
}

// ---- criterion: residual bounds ----------------------------------------------

void crit_residual_bounds(Check& c, const Options& opt) {
    for (double A : {0.05, -0.05}) {
        ProfileParams pp;
        pp.A = A;
        auto profile = solve_theta(pp);
        ModulationParams mp;
        mp.A = A;
        mp.t0 = 1e3;
        mp.T = 2e6;
        auto traj0 = solve_lambda0(mp);
        auto traj = traj0.rescaled(0.999 * traj0.separation_scale());
        solve_mu(mp, traj, profile);

        GlueContext ctx{&traj, &profile, {}, {}};
        PointwiseBoundOptions bo;
        bo.times = geomspace(1e3, 1e6, 16);
        auto reps = verify_pointwise_bounds(ctx, bo);
        maybe_write_reports(opt, fmt("residual_A%+.2f", A), reps);
        for (const auto& rep : reps) {
            bool gating = rep.name != "N_in";
            std::string line =
                fmt("A=%+.2f %s: fitted_C %.3e uniformity %.3f%s", A, rep.name.c_str(),
                    rep.fitted_c, rep.uniformity,
                    rep.support_violation ? " SUPPORT-VIOLATION" : "");
            if (gating)
                c.require(rep.pass, line);
            else
                c.note(line + (rep.pass ? " (ok)" : " (informational fail)"));
        }
    }
}

// ---- criterion: kernel lemmas --------------------------------------------------

void crit_kernel_lemmas(Check& c, const Options& opt) {
    const double A = 0.05, a1 = 0.5;
    RateFunction R = RateFunction::log_t();

    for (double t0 : {1e3, 1e4}) {
        KernelLemmaOptions ko;
        ko.times = geomspace(4.0 * t0, 1e4 * t0, 9);

        // N_out first-term source: v = t^-2 R^-a1, b = 0, l2 = 2 sqrt t
        SourceSpec s1;
        s1.v = [R, a1](double t) { return std::pow(t, -2.0) * std::pow(R.value(t), -a1); };
        s1.b = 0;
        s1.l1 = [](double) { return 0.0; };
        s1.l2 = [](double t) { return 2.0 * std::sqrt(t); };
        s1.t0 = t0;

        // Etilde source: v = t^{-1+5A/2}, b = 4, l1 = C^-1 t^{5A/4} R, l2 = 2 sqrt t
        SourceSpec s2;
        s2.v = [A](double t) { return std::pow(t, -1.0 + 2.5 * A); };
        s2.b = 4;
        s2.l1 = [R, A](double t) { return 0.25 * std::pow(t, 1.25 * A) * R.value(t); };
        s2.l2 = [](double t) { return 2.0 * std::sqrt(t); };
        s2.t0 = t0;

        // far-field N source: v = A^2 R^-a1, b = 4 on |x| >= sqrt t
        SourceSpec s3;
        s3.v = [R, A, a1](double t) { return sq(A) * std::pow(R.value(t), -a1); };
        s3.b = 4;
        s3.l1 = [](double t) { return std::sqrt(t); };
        s3.l2 = [](double) { return std::numeric_limits<double>::infinity(); };
        s3.t0 = t0;

        std::vector<BoundReport> reps;
        reps.push_back(verify_kernel_lemma_compact(s1, ko, fmt("compact_b0_t0_%g", t0)));
        reps.push_back(verify_kernel_lemma_compact(s2, ko, fmt("compact_b4_t0_%g", t0)));
        reps.push_back(
            verify_kernel_lemma_selfsimilar(s3, ko, fmt("selfsim_b4_t0_%g", t0)));
        maybe_write_reports(opt, "kernel", reps);
        for (const auto& rep : reps)
            c.require(rep.pass, fmt("%s: fitted_C %.3e uniformity %.3f",
                                    rep.name.c_str(), rep.fitted_c, rep.uniformity));
    }

    // kernel mass: T_out[1] = t - t0
    SourceSpec ones;
    ones.v = [](double) { return 1.0; };
    ones.b = 0;
    ones.l1 = [](double) { return 0.0; };
    ones.l2 = [](double) { return std::numeric_limits<double>::infinity(); };
    ones.t0 = 1e3;
    for (double x : {0.0, std::sqrt(3e3), 5.0 * std::sqrt(3e3)}) {
        double got = duhamel(ones, x, 3e3, 1e-8);
        double rel = std::abs(got / 2e3 - 1.0);
        c.require(rel <= 1e-6, fmt("kernel mass at x=%.1f: rel err %.2e", x, rel));
    }
}

// ---- criterion: sign structure --------------------------------------------------

void crit_sign_structure(Check& c, const Options&) {
    for (double A : {0.05, -0.05}) {
        ProfileParams pp;
        pp.A = A;
        auto profile = solve_theta(pp);
        ModulationParams mp;
        mp.A = A;
        mp.t0 = 1e3;
        mp.T = 1e5;
        auto traj0 = solve_lambda0(mp);
        auto traj = traj0.rescaled(0.999 * traj0.separation_scale());
        solve_mu(mp, traj, profile);

        const double t = 1e4;
        // worst-case members of the balls push u down on the inner region
        GlueContext down{&traj, &profile, ball_member_phi(traj, -0.125),
                         ball_member_psi(traj, -1.0)};
        auto scan = sign_scan(down, t);
        c.require(scan.inner_positive,
                  fmt("A=%+.2f: u > 0 on |x| < sqrt(lambda) t^(1/4)  (min %.3e)", A,
                      scan.inner_min));
        c.require(scan.origin_positive, fmt("A=%+.2f: u(0) > 0", A));

        if (A < 0) {
            GlueContext up{&traj, &profile, {}, ball_member_psi(traj, 1.0)};
            auto scan2 = sign_scan(up, t);
            c.require(scan2.outer_negative,
                      fmt("A=%+.2f: u < 0 on [2,10] sqrt(t)", A));
            c.require(scan2.value_at_3sqrt_t < 0,
                      fmt("A=%+.2f: u(3 sqrt t) = %.3e < 0", A, scan2.value_at_3sqrt_t));
        }
    }
}

// ---- criterion: pde stepper gates ------------------------------------------------

void crit_pde_theta(Check& c, const Options&) {
    ProfileParams pp;
    pp.A = 0.05;
    auto profile = solve_theta(pp);

    SimConfig cfg;
    cfg.t0 = 10.0;
    cfg.t_end = 500.0;
    cfg.r_max = 20.0 * std::sqrt(cfg.t_end);
    cfg.n_cells = 2000;
    cfg.dr_core = 0.08;
    cfg.ell = profile.ell;
    auto trace = simulate(cfg, [&](double r) { return profile.space_time(r, cfg.t0); });
    c.require(!trace.blew_up && !trace.nan_abort, "theta run completes");

    double worst = 0;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        double t = trace.times[i];
        if (t < 50.0) continue;
        worst = std::max(worst,
                         std::abs(trace.sup_norm[i] * (t + 1.0) / pp.A - 1.0));
    }
    c.require(worst <= 0.1,
              fmt("sup * (t+1)/A within 10%% over [50,500]: worst %.3f%%", 100 * worst));

    auto fit = fit_exponent(trace, 50.0, 500.0);
    c.require(std::abs(fit.exponent + 1.0) <= 0.02,
              fmt("self-similar exponent %.4f (target -1 +- 0.02)", fit.exponent));
}

void crit_pde_glued(Check& c, const Options&) {
    const double A = 0.05, t0 = 1e3;
    ProfileParams pp;
    pp.A = A;
    auto profile = solve_theta(pp);
    ModulationParams mp;
    mp.A = A;
    mp.t0 = t0;
    mp.T = 1e4;
    auto traj0 = solve_lambda0(mp);
    auto traj = traj0.rescaled(0.999 * traj0.separation_scale());
    solve_mu(mp, traj, profile);
    GlueContext ctx{&traj, &profile, {}, {}};

    SimConfig cfg;
    cfg.t0 = t0;
    cfg.t_end = 2.0 * t0;
    cfg.r_max = 20.0 * std::sqrt(cfg.t_end);
    cfg.n_cells = 2000;
    cfg.dr_core = traj.lambda_at(t0) / 30.0;
    cfg.ell = profile.ell;
    auto initial = ansatz_evaluator(ctx, t0);
    auto trace = simulate(cfg, initial);

    double breach_t = 0, worst = 0;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        double t = trace.times[i];
        double predicted = 1.0 / sq(traj.lambda_at(t));
        double dev = std::abs(trace.sup_norm[i] / predicted - 1.0);
        worst = std::max(worst, dev);
        if (dev > 0.1 && breach_t == 0) breach_t = t;
    }
    if (trace.blew_up)
        c.note(fmt("finite-time blow-up abort at t = %.2f (flagged)",
                   trace.last_valid_time));
    c.require(!trace.blew_up && !trace.nan_abort,
              "glued run reaches the 2x horizon without abort");
    c.require(worst <= 0.1,
              breach_t > 0
                  ? fmt("sup tracks lambda^-2 within 10%%: first breach at t = %.2f "
                        "(t0 = %g); the rescaled-bubble steady state has an "
                        "exponentially unstable radial mode (rate gamma0 ~ 0.2817 in "
                        "inner time), so departure by t0 + O(10) is structural",
                        breach_t, t0)
                  : fmt("sup tracks lambda^-2 within 10%% (worst %.2f%%)", 100 * worst));
}

using CritFn = std::function<void(Check&, const Options&)>;

struct CriterionDef {
    const char* name;
    double budget_seconds;
    bool exploratory;
    CritFn fn;
};

const std::vector<CriterionDef>& table() {
    static const std::vector<CriterionDef> defs = {
        {"exact_constants", 1.0, false, crit_exact_constants},
        {"ratio_expansion", 10.0, false, crit_ratio_expansion},
        {"profile_bounds", 5.0, false, crit_profile_bounds},
        {"modulation_asymptotics", 30.0, false, crit_modulation_asymptotics},
        {"orthogonality_fixed_point", 60.0, false, crit_orthogonality},
        {"residual_bounds", 300.0, false, crit_residual_bounds},
        {"kernel_lemmas", 300.0, false, crit_kernel_lemmas},
        {"sign_structure", 10.0, false, crit_sign_structure},
        {"pde_stepper_theta", 600.0, false, crit_pde_theta},
        {"pde_glued_tracking", 600.0, true, crit_pde_glued},
    };
    return defs;
}

} // namespace

std::vector<std::string> criterion_names() {
    std::vector<std::string> out;
    for (const auto& d : table()) out.push_back(d.name);
    return out;
}

std::vector<CriterionResult> run(const Options& opt) {
    std::vector<CriterionResult> results;
    for (const auto& d : table()) {
        if (!opt.only.empty() &&
            std::find(opt.only.begin(), opt.only.end(), d.name) == opt.only.end())
            continue;
        CriterionResult res;
        res.name = d.name;
        res.exploratory = d.exploratory;
        Check c;
        auto start = std::chrono::steady_clock::now();
        try {
            d.fn(c, opt);
        } catch (const std::exception& e) {
            c.require(false, std::string("exception: ") + e.what());
        }
        res.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        if (res.seconds > d.budget_seconds)
            c.require(false, fmt("runtime %.1fs exceeds budget %.0fs", res.seconds,
                                 d.budget_seconds));
        res.pass = c.ok;
        res.details = c.ss.str();
        results.push_back(std::move(res));
    }
    return results;
}

} // namespace glueheat::acceptance
