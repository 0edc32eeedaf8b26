#include "glueheat/glue.hpp"

#include <algorithm>
#include <cmath>

#include "glueheat/bubble.hpp"
#include "glueheat/errors.hpp"
#include "glueheat/util.hpp"

namespace glueheat {

namespace {

// bridge B(s) = 1/(1+e^{g(s)}), g = 1/s - 1/(1-s); eta(x) = 1 - B(x-1)
struct bridge_eval {
    double B, Bp, Bpp;
};

bridge_eval bridge(double s) {
    double g = 1.0 / s - 1.0 / (1.0 - s);
    double E = std::exp(-std::abs(g));
    double denom = sq(1.0 + E);
    double B = g >= 0 ? E / (1.0 + E) : 1.0 / (1.0 + E);
    double BB = E / denom; // B(1-B), stable both ways
    double gp = -1.0 / sq(s) - 1.0 / sq(1.0 - s);
    double gpp = 2.0 / (s * s * s) - 2.0 / ((1 - s) * (1 - s) * (1 - s));
    bridge_eval out;
    out.B = B;
    out.Bp = -gp * BB;
    out.Bpp = BB * (-gpp + gp * gp * (1.0 - 2.0 * B));
    return out;
}

} // namespace

double eta(double x) {
    if (x <= 1.0) return 1.0;
    if (x >= 2.0) return 0.0;
    return 1.0 - bridge(x - 1.0).B;
}

double eta_prime(double x) {
    if (x <= 1.0 || x >= 2.0) return 0.0;
    return -bridge(x - 1.0).Bp;
}

double eta_second(double x) {
    if (x <= 1.0 || x >= 2.0) return 0.0;
    return -bridge(x - 1.0).Bpp;
}

double RadialField::max_abs() const {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double WeightSpec::w_in(double y_norm, double t) const {
    return std::pow(traj->R.value(t), 7.0 - traj->a) / traj->sigma_at(t) *
           std::pow(jbracket(y_norm), -7.0);
}

double WeightSpec::w_out(double x_norm, double t) const {
    double base = std::pow(traj->R.value(t), -traj->a1) / t;
    if (x_norm <= std::sqrt(t)) return base;
    return base * t / sq(x_norm);
}

FieldFamily ball_member_phi(const ModulationTrajectory& traj, double s) {
    FieldFamily f;
    const ModulationTrajectory* tr = &traj;
    f.value = [tr, s](double y, double t) {
        return s * std::pow(tr->R.value(t), 7.0 - tr->a) / tr->sigma_at(t) *
               std::pow(jbracket(y), -7.0);
    };
    f.grad = [tr, s](double y, double t) {
        return s * std::pow(tr->R.value(t), 7.0 - tr->a) / tr->sigma_at(t) *
               (-7.0) * y * std::pow(jbracket(y), -9.0);
    };
    return f;
}

FieldFamily ball_member_psi(const ModulationTrajectory& traj, double s) {
    FieldFamily f;
    const ModulationTrajectory* tr = &traj;
    double A = traj.A;
    f.value = [tr, s, A](double x, double t) {
        return s * std::abs(A) * std::pow(tr->R.value(t), -tr->a1) / t /
               (1.0 + x * x / t);
    };
    f.grad = [tr, s, A](double x, double t) {
        return -s * std::abs(A) * std::pow(tr->R.value(t), -tr->a1) / t *
               (2.0 * x / t) / sq(1.0 + x * x / t);
    };
    return f;
}

std::vector<double> union_grid(double lambda, double lambdaR, double sqrt_t,
                               std::size_t per_scale) {
    std::vector<double> g;
    g.reserve(3 * per_scale + 130);
    const double hi_cap = 20.0 * sqrt_t;
    for (double sc : {lambda, lambdaR, sqrt_t}) {
        double lo = sc / 30.0, hi = std::min(30.0 * sc, hi_cap);
        for (double r : geomspace(lo, hi, per_scale)) g.push_back(r);
    }
    for (double r : geomspace(lambda * 1e-2, hi_cap, 120)) g.push_back(r);
    g.push_back(0.0);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end(),
                        [](double a, double b) { return b - a < 1e-14 * (1.0 + b); }),
            g.end());
    return g;
}

namespace {

struct Pieces {
    double a = 0;      // lambda^-2 U(y) eta(ytilde)
    double th = 0;     // theta_A(x,t)
    double phi_t = 0;  // lambda^-2 phi eta_R
    double psi_v = 0;  // psi(x,t)
};

Pieces eval_pieces(const GlueContext& ctx, double t, double x, double lam) {
    Pieces p;
    double y = x / lam, ytil = x / std::sqrt(t);
    p.a = bubble_u(y) * eta(ytil) / sq(lam);
    p.th = ctx.profile->space_time(x, t);
    if (ctx.phi) {
        double etar = eta(y / ctx.Rcut(t));
        if (etar > 0) p.phi_t = ctx.phi.value(y, t) * etar / sq(lam);
    }
    if (ctx.psi) p.psi_v = ctx.psi.value(x, t);
    return p;
}

void check_scales(const GlueContext& ctx, double t) {
    double lam = ctx.lambda(t);
    if (18.0 * lam * ctx.Rcut(t) > std::sqrt(t))
        throw scale_collapse("scale separation violated: 18 lambda R > sqrt(t)");
}

// exact integral_0^1 |w + alpha q| d alpha
double abs_mean_value(double w, double q) {
    if (q == 0.0) return std::abs(w);
    double end = w + q;
    if (w * end >= 0.0) return std::abs(w + 0.5 * q);
    double astar = -w / q;
    return 0.5 * (std::abs(w) * astar + std::abs(end) * (1.0 - astar));
}

} // namespace

RadialField assemble_ansatz(const GlueContext& ctx, double t) {
    check_scales(ctx, t);
    double lam = ctx.lambda(t);
    RadialField f;
    f.t = t;
    f.r = union_grid(lam, lam * ctx.Rcut(t), std::sqrt(t));
    f.v.resize(f.r.size());
    for (std::size_t i = 0; i < f.r.size(); ++i) {
        Pieces p = eval_pieces(ctx, t, f.r[i], lam);
        f.v[i] = p.a + p.th + p.phi_t + p.psi_v;
    }
    return f;
}

std::function<double(double)> ansatz_evaluator(const GlueContext& ctx, double t) {
    check_scales(ctx, t);
    double lam = ctx.lambda(t);
    const GlueContext c = ctx;
    return [c, t, lam](double x) {
        Pieces p = eval_pieces(c, t, x, lam);
        return p.a + p.th + p.phi_t + p.psi_v;
    };
}

ErrorTerms error_terms(const GlueContext& ctx, double t) {
    check_scales(ctx, t);
    if (ctx.phi && !ctx.phi.grad)
        throw domain_error("error_terms: phi gradient required");
    const double lam = ctx.lambda(t);
    const double lamdot = ctx.lambda_dot(t);
    const double R = ctx.Rcut(t);
    const double Rdot = ctx.traj->R.derivative(t);
    const double st = std::sqrt(t);

    ErrorTerms et;
    for (RadialField* f : {&et.N, &et.E, &et.Etilde, &et.H}) {
        f->t = t;
        f->r = union_grid(lam, lam * R, st);
        f->v.assign(f->r.size(), 0.0);
    }

    for (std::size_t i = 0; i < et.N.r.size(); ++i) {
        const double x = et.N.r[i];
        const double y = x / lam, ytil = x / st, s = y / R;
        const double U = bubble_u(y), Up = bubble_u_prime(y);
        const double e = eta(ytil), ep = eta_prime(ytil), epp = eta_second(ytil);
        const double er = eta(s), erp = eta_prime(s), erpp = eta_second(s);

        Pieces p = eval_pieces(ctx, t, x, lam);
        const double q = p.a + p.phi_t + p.psi_v;
        const double u = q + p.th;

        // N = |u|u - a^2 - |th|th - 2a(th + psi + lambda^-2 phi eta_R)
        et.N.v[i] = std::abs(u) * u - sq(p.a) - std::abs(p.th) * p.th -
                    2.0 * p.a * (p.th + p.psi_v + p.phi_t);

        // E: cutoff-commutator terms of the inner profile plus the
        // U psi (1 - eta_R) coupling
        double E = 0;
        if (ctx.phi) {
            double phv = ctx.phi.value(y, t), phg = ctx.phi.grad(y, t);
            double lap_eta = erpp + (s > 0 ? 5.0 * erp / s : 0.0);
            E += phv * lap_eta / (sq(sq(lam)) * sq(R));
            E += 2.0 * phg * erp / (sq(sq(lam)) * R);
            E += phv * erp * s * (lamdot / lam + Rdot / R) / sq(lam);
            E += lamdot * (2.0 * phv + y * phg) * er / (lam * sq(lam));
        }
        if (ctx.psi) E += 2.0 * U * p.psi_v * e * (1.0 - er) / sq(lam);
        et.E.v[i] = E;

        // Etilde: modulation and cutoff commutators of the leading terms
        double Et = lamdot * kernel_z(y) * e * (1.0 - er) / (lam * sq(lam));
        Et += sq(U) * (e * e - e) / sq(sq(lam));
        Et += 2.0 * U * p.th * e * (1.0 - er) / sq(lam);
        Et += 0.5 / t * U * ytil * ep / sq(lam);
        Et += 2.0 * Up * ep / (lam * sq(lam) * st);
        Et += U * (epp + (ytil > 0 ? 5.0 * ep / ytil : 0.0)) / (sq(lam) * t);
        et.Etilde.v[i] = Et;

        et.H.v[i] = et.N.v[i] + E + Et;
    }
    return et;
}

RadialField n_mean_value(const GlueContext& ctx, double t) {
    check_scales(ctx, t);
    const double lam = ctx.lambda(t);
    RadialField f;
    f.t = t;
    f.r = union_grid(lam, lam * ctx.Rcut(t), std::sqrt(t));
    f.v.resize(f.r.size());
    for (std::size_t i = 0; i < f.r.size(); ++i) {
        Pieces p = eval_pieces(ctx, t, f.r[i], lam);
        double q = p.a + p.phi_t + p.psi_v;
        f.v[i] = 2.0 * q * abs_mean_value(p.th, q) - sq(p.a) -
                 2.0 * p.a * (p.th + p.psi_v + p.phi_t);
    }
    return f;
}

RadialField inner_inhomogeneity(const GlueContext& ctx, double t) {
    const double lam = ctx.lambda(t);
    const double lamdot = ctx.lambda_dot(t);
    RadialField f;
    f.t = t;
    f.r = geomspace(1e-3, 4.0 * ctx.Rcut(t), 400);
    f.r.insert(f.r.begin(), 0.0);
    f.v.resize(f.r.size());
    for (std::size_t i = 0; i < f.r.size(); ++i) {
        double y = f.r[i];
        double v = lam * lamdot * kernel_z(y) +
                   2.0 * sq(lam) * bubble_u(y) * ctx.profile->space_time(lam * y, t);
        if (ctx.psi) v += 2.0 * sq(lam) * bubble_u(y) * ctx.psi.value(lam * y, t);
        f.v[i] = v;
    }
    return f;
}

double inner_source_weighted_norm(const GlueContext& ctx,
                                  const std::vector<double>& times) {
    double sup = 0;
    for (double t : times) {
        RadialField g = inner_inhomogeneity(ctx, t);
        double sig = ctx.traj->sigma_at(t);
        for (std::size_t i = 0; i < g.r.size(); ++i) {
            if (g.r[i] > 2.0 * ctx.Rcut(t)) break; // *-norm is over B_{2R}
            sup = std::max(sup, sig * std::pow(jbracket(g.r[i]), 2.0 + ctx.traj->a) *
                                    std::abs(g.v[i]));
        }
    }
    return sup;
}

std::vector<BoundReport> verify_pointwise_bounds(const GlueContext& ctx,
                                                 const PointwiseBoundOptions& opt) {
    if (opt.times.size() < 2)
        throw domain_error("verify_pointwise_bounds: need a time sweep");
    const double A = ctx.traj->A;
    const double C = opt.support_c;

    std::vector<BoundReport> reps(6);
    reps[0].name = "N_out";
    reps[1].name = "N_in";
    reps[2].name = "N_mid";
    reps[3].name = "E";
    reps[4].name = "Etilde";
    reps[5].name = "H_combined";

    for (double t : opt.times) {
        ErrorTerms et = error_terms(ctx, t);
        const double lam = ctx.lambda(t);
        const double R = ctx.Rcut(t);
        const double st = std::sqrt(t);
        const double r_in = std::sqrt(lam) * std::pow(t, 0.25);
        const double r_mid = r_in * std::sqrt(R);
        const double tp = std::pow(t, 1.25 * A); // t^{5A/4}

        for (std::size_t i = 0; i < et.N.r.size(); ++i) {
            const double x = et.N.r[i];
            const double Nv = std::abs(et.N.v[i]);
            const double Ev = std::abs(et.E.v[i]);
            const double Etv = std::abs(et.Etilde.v[i]);
            const double Hv = std::abs(et.H.v[i]);

            // N_out vs A^2 t^-2 R^-a1 1_{x<=2 sqrt t} + A^2 R^-a1 x^-4 1_{x>=sqrt t}
            double rhs = 0;
            if (x <= 2.0 * st) rhs += sq(A) / sq(t) * std::pow(R, -ctx.traj->a1);
            if (x >= st) rhs += sq(A) * std::pow(R, -ctx.traj->a1) / sq(sq(x));
            reps[0].samples.push_back({t, x, x >= r_mid ? Nv : 0.0, rhs});

            // N_in vs A^2 t^{-2+eps} 1_{x < 2 t^{5A/8+1/4}}
            rhs = x < 2.0 * std::sqrt(tp) * std::pow(t, 0.25)
                      ? sq(A) * std::pow(t, -2.0 + opt.eps)
                      : 0.0;
            reps[1].samples.push_back({t, x, x < r_in ? Nv : 0.0, rhs});

            // N_mid vs t^-2 on the mid band
            bool mid = x >= r_in && x < r_mid;
            reps[2].samples.push_back({t, x, mid ? Nv : 0.0, mid ? 1.0 / sq(t) : 0.0});

            // E vs t^{-1-5A/2} R^{-2-a} 1_{x<=C tp R}
            //      + |A| t^{-1+5A/2} R^{-a1} x^-4 1_{C^-1 tp R <= x <= 2 sqrt t}
            rhs = 0;
            if (x <= C * tp * R)
                rhs += std::pow(t, -1.0 - 2.5 * A) * std::pow(R, -2.0 - ctx.traj->a);
            if (x >= tp * R / C && x <= 2.0 * st)
                rhs += std::abs(A) * std::pow(t, -1.0 + 2.5 * A) *
                       std::pow(R, -ctx.traj->a1) / sq(sq(x));
            reps[3].samples.push_back({t, x, Ev, rhs});

            // Etilde vs t^{-1+5A/2} x^-4 on [C^-1 tp R, 2 sqrt t]
            rhs = (x >= tp * R / C && x <= 2.0 * st)
                      ? std::pow(t, -1.0 + 2.5 * A) / sq(sq(x))
                      : 0.0;
            reps[4].samples.push_back({t, x, Etv, rhs});

            // combined H vs t^{-1-5A/2} R^{-2-a} everywhere
            reps[5].samples.push_back(
                {t, x, Hv, std::pow(t, -1.0 - 2.5 * A) * std::pow(R, -2.0 - ctx.traj->a)});
        }
    }
    for (auto& r : reps) r.finalize(opt.uniformity_limit);
    return reps;
}

SignScanResult sign_scan(const GlueContext& ctx, double t) {
    SignScanResult res;
    const double lam = ctx.lambda(t);
    const double st = std::sqrt(t);
    const double r_in = std::sqrt(lam) * std::pow(t, 0.25);

    RadialField u = assemble_ansatz(ctx, t);
    res.inner_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u.r.size(); ++i)
        if (u.r[i] < r_in) res.inner_min = std::min(res.inner_min, u.v[i]);
    res.inner_positive = res.inner_min > 0;
    res.origin_positive = u.v.front() > 0;

    if (ctx.traj->A < 0) {
        bool neg = true;
        for (double x : geomspace(2.0 * st, 10.0 * st, 64)) {
            double val = ctx.profile->space_time(x, t) +
                         (ctx.psi ? ctx.psi.value(x, t) : 0.0);
            double y = x / lam;
            val += bubble_u(y) * eta(x / st) / sq(lam);
            if (ctx.phi) {
                double er = eta(y / ctx.Rcut(t));
                if (er > 0) val += ctx.phi.value(y, t) * er / sq(lam);
            }
            if (val >= 0) neg = false;
        }
        res.outer_negative = neg;
        double x3 = 3.0 * st;
        res.value_at_3sqrt_t = ctx.profile->space_time(x3, t) +
                               (ctx.psi ? ctx.psi.value(x3, t) : 0.0);
    }
    return res;
}

} // namespace glueheat
