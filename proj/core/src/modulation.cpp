#include "glueheat/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <ostream>

#include "glueheat/errors.hpp"
#include "glueheat/quadrature.hpp"
#include "glueheat/util.hpp"

namespace glueheat {

void ModulationParams::validate() const {
    if (!(std::abs(A) <= 0.1)) throw domain_error("ModulationParams: need |A| <= 0.1");
    if (!(t0 >= 1e3)) throw domain_error("ModulationParams: need t0 >= 1e3");
    if (!(T > t0)) throw domain_error("ModulationParams: need T > t0");
    if (!(0 < a2 && a2 < a1 && a1 < a && a < 1))
        throw domain_error("ModulationParams: need 0 < a2 < a1 < a < 1");
    if (points_per_decade < 8) throw domain_error("ModulationParams: grid too coarse");
}

OmegaInterp::OmegaInterp(const std::vector<RatioExpansion>& sweep) {
    logR_.reserve(sweep.size());
    omega_.reserve(sweep.size());
    for (const auto& e : sweep) {
        logR_.push_back(std::log(e.R));
        omega_.push_back(e.omega);
    }
}

double OmegaInterp::operator()(double R) const {
    if (logR_.empty()) return ortho_ratio_exact(R) - 1.25 - 45.0 / (16.0 * R * R);
    double x = std::log(R);
    if (x <= logR_.front()) return omega_.front();
    if (x >= logR_.back()) return omega_.back();
    auto it = std::upper_bound(logR_.begin(), logR_.end(), x);
    std::size_t j = static_cast<std::size_t>(it - logR_.begin()) - 1;
    // cubic through 4 neighbours (Lagrange); omega is smooth in log R
    std::size_t i0 = j == 0 ? 0 : j - 1;
    i0 = std::min(i0, logR_.size() - 4);
    double num = 0;
    for (std::size_t k = i0; k < i0 + 4; ++k) {
        double w = 1;
        for (std::size_t m = i0; m < i0 + 4; ++m)
            if (m != k) w *= (x - logR_[m]) / (logR_[k] - logR_[m]);
        num += w * omega_[k];
    }
    return num;
}

const std::vector<RatioExpansion>& default_ratio_sweep() {
    static std::vector<RatioExpansion> sweep = [] {
        return ratio_sweep(8.0, 1024.0, 16, 1e-11);
    }();
    return sweep;
}

double log_rho(double A, const RateFunction& R, double t, const OmegaInterp& omega) {
    if (!(t >= 1.0)) throw domain_error("log_rho: t must be >= 1");
    if (A == 0.0) return 0.0;
    auto q1 = integrate([&](double s) { return 1.0 / (s * sq(R.value(s))); }, 1.0, t,
                        1e-11, "rho R^-2 integral");
    auto q2 = integrate([&](double s) { return omega(R.value(s)) / s; }, 1.0, t,
                        1e-10, "rho omega integral");
    return 45.0 * A / 16.0 * q1 + A * q2;
}

namespace {

double hermite_val(double x, double x0, double x1, double f0, double f1,
                   double d0, double d1) {
    double h = x1 - x0, u = (x - x0) / h;
    double u2 = u * u, u3 = u2 * u;
    return f0 * (2 * u3 - 3 * u2 + 1) + f1 * (-2 * u3 + 3 * u2) +
           h * (d0 * (u3 - 2 * u2 + u) + d1 * (u3 - u2));
}

std::size_t bracket(const std::vector<double>& xs, double x) {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t j = static_cast<std::size_t>(it - xs.begin());
    return std::clamp<std::size_t>(j, 1, xs.size() - 1) - 1;
}

} // namespace

double ModulationTrajectory::beta(double tt) const {
    return ortho_ratio_exact(R.value(tt)) * A / (tt + 1.0);
}

double ModulationTrajectory::column_at(const std::vector<double>& col, double tt) const {
    // pchip-like local cubic in log t is overkill for the smooth columns;
    // Hermite with finite-difference slopes keeps this dependency free
    if (tt <= t.front()) return col.front();
    if (tt >= t.back()) return col.back();
    std::size_t j = bracket(t, tt);
    double x0 = std::log(t[j]), x1 = std::log(t[j + 1]);
    auto slope = [&](std::size_t k) {
        std::size_t km = k == 0 ? 0 : k - 1;
        std::size_t kp = k + 1 >= t.size() ? t.size() - 1 : k + 1;
        return (col[kp] - col[km]) / (std::log(t[kp]) - std::log(t[km]));
    };
    return hermite_val(std::log(tt), x0, x1, col[j], col[j + 1], slope(j),
                       slope(j + 1));
}

double ModulationTrajectory::lambda0_at(double tt) const {
    // exact derivative of log lambda0 is available: d log/d log t = t beta
    if (tt <= t.front()) return lambda0.front();
    if (tt >= t.back()) return lambda0.back();
    std::size_t j = bracket(t, tt);
    double v = hermite_val(std::log(tt), std::log(t[j]), std::log(t[j + 1]),
                           std::log(lambda0[j] / scale), std::log(lambda0[j + 1] / scale),
                           t[j] * beta(t[j]), t[j + 1] * beta(t[j + 1]));
    return scale * std::exp(v);
}

double ModulationTrajectory::lambda_at(double tt) const {
    return lambda0_at(tt) + mu_at(tt);
}

double ModulationTrajectory::mu_at(double tt) const { return column_at(mu, tt); }

double ModulationTrajectory::lambda_dot_at(double tt) const {
    return column_at(lambda_dot, tt);
}

double ModulationTrajectory::sigma_at(double tt) const {
    if (tt <= t.front()) return sigma.front();
    if (tt >= t.back()) return sigma.back();
    std::size_t j = bracket(t, tt);
    auto dlog = [&](std::size_t k) { return t[k] / (sq(lambda[k]) * sigma[k]); };
    double v = hermite_val(std::log(tt), std::log(t[j]), std::log(t[j + 1]),
                           std::log(sigma[j]), std::log(sigma[j + 1]), dlog(j),
                           dlog(j + 1));
    return std::exp(v);
}

double ModulationTrajectory::rho_at(double tt) const { return column_at(rho, tt); }

double ModulationTrajectory::sc_norm(const std::vector<double>& f) const {
    double m = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
        m = std::max(m, std::pow(R.value(t[i]), a2) * std::abs(f[i]) /
                            (lambda0[i]));
    return m;
}

ModulationTrajectory ModulationTrajectory::rescaled(double s) const {
    if (!(s > 0)) throw domain_error("rescaled: scale must be positive");
    ModulationTrajectory out = *this;
    out.scale = scale * s;
    for (auto& v : out.lambda0) v *= s;
    for (auto& v : out.mu) v *= s;
    for (auto& v : out.lambda) v *= s;
    for (auto& v : out.lambda_dot) v *= s;
    for (auto& v : out.sigma) v /= s * s;
    return out;
}

double ModulationTrajectory::separation_scale() const {
    return std::sqrt(t0) / (18.0 * R.value(t0) * lambda_at(t0));
}

double ModulationTrajectory::separation_margin() const {
    double m = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
        m = std::max(m, 18.0 * lambda[i] * R.value(t[i]) / std::sqrt(t[i]));
    return m;
}

double ModulationTrajectory::local_exponent_lambda0(double t_star,
                                                    double half_decades) const {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] >= t_star * std::pow(10.0, -half_decades) &&
            t[i] <= t_star * std::pow(10.0, half_decades)) {
            xs.push_back(std::log(t[i]));
            ys.push_back(std::log(lambda0[i]));
        }
    if (xs.size() < 3) throw domain_error("local_exponent: window too narrow");
    return fit_line(xs, ys).slope;
}

double ModulationTrajectory::local_exponent_sigma(double t_star,
                                                  double half_decades) const {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] >= t_star * std::pow(10.0, -half_decades) &&
            t[i] <= t_star * std::pow(10.0, half_decades)) {
            xs.push_back(std::log(t[i]));
            ys.push_back(std::log(sigma[i]));
        }
    if (xs.size() < 3) throw domain_error("local_exponent: window too narrow");
    return fit_line(xs, ys).slope;
}

void ModulationTrajectory::write_csv(std::ostream& os,
                                     const std::vector<double>& ortho_resid) const {
    char buf[256];
    os << "t,lambda0,mu,lambda,sigma,rho,beta_t";
    if (!ortho_resid.empty()) os << ",ortho_residual";
    os << "\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                      t[i], lambda0[i], mu[i], lambda[i], sigma[i], rho[i], beta_t[i]);
        os << buf;
        if (!ortho_resid.empty()) {
            std::snprintf(buf, sizeof buf, ",%.17g", ortho_resid[i]);
            os << buf;
        }
        os << "\n";
    }
}

ModulationTrajectory solve_lambda0(const ModulationParams& params) {
    params.validate();
    ModulationTrajectory traj;
    traj.A = params.A;
    traj.a = params.a;
    traj.a1 = params.a1;
    traj.a2 = params.a2;
    traj.t0 = params.t0;
    traj.T = params.T;
    traj.R = params.R;

    std::size_t n = static_cast<std::size_t>(std::ceil(
                        std::log10(params.T / params.t0) * params.points_per_decade)) + 1;
    traj.t = geomspace(params.t0, params.T, std::max<std::size_t>(n, 2));
    const std::size_t m = traj.t.size();

    // log lambda0 by per-interval quadrature of the exact coefficient
    std::vector<double> loglam(m, 0.0);
    auto coeff = [&](double s) {
        return params.A * ortho_ratio_exact(params.R.value(s)) / (s + 1.0);
    };
    for (std::size_t i = 1; i < m; ++i)
        loglam[i] = loglam[i - 1] +
                    integrate(coeff, traj.t[i - 1], traj.t[i], 1e-13, "lambda0 ODE");
    traj.lambda0.resize(m);
    for (std::size_t i = 0; i < m; ++i) traj.lambda0[i] = std::exp(loglam[i]);
    traj.mu.assign(m, 0.0);
    traj.lambda = traj.lambda0;

    traj.lambda_dot.resize(m);
    traj.beta_t.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        double b = traj.beta(traj.t[i]);
        traj.lambda_dot[i] = b * traj.lambda0[i];
        traj.beta_t[i] = b * traj.t[i];
    }

    // sigma = int_t0^t lambda^-2 + t0 / lambda(t0)^2, via a Hermite model
    // of log lambda0 between grid nodes (derivative is exact there)
    traj.sigma.resize(m);
    traj.sigma[0] = params.t0;
    for (std::size_t i = 1; i < m; ++i) {
        double x0 = std::log(traj.t[i - 1]), x1 = std::log(traj.t[i]);
        double d0 = traj.t[i - 1] * traj.beta(traj.t[i - 1]);
        double d1 = traj.t[i] * traj.beta(traj.t[i]);
        auto integrand = [&](double s) {
            double ll = hermite_val(std::log(s), x0, x1, loglam[i - 1], loglam[i], d0, d1);
            return std::exp(-2.0 * ll);
        };
        traj.sigma[i] = traj.sigma[i - 1] +
                        integrate(integrand, traj.t[i - 1], traj.t[i], 1e-12, "sigma");
    }

    // rho column (cumulative from t = 1)
    OmegaInterp om(default_ratio_sweep());
    traj.rho.resize(m);
    if (params.A == 0.0) {
        std::fill(traj.rho.begin(), traj.rho.end(), 1.0);
    } else {
        double acc = log_rho(params.A, params.R, traj.t[0], om);
        traj.rho[0] = std::exp(acc);
        for (std::size_t i = 1; i < m; ++i) {
            acc += integrate(
                [&](double s) {
                    double Rv = params.R.value(s);
                    return params.A * (45.0 / (16.0 * sq(Rv)) + om(Rv)) / s;
                },
                traj.t[i - 1], traj.t[i], 1e-11, "rho increment");
            traj.rho[i] = std::exp(acc);
        }
    }
    return traj;
}

namespace {

// int_{B_4R} (theta_A(lambda y, t) - theta_A(0, t) + psi(lambda y, t)) U Z dy
double source_integral(const ProfileSolution& profile, const OuterField& psi,
                       double lambda, double t, double R4) {
    auto f = [&](double y) {
        double v = profile.space_time_minus_center(lambda * y, t);
        if (psi) v += psi(lambda * y, t);
        return v * bubble_u(y) * kernel_z(y);
    };
    return radial_integral(f, 0.0, R4, 1e-11);
}

struct MuGrid {
    const std::vector<double>* t;
    std::vector<double> mu;

    double at(double tt) const {
        const auto& ts = *t;
        if (tt <= ts.front()) return mu.front();
        if (tt >= ts.back()) return mu.back();
        std::size_t j = bracket(ts, tt);
        double x = std::log(tt), x0 = std::log(ts[j]), x1 = std::log(ts[j + 1]);
        auto slope = [&](std::size_t k) {
            std::size_t km = k == 0 ? 0 : k - 1;
            std::size_t kp = k + 1 >= ts.size() ? ts.size() - 1 : k + 1;
            return (mu[kp] - mu[km]) / (std::log(ts[kp]) - std::log(ts[km]));
        };
        return hermite_val(x, x0, x1, mu[j], mu[j + 1], slope(j), slope(j + 1));
    }
};

} // namespace

MuSolveInfo solve_mu(const ModulationParams& params, ModulationTrajectory& traj,
                     const ProfileSolution& profile, const OuterField& psi) {
    params.validate();
    const std::size_t m = traj.t.size();

    auto ftilde = [&](double s, double mu_s) {
        double lam = traj.lambda0_at(s) + mu_s;
        double R4 = 4.0 * params.R.value(s);
        double num = source_integral(profile, psi, lam, s, R4);
        return -2.0 * lam * num / ball_z2(R4);
    };

    MuGrid grid{&traj.t, std::vector<double>(m, 0.0)};
    MuSolveInfo info;
    double prev_diff = std::numeric_limits<double>::infinity();
    int bad_streak = 0;

    for (int it = 0; it < params.max_iter; ++it) {
        // G(s) = Ftilde(s) / lambda0(s); mu_new = S[mu]
        auto G = [&](double s) { return ftilde(s, grid.at(s)) / traj.lambda0_at(s); };

        std::vector<double> inc(m, 0.0);
        parallel_for(m - 1, [&](std::size_t i) {
            inc[i + 1] = integrate(G, traj.t[i], traj.t[i + 1], 1e-12, "mu operator");
        });

        std::vector<double> mu_new(m, 0.0);
        if (params.A > 0) {
            double acc = 0;
            for (std::size_t i = 0; i < m; ++i) {
                acc += inc[i];
                mu_new[i] = traj.lambda0[i] * acc;
            }
        } else if (params.A < 0) {
            // integral to infinity, truncated at T with a power-law tail
            // fitted on the last decade of |G|
            double gT = G(traj.t.back());
            double gT2 = G(traj.t.back() / 10.0);
            double W = 0;
            if (gT != 0 && gT2 != 0 && gT * gT2 > 0) {
                double q = std::log(std::abs(gT) / std::abs(gT2)) / std::log(10.0);
                if (q < -1.05) W = -gT * traj.t.back() / (q + 1.0);
            }
            info.tail_bound = std::abs(W) * traj.lambda0.back();
            double acc = W;
            for (std::size_t i = m; i-- > 0;) {
                mu_new[i] = -traj.lambda0[i] * acc;
                if (i > 0) acc += inc[i];
            }
        }

        std::vector<double> diff(m);
        for (std::size_t i = 0; i < m; ++i) diff[i] = mu_new[i] - grid.mu[i];
        double d = traj.sc_norm(diff);
        if (it > 0) {
            double factor = prev_diff > 0 ? d / prev_diff : 0.0;
            info.contraction_factors.push_back(factor);
            if (factor >= 1.0) {
                if (++bad_streak >= 2)
                    throw no_contraction("solve_mu: contraction factor >= 1 twice");
            } else {
                bad_streak = 0;
            }
        }
        prev_diff = d;
        grid.mu = std::move(mu_new);
        info.iterations = it + 1;
        if (d < params.fp_tol) break;
    }
    if (prev_diff >= params.fp_tol)
        throw no_contraction("solve_mu: iteration did not reach tolerance");

    traj.mu = grid.mu;
    for (std::size_t i = 0; i < m; ++i) {
        traj.lambda[i] = traj.lambda0[i] + traj.mu[i];
        if (!(traj.lambda[i] > 0))
            throw numeric_error("solve_mu: lambda lost positivity");
        double b = traj.beta(traj.t[i]);
        traj.lambda_dot[i] = b * traj.lambda[i] + ftilde(traj.t[i], traj.mu[i]);
    }
    info.sc_norm_mu = traj.sc_norm(traj.mu);

    // recompute sigma with lambda = lambda0 + mu
    traj.sigma[0] = traj.t0 / sq(traj.lambda[0]);
    for (std::size_t i = 1; i < m; ++i) {
        auto integrand = [&](double s) { return 1.0 / sq(traj.lambda0_at(s) + grid.at(s)); };
        traj.sigma[i] = traj.sigma[i - 1] +
                        integrate(integrand, traj.t[i - 1], traj.t[i], 1e-12, "sigma(mu)");
    }
    return info;
}

std::vector<double> orthogonality_residual_per_time(const ModulationTrajectory& traj,
                                                    const ProfileSolution& profile,
                                                    const OuterField& psi) {
    const std::size_t m = traj.t.size();
    std::vector<double> out(m);
    parallel_for(m, [&](std::size_t i) {
        double t = traj.t[i];
        double lam = traj.lambda[i], lamdot = traj.lambda_dot[i];
        double R4 = 4.0 * traj.R.value(t);
        // one fresh quadrature of the full integrand G Z
        auto f = [&](double y) {
            double G = lam * lamdot * kernel_z(y) +
                       2.0 * sq(lam) * bubble_u(y) *
                           (profile.space_time(lam * y, t) +
                            (psi ? psi(lam * y, t) : 0.0));
            return G * kernel_z(y);
        };
        double gz = radial_integral(f, 0.0, R4, 1e-12);
        double norm = std::abs(lam * lamdot) * ball_z2(R4);
        out[i] = norm > 0 ? std::abs(gz) / norm : std::abs(gz);
    });
    return out;
}

double orthogonality_residual(const ModulationTrajectory& traj,
                              const ProfileSolution& profile, const OuterField& psi) {
    auto r = orthogonality_residual_per_time(traj, profile, psi);
    return *std::max_element(r.begin(), r.end());
}

} // namespace glueheat
