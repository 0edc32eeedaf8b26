#include "glueheat/profile.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include "glueheat/errors.hpp"
#include "glueheat/quadrature.hpp"
#include "glueheat/util.hpp"

namespace glueheat {

void ProfileParams::validate() const {
    if (!(std::abs(A) < 0.4))
        throw domain_error("ProfileParams: |A| must be below 2/5");
    if (!(r_max >= 50.0))
        throw domain_error("ProfileParams: r_max must be >= 50");
    if (!(abs_tol > 0 && abs_tol <= 1e-6) || !(rel_tol > 0 && rel_tol <= 1e-6))
        throw domain_error("ProfileParams: tolerances must lie in (0, 1e-6]");
    if (!(series_cutoff > 0 && series_cutoff < 1.0))
        throw domain_error("ProfileParams: series_cutoff must lie in (0, 1)");
}

namespace {

// Theta = A + c r^2 + d r^4 + O(r^6) near the origin (A >= 0 here).
struct series_start {
    double A, c, d;
    explicit series_start(double A_) : A(A_) {
        c = -A * (1.0 + A) / 12.0;
        d = -c * (1.0 + A) / 16.0;
    }
    double value(double r) const { return A + (c + d * r * r) * r * r; }
    double deriv(double r) const { return (2.0 * c + 4.0 * d * r * r) * r; }
    double value_minus_A(double r) const { return (c + d * r * r) * r * r; }
};

std::vector<double> profile_grid(double cutoff, double r_max) {
    std::vector<double> g;
    g.push_back(0.0);
    const double dense_hi = std::min(2.0, r_max);
    for (double r = cutoff; r < dense_hi; r += 0.005) g.push_back(r);
    const int per_decade = 128;
    std::size_t n = static_cast<std::size_t>(
                        std::ceil(std::log10(r_max / dense_hi) * per_decade)) + 1;
    for (double r : geomspace(dense_hi, r_max, std::max<std::size_t>(n, 2)))
        g.push_back(r);
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

double hermite(double x, double x0, double x1, double f0, double f1,
               double d0, double d1) {
    double h = x1 - x0, u = (x - x0) / h;
    double u2 = u * u, u3 = u2 * u;
    return f0 * (2 * u3 - 3 * u2 + 1) + f1 * (-2 * u3 + 3 * u2) +
           h * (d0 * (u3 - 2 * u2 + u) + d1 * (u3 - u2));
}

} // namespace

ProfileSolution solve_theta(const ProfileParams& params) {
    params.validate();
    const double Aabs = std::abs(params.A);
    const double sign = params.A < 0 ? -1.0 : 1.0;

    ProfileSolution sol;
    sol.A = params.A;
    sol.series_cutoff = params.series_cutoff;
    sol.grid = profile_grid(params.series_cutoff, params.r_max);
    sol.theta.assign(sol.grid.size(), 0.0);
    sol.dtheta.assign(sol.grid.size(), 0.0);

    if (Aabs == 0.0) return sol; // zero data, zero solution

    series_start start(Aabs);
    namespace ode = boost::numeric::odeint;
    using state2 = std::array<double, 2>;
    auto rhs = [](const state2& s, state2& d, double r) {
        d[0] = s[1];
        d[1] = -(5.0 / r + 0.5 * r) * s[1] - s[0] - std::abs(s[0]) * s[0];
    };

    const double r0 = params.series_cutoff;
    state2 y{start.value(r0), start.deriv(r0)};
    auto stepper = ode::make_dense_output(params.abs_tol, params.rel_tol,
                                          ode::runge_kutta_dopri5<state2>());
    stepper.initialize(y, r0, 1e-3);

    std::size_t i = 0;
    for (; i < sol.grid.size() && sol.grid[i] <= r0; ++i) {
        sol.theta[i] = start.value(sol.grid[i]);
        sol.dtheta[i] = start.deriv(sol.grid[i]);
    }
    while (stepper.current_time() < params.r_max && i < sol.grid.size()) {
        stepper.do_step(rhs);
        if (!std::isfinite(stepper.current_state()[0]) ||
            !std::isfinite(stepper.current_state()[1]))
            throw integration_diverged("solve_theta: non-finite state",
                                       stepper.current_time());
        while (i < sol.grid.size() && sol.grid[i] <= stepper.current_time()) {
            state2 s;
            stepper.calc_state(sol.grid[i], s);
            sol.theta[i] = s[0];
            sol.dtheta[i] = s[1];
            ++i;
        }
    }

    // tail coefficient by Richardson extrapolation of r^2 Theta assuming
    // an r^-2 correction, at r_max/4, r_max/2, r_max
    auto g = [&](double r) {
        state2 s;
        stepper.calc_state(std::min(r, stepper.current_time()), s);
        return r * r * s[0];
    };
    double g1 = g(params.r_max / 4), g2 = g(params.r_max / 2), g3 = g(params.r_max);
    double l_coarse = (4.0 * g2 - g1) / 3.0;
    double l_fine = (4.0 * g3 - g2) / 3.0;
    sol.ell = sign * l_fine;
    sol.ell_uncertainty = std::abs(l_fine - l_coarse);

    if (sign < 0) {
        for (auto& v : sol.theta) v = -v;
        for (auto& v : sol.dtheta) v = -v;
    }
    return sol;
}

std::size_t ProfileSolution::locate(double r) const {
    auto it = std::upper_bound(grid.begin(), grid.end(), r);
    std::size_t j = static_cast<std::size_t>(it - grid.begin());
    return std::clamp<std::size_t>(j, 1, grid.size() - 1) - 1;
}

double ProfileSolution::theta_at(double r) const {
    if (r < 0) throw domain_error("theta_at: negative radius");
    if (A == 0) return 0.0;
    if (r > grid.back()) return ell / (r * r);
    if (r <= series_cutoff) {
        series_start s(std::abs(A));
        return (A < 0 ? -1.0 : 1.0) * s.value(r);
    }
    std::size_t j = locate(r);
    return hermite(r, grid[j], grid[j + 1], theta[j], theta[j + 1], dtheta[j],
                   dtheta[j + 1]);
}

double ProfileSolution::dtheta_at(double r) const {
    if (r < 0) throw domain_error("dtheta_at: negative radius");
    if (A == 0) return 0.0;
    if (r > grid.back()) return -2.0 * ell / (r * r * r);
    if (r <= series_cutoff) {
        series_start s(std::abs(A));
        return (A < 0 ? -1.0 : 1.0) * s.deriv(r);
    }
    std::size_t j = locate(r);
    auto dd = [&](std::size_t k) {
        double rr = std::max(grid[k], series_cutoff);
        return -(5.0 / rr + 0.5 * rr) * dtheta[k] - theta[k] -
               std::abs(theta[k]) * theta[k];
    };
    return hermite(r, grid[j], grid[j + 1], dtheta[j], dtheta[j + 1], dd(j),
                   dd(j + 1));
}

double ProfileSolution::theta_minus_A(double r) const {
    if (A == 0) return 0.0;
    if (r <= series_cutoff) {
        series_start s(std::abs(A));
        return (A < 0 ? -1.0 : 1.0) * s.value_minus_A(r);
    }
    return theta_at(r) - A;
}

double ProfileSolution::space_time(double x_norm, double t) const {
    if (t < 0) throw domain_error("space_time: t must be >= 0");
    double sc = std::sqrt(t + 1.0);
    return theta_at(x_norm / sc) / (t + 1.0);
}

double ProfileSolution::space_time_minus_center(double x_norm, double t) const {
    double sc = std::sqrt(t + 1.0);
    return theta_minus_A(x_norm / sc) / (t + 1.0);
}

void ProfileSolution::write_csv(std::ostream& os) const {
    char buf[128];
    std::snprintf(buf, sizeof buf, "# A=%.17g\n", A);
    os << buf;
    std::snprintf(buf, sizeof buf, "# ell=%.17g\n", ell);
    os << buf;
    std::snprintf(buf, sizeof buf, "# ell_uncertainty=%.17g\n", ell_uncertainty);
    os << buf;
    os << "r,theta,dtheta\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", grid[i], theta[i],
                      dtheta[i]);
        os << buf;
    }
}

double tilde_theta(double r) {
    if (r < 0) throw domain_error("tilde_theta: negative radius");
    const double z = r * r / 4.0;
    if (z < 1e-2) {
        // 2 sum_j (-z)^j / (j+2)!; the closed form cancels near z = 0
        double sum = 0.0;
        double p = 1.0; // (-z)^j
        double f = 2.0; // (j+2)!
        for (int j = 0; j <= 10; ++j) {
            sum += 2.0 * p / f;
            p *= -z;
            f *= (j + 3);
        }
        return sum;
    }
    return 2.0 * ((z - 1.0) + std::exp(-z)) / (z * z);
}

HRatioResult h_ratio(const ProfileSolution& sol, int formula_points) {
    if (!(sol.A > 0)) throw domain_error("h_ratio: requires A > 0");
    HRatioResult res;
    res.r = sol.grid;
    res.h.resize(sol.grid.size());
    for (std::size_t i = 0; i < sol.grid.size(); ++i)
        res.h[i] = i == 0 ? sol.A : sol.theta[i] / tilde_theta(sol.grid[i]);

    // nested quadrature of the integral representation; radii capped so
    // e^{rho^2/4} stays in range
    double hi = std::min(20.0, sol.r_max());
    auto pts = geomspace(0.1, hi, static_cast<std::size_t>(formula_points));
    double worst = 0;
    for (double r : pts) {
        auto inner = [&](double s) {
            return std::pow(s, 5) * std::exp(s * s / 4.0) * tilde_theta(s) *
                   sq(sol.theta_at(s));
        };
        auto outer = [&](double rho) {
            double I = integrate(inner, 0.0, rho, 1e-10, "h_formula inner");
            double tt = tilde_theta(rho);
            return std::exp(-rho * rho / 4.0) / (std::pow(rho, 5) * tt * tt) * I;
        };
        double hf = sol.A - integrate(outer, 0.0, r, 1e-9, "h_formula outer");
        double hg = sol.theta_at(r) / tilde_theta(r);
        worst = std::max(worst, std::abs(hf - hg));
    }
    res.max_formula_discrepancy = worst;
    return res;
}

} // namespace glueheat
