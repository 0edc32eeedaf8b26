#include "glueheat/bubble.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>

#include "glueheat/errors.hpp"
#include "glueheat/quadrature.hpp"
#include "glueheat/util.hpp"

namespace glueheat {

double bubble_u(double r) {
    double s = 1.0 + r * r / 24.0;
    return 1.0 / (s * s);
}

double bubble_u_prime(double r) {
    double s = 1.0 + r * r / 24.0;
    return -r / (6.0 * s * s * s);
}

double kernel_z(double r) {
    // 2U + rU' = 2(1-s)(1+s)^-3 with s = r^2/24
    double s = r * r / 24.0;
    double p = 1.0 + s;
    return 2.0 * (1.0 - s) / (p * p * p);
}

double u_l2sq() { return 2304.0 * s5_area; }
double z_l2sq() { return 55296.0 * s5_area / 15.0; }

double radial_integral(const std::function<double(double)>& f, double r_lo,
                       double r_hi, double rel_tol) {
    if (r_hi <= r_lo) return 0.0;
    auto g = [&](double r) { return f(r) * r * r * r * r * r; };
    return s5_area * integrate(g, r_lo, r_hi, rel_tol, "radial_integral");
}

// With T = r^2/24 and r^5 dr = 6912 s^2 ds:
//   int_{B_r} U^2 = 6912 pi^3 * T^3 / (3 (1+T)^3)
//   int_{B_r} U Z = 13824 pi^3 * T^3 (2-T) / (6 (1+T)^4)
//   int_{B_r} Z^2 = 27648 pi^3 * T^3 (2T^2-5T+5) / (15 (1+T)^5)
double ball_u2(double r) {
    double T = r * r / 24.0, p = 1.0 + T;
    return 6912.0 * s5_area * T * T * T / (3.0 * p * p * p);
}

double ball_uz(double r) {
    double T = r * r / 24.0, p = 1.0 + T;
    return 13824.0 * s5_area * T * T * T * (2.0 - T) / (6.0 * p * p * p * p);
}

double ball_z2(double r) {
    double T = r * r / 24.0, p = 1.0 + T;
    return 27648.0 * s5_area * T * T * T * (2.0 * T * T - 5.0 * T + 5.0) /
           (15.0 * p * p * p * p * p);
}

double ortho_ratio_exact_ball(double r) {
    double T = r * r / 24.0;
    return 5.0 * (T - 2.0) * (T + 1.0) / (2.0 * (2.0 * T * T - 5.0 * T + 5.0));
}

double ortho_ratio_exact(double R) { return ortho_ratio_exact_ball(4.0 * R); }

RatioExpansion ortho_ratio(double R, double rel_tol) {
    if (R <= 0) throw domain_error("ortho_ratio: R must be positive");
    const double rball = 4.0 * R;
    RatioExpansion e;
    e.R = R;
    if (R < 32.0) {
        double uz = radial_integral(
            [](double r) { return bubble_u(r) * kernel_z(r); }, 0.0, rball, rel_tol);
        double z2 = radial_integral([](double r) { return sq(kernel_z(r)); }, 0.0,
                                    rball, rel_tol);
        e.ratio = -2.0 * uz / z2;
    } else {
        // tail form by parts: -2 int_{B_r} UZ = 2||U||^2 - 2 int_tail U^2
        // - r |dB_r| U(r)^2; avoids the catastrophic cancellation that a
        // direct ball quadrature would leave in omega at large R
        const double rhi = 1e5 * rball;
        const double c8 = 331776.0; // 24^4, the rho^-8 tail coefficient of U^2
        double tail_u =
            radial_integral([](double r) { return sq(bubble_u(r)); }, rball, rhi,
                            1e-12) +
            s5_area * c8 / (2.0 * rhi * rhi);
        double tail_z =
            radial_integral([](double r) { return sq(kernel_z(r)); }, rball, rhi,
                            1e-12) +
            s5_area * 4.0 * c8 / (2.0 * rhi * rhi);
        double surf = rball * s5_area * std::pow(rball, 5) * sq(bubble_u(rball));
        e.ratio = (2.0 * u_l2sq() - 2.0 * tail_u - surf) / (z_l2sq() - tail_z);
    }
    e.second = (e.ratio - 1.25) * R * R;
    e.omega = e.ratio - 1.25 - 45.0 / (16.0 * R * R);
    return e;
}

std::vector<RatioExpansion> ratio_sweep(double R_lo, double R_hi,
                                        int points_per_decade, double rel_tol) {
    if (!(R_hi > R_lo) || R_lo <= 0)
        throw domain_error("ratio_sweep: need 0 < R_lo < R_hi");
    std::size_t n = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::ceil(std::log10(R_hi / R_lo) * points_per_decade)) + 1);
    auto grid = geomspace(R_lo, R_hi, n);
    std::vector<RatioExpansion> out(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { out[i] = ortho_ratio(grid[i], rel_tol); });
    return out;
}

namespace {

using state2 = std::array<double, 2>;

// Integrates the eigen ODE for a trial gamma, returning samples on a
// uniform grid. The 5/r term is started by the r^2 series at the origin.
void shoot(double gamma, double r_max, std::vector<double>& r,
           std::vector<double>& z, std::vector<double>& dz) {
    namespace ode = boost::numeric::odeint;
    const double r0 = 1e-6;
    const double c2 = (gamma - 2.0) / 12.0; // 12 c2 + 2U(0) - gamma = 0
    state2 y{1.0 + c2 * r0 * r0, 2.0 * c2 * r0};
    auto rhs = [gamma](const state2& s, state2& dsdr, double rr) {
        dsdr[0] = s[1];
        dsdr[1] = -(5.0 / rr) * s[1] - 2.0 * bubble_u(rr) * s[0] + gamma * s[0];
    };
    const std::size_t n = r.size();
    auto stepper = ode::make_dense_output(1e-12, 1e-12,
                                          ode::runge_kutta_dopri5<state2>());
    stepper.initialize(y, r0, 1e-4);
    std::size_t i = 0;
    for (; i < n && r[i] <= r0; ++i) {
        z[i] = 1.0 + c2 * r[i] * r[i];
        dz[i] = 2.0 * c2 * r[i];
    }
    while (stepper.current_time() < r_max) {
        stepper.do_step(rhs);
        while (i < n && r[i] <= stepper.current_time()) {
            state2 s;
            stepper.calc_state(r[i], s);
            z[i] = s[0];
            dz[i] = s[1];
            ++i;
        }
        if (!std::isfinite(stepper.current_state()[0])) break;
    }
    for (; i < n; ++i) { z[i] = z[i - 1]; dz[i] = dz[i - 1]; }
}

} // namespace

EigenPair solve_eigenpair(double r_max, double tol) {
    if (r_max < 30.0) throw domain_error("solve_eigenpair: r_max must be >= 30");
    const std::size_t n = static_cast<std::size_t>(r_max / 2e-3) + 1;
    std::vector<double> r = linspace(0.0, r_max, n);
    std::vector<double> z(n), dz(n);

    auto endval = [&](double gamma) {
        shoot(gamma, r_max, r, z, dz);
        return z.back();
    };

    double lo = 1e-4, hi = 4.0;
    double flo = endval(lo), fhi = endval(hi);
    if (flo * fhi >= 0)
        throw bracket_failure("solve_eigenpair: no sign change of the far field in (1e-4, 4)");
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        double fm = endval(mid);
        if (fm * flo > 0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    EigenPair ep;
    ep.gamma0 = 0.5 * (lo + hi);
    shoot(ep.gamma0, r_max, r, z, dz);
    ep.r = std::move(r);
    ep.z0 = std::move(z);
    ep.dz0 = std::move(dz);
    double sup = 0;
    const double srg = std::sqrt(ep.gamma0);
    // the far tail of the shooting solution is polluted past the turning
    // point; restrict the decay diagnostic to the first three quarters
    for (std::size_t i = 0; i < ep.r.size() * 3 / 4; ++i)
        sup = std::max(sup, std::abs(ep.z0[i]) * std::exp(0.5 * srg * ep.r[i]));
    ep.decay_check = sup;
    return ep;
}

} // namespace glueheat
