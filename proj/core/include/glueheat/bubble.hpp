#pragma once

#include <functional>
#include <vector>

namespace glueheat {

// Aubin-Talenti bubble on R^6 and its scaling kernel.
//   U(y)  = (1 + |y|^2/24)^-2
//   Z(y)  = 2U(y) + y . grad U(y)
double bubble_u(double r);
double bubble_u_prime(double r);
double kernel_z(double r);

// Exact squared L^2 norms over R^6.
double u_l2sq(); // 24^3 pi^3 / 6
double z_l2sq(); // 4 * 24^3 pi^3 / 15

// 6-D radial integral  pi^3 * int_{r_lo}^{r_hi} f(r) r^5 dr  by adaptive
// quadrature at the requested relative tolerance.
double radial_integral(const std::function<double(double)>& f, double r_lo,
                       double r_hi, double rel_tol = 1e-10);

// Closed-form ball integrals over B_r (r = ball radius), derived by
// partial fractions from the rational integrands.
double ball_u2(double r);
double ball_uz(double r);
double ball_z2(double r);

// -2 int_{B_r} U Z / int_{B_r} Z^2 as an exact rational function of
// T = r^2/24; equals 5(T-2)(T+1) / (2(2T^2-5T+5)).
double ortho_ratio_exact_ball(double r);

// Same quantity with ball radius 4R (the cutoff convention used by the
// orthogonality integrals); expansion 5/4 + (45/16) R^-2 + omega(R).
double ortho_ratio_exact(double R);

struct RatioExpansion {
    double R = 0;      // cutoff radius (ball radius is 4R)
    double ratio = 0;  // -2 int UZ / int Z^2 over B_{4R}
    double second = 0; // (ratio - 5/4) * R^2, tends to 45/16
    double omega = 0;  // ratio - 5/4 - (45/16) R^-2
};

// Quadrature route for the ratio (independent of the closed forms).
RatioExpansion ortho_ratio(double R, double rel_tol = 1e-10);

std::vector<RatioExpansion> ratio_sweep(double R_lo, double R_hi,
                                        int points_per_decade = 16,
                                        double rel_tol = 1e-10);

struct EigenPair {
    double gamma0 = 0;          // positive eigenvalue of Delta + 2U
    std::vector<double> r;      // uniform radial grid
    std::vector<double> z0;     // eigenfunction, Z0(0) = 1
    std::vector<double> dz0;    // radial derivative samples
    double decay_check = 0;     // sup |Z0(r)| e^{sqrt(gamma0) r / 2}
};

// Shooting with bisection on the far-field sign change,
// Z0'' + (5/r) Z0' + 2U Z0 = gamma0 Z0, Z0(0)=1, Z0'(0)=0.
EigenPair solve_eigenpair(double r_max = 60.0, double tol = 1e-10);

} // namespace glueheat
