#pragma once

#include <iosfwd>
#include <vector>

namespace glueheat {

struct ProfileParams {
    double A = 0.05;          // Theta_A(0); |A| < 2/5
    double r_max = 400.0;     // integration radius, >= 50
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    double series_cutoff = 1e-3; // power-series start below this radius

    void validate() const;
};

// Forward self-similar profile: samples of Theta_A, Theta_A' on an
// increasing radial grid plus the extracted tail coefficient
// ell = lim r^2 Theta_A(r).
class ProfileSolution {
public:
    double A = 0;
    double series_cutoff = 0;
    double ell = 0;
    double ell_uncertainty = 0;
    std::vector<double> grid;   // starts at 0
    std::vector<double> theta;  // theta[0] == A
    std::vector<double> dtheta; // dtheta[0] == 0

    // Hermite interpolation on the grid, ell/r^2 tail beyond r_max.
    double theta_at(double r) const;
    double dtheta_at(double r) const;
    // Theta_A(r) - A without cancellation near r = 0.
    double theta_minus_A(double r) const;

    double r_max() const { return grid.back(); }

    // theta_A(x,t) = (t+1)^-1 Theta_A(|x|/sqrt(t+1))
    double space_time(double x_norm, double t) const;
    double space_time_minus_center(double x_norm, double t) const;

    void write_csv(std::ostream& os) const;

private:
    std::size_t locate(double r) const;
};

ProfileSolution solve_theta(const ProfileParams& params);

// Kummer comparison profile 2((z-1)+e^-z)/z^2, z = r^2/4, with a series
// branch near z = 0. Value 1 at r = 0, positive, ~ 8/r^2 at infinity.
double tilde_theta(double r);

struct HRatioResult {
    std::vector<double> r;
    std::vector<double> h;              // Theta_A / tilde_theta on the grid
    double max_formula_discrepancy = 0; // vs the nested double-integral formula
};

// Ratio h(r) = Theta_A(r)/tilde_theta(r), h(0) = A, nonincreasing; also
// cross-checks the integral representation of h by nested quadrature.
HRatioResult h_ratio(const ProfileSolution& sol, int formula_points = 12);

} // namespace glueheat
