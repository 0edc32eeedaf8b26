#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "glueheat/bubble.hpp"
#include "glueheat/profile.hpp"
#include "glueheat/rate.hpp"

namespace glueheat {

// Radial outer field psi(|x|, t); empty means psi == 0.
using OuterField = std::function<double(double x_norm, double t)>;

struct ModulationParams {
    double A = 0.05;
    RateFunction R = RateFunction::log_t();
    double t0 = 1e3;
    double T = 1e9;
    double a = 0.9, a1 = 0.5, a2 = 0.25; // 0 < a2 < a1 < a < 1
    int points_per_decade = 64;
    double fp_tol = 1e-10;
    int max_iter = 60;

    void validate() const;
};

// Interpolated omega(R) from a RatioExpansion sweep, clamped to the
// sweep endpoints outside its range (omega is an asymptotic remainder;
// below the sweep the clamped value keeps rho's integrand meaningful).
class OmegaInterp {
public:
    OmegaInterp() = default;
    explicit OmegaInterp(const std::vector<RatioExpansion>& sweep);
    double operator()(double R) const;

private:
    std::vector<double> logR_, omega_;
};

// Default sweep for rho evaluation: R in [8, 1024].
const std::vector<RatioExpansion>& default_ratio_sweep();

// log rho_{A,R}(t): (45A/16) int_1^t R^-2 ds/s + A int_1^t omega ds/s.
double log_rho(double A, const RateFunction& R, double t, const OmegaInterp& omega);

class ModulationTrajectory {
public:
    // grid columns
    std::vector<double> t, lambda0, mu, lambda, lambda_dot, sigma, rho, beta_t;
    // parameters the trajectory was built with
    double A = 0, a = 0.9, a1 = 0.5, a2 = 0.25;
    double t0 = 0, T = 0;
    RateFunction R = RateFunction::log_t();
    double scale = 1.0; // lambda(t0) (the ODE is scale covariant)

    double lambda0_at(double tt) const;
    double lambda_at(double tt) const;
    double lambda_dot_at(double tt) const;
    double mu_at(double tt) const;
    double sigma_at(double tt) const;
    double rho_at(double tt) const;
    double beta(double tt) const; // ratio(R(t)) * A/(t+1)

    // sup over the grid of lambda0^-1 R^{a2} |f|
    double sc_norm(const std::vector<double>& f) const;

    // multiply lambda (and mu, lambda_dot) by s; sigma rescales by s^-2
    ModulationTrajectory rescaled(double s) const;

    // largest lambda(t0) for which 18 lambda R <= sqrt(t) holds at t0
    double separation_scale() const;
    // max over grid of 18 lambda R / sqrt(t)
    double separation_margin() const;

    double local_exponent_lambda0(double t_star, double half_decades = 0.25) const;
    double local_exponent_sigma(double t_star, double half_decades = 0.25) const;

    void write_csv(std::ostream& os, const std::vector<double>& ortho_resid = {}) const;

private:
    friend ModulationTrajectory solve_lambda0(const ModulationParams&);
    double column_at(const std::vector<double>& col, double tt) const;
};

// Integrates lambda0' = ratio(R(t)) A (t+1)^-1 lambda0 with lambda0(t0)=1,
// fills sigma (with the t0/lambda(t0)^2 offset), rho and beta*t columns.
ModulationTrajectory solve_lambda0(const ModulationParams& params);

struct MuSolveInfo {
    int iterations = 0;
    std::vector<double> contraction_factors;
    double sc_norm_mu = 0;
    double tail_bound = 0; // A<0: magnitude of the analytic tail beyond T
};

// Fixed-point iteration for the modulation correction mu (starting from
// mu == 0) so that lambda = lambda0 + mu satisfies the orthogonality
// condition against Z. psi may be empty. sigma is recomputed with the
// corrected lambda. Throws no_contraction if the iteration diverges.
MuSolveInfo solve_mu(const ModulationParams& params, ModulationTrajectory& traj,
                     const ProfileSolution& profile, const OuterField& psi = {});

// max over grid times of |int_{B_4R} G Z dy| / (lambda |lambda_dot| int Z^2),
// evaluated by fresh quadrature of the assembled integrand.
double orthogonality_residual(const ModulationTrajectory& traj,
                              const ProfileSolution& profile,
                              const OuterField& psi = {});

std::vector<double> orthogonality_residual_per_time(const ModulationTrajectory& traj,
                                                    const ProfileSolution& profile,
                                                    const OuterField& psi = {});

} // namespace glueheat
