#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "glueheat/modulation.hpp"
#include "glueheat/profile.hpp"
#include "glueheat/report.hpp"

namespace glueheat {

// Smooth cutoff: 1 on [0,1], 0 on [2,inf), C^infty mollifier bridge on
// (1,2), with analytic first/second derivatives.
double eta(double x);
double eta_prime(double x);
double eta_second(double x);

// Radial field samples at one time.
struct RadialField {
    double t = 0;
    std::vector<double> r;
    std::vector<double> v;
    std::vector<double> dv; // optional radial derivative samples

    double max_abs() const;
};

// Radial function of (y_or_x, t) with optional radial derivative; an
// empty value means the field is identically zero.
struct FieldFamily {
    std::function<double(double, double)> value;
    std::function<double(double, double)> grad;

    explicit operator bool() const { return static_cast<bool>(value); }
};

// Weight functions of the inner/outer norm balls.
struct WeightSpec {
    const ModulationTrajectory* traj;

    double w_in(double y_norm, double t) const;  // sigma^-1 R^{7-a} <y>^-7
    double w_out(double x_norm, double t) const; // t^-1 R^-a1 [...]
};

// Members of the norm balls used as synthetic phi/psi in scans:
// phi = s * w_in (|s| <= 1/8 keeps ||phi||_in <= 1),
// psi = s |A| t^-1 R^-a1 (1+|x|^2/t)^-1 (|s| <= 1 stays inside B_out).
FieldFamily ball_member_phi(const ModulationTrajectory& traj, double s);
FieldFamily ball_member_psi(const ModulationTrajectory& traj, double s);

struct GlueContext {
    const ModulationTrajectory* traj = nullptr; // expected separation-normalized
    const ProfileSolution* profile = nullptr;
    FieldFamily phi; // inner variable y
    FieldFamily psi; // outer variable x

    double lambda(double t) const { return traj->lambda_at(t); }
    double lambda_dot(double t) const { return traj->lambda_dot_at(t); }
    double Rcut(double t) const { return traj->R.value(t); }
};

// Union of log-spaced grids resolving the bubble scale lambda, the cutoff
// scale lambda R and the self-similar scale sqrt(t).
std::vector<double> union_grid(double lambda, double lambdaR, double sqrt_t,
                               std::size_t per_scale = 200);

// u = lambda^-2 U(y) eta(ytilde) + theta_A + lambda^-2 phi eta_R + psi.
// Refuses with scale_collapse when 18 lambda R > sqrt(t).
RadialField assemble_ansatz(const GlueContext& ctx, double t);

// Pointwise evaluator of the same ansatz at fixed t (for sampling onto
// external grids).
std::function<double(double)> ansatz_evaluator(const GlueContext& ctx, double t);

struct ErrorTerms {
    RadialField N, E, Etilde, H;
};

// Pointwise error terms of the gluing system on the union grid; H is the
// sum of the three.
ErrorTerms error_terms(const GlueContext& ctx, double t);

// N evaluated through the mean-value identity (no |theta|theta term);
// used as the independent route for the cancellation check.
RadialField n_mean_value(const GlueContext& ctx, double t);

// G[psi,lambda] = lambda lambda_dot Z + 2 lambda^2 U (theta_A + psi)(lambda y)
// on y in [0, 4R(t)].
RadialField inner_inhomogeneity(const GlueContext& ctx, double t);

// sup over the sweep of sigma <y>^{2+a} |G| (the *-norm of the inner source).
double inner_source_weighted_norm(const GlueContext& ctx,
                                  const std::vector<double>& times);

struct PointwiseBoundOptions {
    std::vector<double> times;   // >= 3 decades
    double support_c = 8.0;      // C in the t^{5A/4} R support indicators
    double eps = 0.1;            // epsilon in the N_in bound
    double uniformity_limit = 3.0;
};

// BoundReports for N_out / N_in / N_mid / E / Etilde / combined H.
std::vector<BoundReport> verify_pointwise_bounds(const GlueContext& ctx,
                                                 const PointwiseBoundOptions& opt);

struct SignScanResult {
    bool inner_positive = false;   // u > 0 on |x| < lambda^{1/2} t^{1/4}
    double inner_min = 0;
    bool origin_positive = false;
    bool outer_negative = false;   // A<0: u < 0 on [2 sqrt(t), 10 sqrt(t)]
    double value_at_3sqrt_t = 0;
};

SignScanResult sign_scan(const GlueContext& ctx, double t);

} // namespace glueheat
