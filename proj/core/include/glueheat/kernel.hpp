#pragma once

#include <functional>
#include <vector>

#include "glueheat/report.hpp"

namespace glueheat {

// e^{-z} I_2(z): series below z = 20, asymptotic expansion above.
double scaled_bessel_i2(double z);

// Sphere-averaged 6-D Gaussian kernel: the spatial heat convolution of a
// radial function f at radius r and time-to-go tau is
// int_0^inf K(r, rho, tau) f(rho) d rho with unit mass in rho.
double heat_kernel_radial(double r, double rho, double tau);

// Source v(t) |x|^-b 1_{l1(t) <= |x| <= l2(t)} switched on at t0.
struct SourceSpec {
    std::function<double(double)> v;
    double b = 0; // 0 or 4
    std::function<double(double)> l1;
    std::function<double(double)> l2; // may return +infinity
    double t0 = 1e3;

    double eval(double rho, double s) const;
};

// Duhamel heat-semigroup convolution for a general radial space-time
// source f(rho, s) supported in [lo(s), hi(s)].
double duhamel(const std::function<double(double, double)>& f,
               const std::function<double(double)>& lo,
               const std::function<double(double)>& hi, double t0, double x_norm,
               double t, double rel_tol = 1e-7);

double duhamel(const SourceSpec& src, double x_norm, double t,
               double rel_tol = 1e-7);

struct KernelLemmaOptions {
    std::vector<double> times;  // evaluation times (> t0)
    int x_per_branch = 8;
    double rel_tol = 1e-6;
    double uniformity_limit = 3.0;
};

// Space-time envelope bound for compactly supported power-law sources
// (three spatial branches split at l1(t), l2(t)).
BoundReport verify_kernel_lemma_compact(const SourceSpec& src,
                                        const KernelLemmaOptions& opt,
                                        const std::string& name);

// Envelope bound for sources supported in {|x| >= sqrt(t)} (two branches).
BoundReport verify_kernel_lemma_selfsimilar(const SourceSpec& src,
                                            const KernelLemmaOptions& opt,
                                            const std::string& name);

} // namespace glueheat
