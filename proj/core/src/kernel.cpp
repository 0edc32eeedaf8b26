#include "glueheat/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "glueheat/errors.hpp"
#include "glueheat/quadrature.hpp"
#include "glueheat/util.hpp"

namespace glueheat {

double scaled_bessel_i2(double z) {
    if (z < 0) throw domain_error("scaled_bessel_i2: negative argument");
    if (z < 20.0) {
        // e^-z sum_k (z/2)^{2k+2} / (k! (k+2)!)
        double q = z * z / 4.0;
        double term = q / 2.0; // k = 0
        double sum = term;
        for (int k = 1; k < 60; ++k) {
            term *= q / (double(k) * double(k + 2));
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        return sum * std::exp(-z);
    }
    // I_2(z) ~ e^z/sqrt(2 pi z) sum_k (-1)^k a_k / z^k,
    // a_k = prod_{j=1..k} (16 - (2j-1)^2) / (k 8)
    double sum = 1.0, ak = 1.0;
    for (int k = 1; k <= 16; ++k) {
        ak *= (16.0 - sq(2.0 * k - 1.0)) / (8.0 * k);
        sum += (k % 2 ? -ak : ak) / std::pow(z, k);
    }
    return sum / std::sqrt(2.0 * pi * z);
}

double heat_kernel_radial(double r, double rho, double tau) {
    double kap = r * rho / (2.0 * tau);
    double bes = kap < 1e-6
                     ? 0.125 * (1.0 - kap + kap * kap * (0.5 + 1.0 / 12.0))
                     : scaled_bessel_i2(kap) / sq(kap);
    double d = r - rho;
    return std::pow(rho, 5) / (8.0 * tau * tau * tau) *
           std::exp(-d * d / (4.0 * tau)) * bes;
}

double SourceSpec::eval(double rho, double s) const {
    if (s < t0) return 0.0;
    if (rho < l1(s) || rho > l2(s)) return 0.0;
    double amp = v(s);
    return b == 0 ? amp : amp * std::pow(rho, -b);
}

namespace {

double spatial_conv(const std::function<double(double, double)>& f, double lo,
                    double hi, double r, double s, double tau, double rel_tol) {
    const double w = 45.0 * std::sqrt(tau);
    double a = std::max(lo, r - w);
    double b = std::min(hi, r + w);
    if (!(b > a)) return 0.0;
    auto g = [&](double rho) { return heat_kernel_radial(r, rho, tau) * f(rho, s); };
    return integrate(g, a, b, rel_tol, "duhamel spatial");
}

} // namespace

double duhamel(const std::function<double(double, double)>& f,
               const std::function<double(double)>& lo,
               const std::function<double(double)>& hi, double t0, double x_norm,
               double t, double rel_tol) {
    if (!(t > t0)) throw domain_error("duhamel: t must exceed t0");
    const double span = t - t0;
    const double tau_min = 1e-10 * span;
    // s = t - e^{-q}; the s -> t endpoint maps to q -> infinity
    auto integrand = [&](double q) {
        double tau = std::exp(-q);
        double s = t - tau;
        return tau * spatial_conv(f, lo(s), hi(s), x_norm, s, tau, 0.3 * rel_tol);
    };
    double val = integrate(integrand, -std::log(span), -std::log(tau_min), rel_tol,
                           "duhamel time");
    // analytic remainder of the last tau_min of the time integral
    val += tau_min * f(x_norm, t);
    return val;
}

double duhamel(const SourceSpec& src, double x_norm, double t, double rel_tol) {
    return duhamel([&](double rho, double s) { return src.eval(rho, s); }, src.l1,
                   src.l2, src.t0, x_norm, t, rel_tol);
}

namespace {

double sup_on(const std::function<double(double)>& v, double a, double b) {
    double m = 0;
    for (double s : geomspace(a, b, 33)) m = std::max(m, v(s));
    return m;
}

// int_{t0}^{t/2} v(s) w(s) ds, zero when t/2 <= t0
double head_integral(const std::function<double(double)>& f, double t0, double t) {
    if (t / 2 <= t0) return 0.0;
    return integrate(f, t0, t / 2, 1e-8, "lemma head integral");
}

} // namespace

BoundReport verify_kernel_lemma_compact(const SourceSpec& src,
                                        const KernelLemmaOptions& opt,
                                        const std::string& name) {
    BoundReport rep;
    rep.name = name;
    struct Job { double t, x; };
    std::vector<Job> jobs;
    for (double t : opt.times) {
        double L1 = src.l1(t), L2 = src.l2(t);
        std::vector<double> xs;
        if (L1 > 0)
            for (double x : geomspace(L1 / 20.0, L1 * 0.999, opt.x_per_branch))
                xs.push_back(x);
        for (double x : geomspace(std::max(L1 * 1.001, L2 / 50.0), L2 * 0.999,
                                  opt.x_per_branch))
            xs.push_back(x);
        for (double x : geomspace(L2 * 1.001, std::min(30.0 * L2, 40.0 * std::sqrt(t)),
                                  opt.x_per_branch))
            xs.push_back(x);
        for (double x : xs) jobs.push_back({t, x});
    }

    std::vector<BoundReport::Sample> samples(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t j) {
        const double t = jobs[j].t, x = jobs[j].x;
        const double L1 = src.l1(t), L2 = src.l2(t);
        double lhs = std::abs(duhamel(src, x, t, opt.rel_tol));

        double head = head_integral(
            [&](double s) { return src.v(s) * std::pow(src.l2(s), 6.0 - src.b); },
            src.t0, t);
        double rhs = std::pow(t, -3.0) * std::exp(-x * x / (16.0 * t)) * head;
        double supv = sup_on(src.v, std::max(t / 2, src.t0), t);
        if (x <= L1)
            rhs += supv * (src.b == 0 ? sq(L2) : 1.0 / sq(L1));
        else if (x <= L2)
            rhs += supv * (src.b == 0 ? sq(L2) : 1.0 / sq(x));
        else
            rhs += supv * std::exp(-x * x / (16.0 * t)) * std::pow(L2, 6.0 - src.b) /
                   sq(sq(x));
        samples[j] = {t, x, lhs, rhs};
    });
    rep.samples = std::move(samples);
    rep.finalize(opt.uniformity_limit);
    return rep;
}

BoundReport verify_kernel_lemma_selfsimilar(const SourceSpec& src,
                                            const KernelLemmaOptions& opt,
                                            const std::string& name) {
    BoundReport rep;
    rep.name = name;
    struct Job { double t, x; };
    std::vector<Job> jobs;
    for (double t : opt.times) {
        double st = std::sqrt(t);
        for (double x : geomspace(st / 50.0, st * 0.999, opt.x_per_branch))
            jobs.push_back({t, x});
        for (double x : geomspace(st * 1.001, 20.0 * st, opt.x_per_branch))
            jobs.push_back({t, x});
    }

    std::vector<BoundReport::Sample> samples(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t j) {
        const double t = jobs[j].t, x = jobs[j].x;
        const double st = std::sqrt(t);
        double lhs = std::abs(duhamel(src, x, t, opt.rel_tol));
        double head = head_integral(src.v, src.t0, t);
        double supv = sup_on(src.v, std::max(t / 2, src.t0), t);
        double rhs;
        if (x <= st)
            rhs = std::pow(t, -src.b / 2.0) * head +
                  std::pow(t, 1.0 - src.b / 2.0) * supv;
        else
            rhs = std::pow(x, -src.b) * (head + t * supv);
        samples[j] = {t, x, lhs, rhs};
    });
    rep.samples = std::move(samples);
    rep.finalize(opt.uniformity_limit);
    return rep;
}

} // namespace glueheat
