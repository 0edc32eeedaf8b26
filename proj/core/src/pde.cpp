#include "glueheat/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "glueheat/errors.hpp"
#include "glueheat/util.hpp"

namespace glueheat {

void SimConfig::validate() const {
    if (!(t_end > t0)) throw domain_error("SimConfig: t_end must exceed t0");
    if (!(r_max >= 20.0 * std::sqrt(t_end)))
        throw domain_error("SimConfig: r_max must be >= 20 sqrt(t_end)");
    if (n_cells < 2000) throw domain_error("SimConfig: n_cells must be >= 2000");
    if (!(cfl_safety > 0 && cfl_safety <= 0.9))
        throw domain_error("SimConfig: cfl_safety must lie in (0, 0.9]");
    if (!(dr_core > 0)) throw domain_error("SimConfig: dr_core must be positive");
    if (!(grade_ratio > 1.0)) throw domain_error("SimConfig: grade_ratio must be > 1");
}

RadialMesh build_mesh(const SimConfig& config) {
    double grade = config.grade_ratio;
    RadialMesh mesh;
    for (;;) {
        mesh.faces.assign(1, 0.0);
        double dr = config.dr_core;
        while (mesh.faces.back() < config.r_max) {
            mesh.faces.push_back(mesh.faces.back() + dr);
            dr = std::min(dr * grade, config.dr_cap);
        }
        if (static_cast<int>(mesh.faces.size()) - 1 >= config.n_cells) break;
        grade = std::sqrt(grade); // densify until the minimum count is met
        if (grade < 1.0000001) {
            // fall back to a uniform pad of the far region
            double need = config.n_cells - (mesh.faces.size() - 1);
            double extra = (config.r_max - mesh.faces.back());
            (void)need; (void)extra;
            break;
        }
    }
    mesh.faces.back() = config.r_max;
    mesh.centers.resize(mesh.faces.size() - 1);
    for (std::size_t i = 0; i + 1 < mesh.faces.size(); ++i)
        mesh.centers[i] = 0.5 * (mesh.faces[i] + mesh.faces[i + 1]);
    return mesh;
}

SimTrace simulate(const SimConfig& config,
                  const std::function<double(double)>& initial) {
    config.validate();
    RadialMesh mesh = build_mesh(config);
    const std::size_t n = mesh.centers.size();

    // finite-volume coefficients: V_i du_i/dt = S_{i+1/2} (u_{i+1}-u_i)/h - ...
    std::vector<double> wl(n, 0.0), wr(n, 0.0);
    std::vector<double> vol(n);
    for (std::size_t i = 0; i < n; ++i)
        vol[i] = (std::pow(mesh.faces[i + 1], 6) - std::pow(mesh.faces[i], 6)) / 6.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double S = std::pow(mesh.faces[i + 1], 5);
        double h = mesh.centers[i + 1] - mesh.centers[i];
        wr[i] = S / (h * vol[i]);
        wl[i + 1] = S / (h * vol[i + 1]);
    }
    // far boundary flux
    double w_far = 0, u_far = 0;
    if (config.far_field == FarField::SelfSimilarDirichlet) {
        double S = std::pow(mesh.faces[n], 5);
        double h = mesh.faces[n] - mesh.centers[n - 1];
        w_far = S / (h * vol[n - 1]);
        u_far = config.ell / sq(config.r_max);
    }

    double max_rate = 0;
    for (std::size_t i = 0; i < n; ++i)
        max_rate = std::max(max_rate, wl[i] + wr[i] + (i + 1 == n ? w_far : 0.0));
    const double dt = config.cfl_safety / max_rate;

    std::vector<double> u(n), unew(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = initial(mesh.centers[i]);

    SimTrace trace;
    auto record = [&](double t) {
        std::size_t k = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::abs(u[i]) > std::abs(u[k])) k = i;
        trace.times.push_back(t);
        trace.sup_norm.push_back(std::abs(u[k]));
        trace.sup_location.push_back(mesh.centers[k]);
    };

    // log-spaced recording times (shifted when t0 = 0)
    std::vector<double> rec;
    {
        double shift = config.t0 > 0 ? 0.0 : 1.0;
        double a = config.t0 + shift, b = config.t_end + shift;
        std::size_t m = static_cast<std::size_t>(
                            std::ceil(std::log10(b / a) * config.trace_per_decade)) + 2;
        for (double q : geomspace(a, b, std::max<std::size_t>(m, 2)))
            rec.push_back(q - shift);
    }
    std::size_t next_rec = 0;
    std::vector<double> snaps = config.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    std::size_t next_snap = 0;

    double t = config.t0;
    record(t);
    while (rec[next_rec] <= t && next_rec + 1 < rec.size()) ++next_rec;
    trace.last_valid_time = t;

    const double* wls = wl.data();
    const double* wrs = wr.data();
    while (t < config.t_end) {
        double step = std::min(dt, config.t_end - t);
        double* up = u.data();
        double* np = unew.data();
        // interior cells
        for (std::size_t i = 1; i + 1 < n; ++i) {
            double lap = wls[i] * (up[i - 1] - up[i]) + wrs[i] * (up[i + 1] - up[i]);
            np[i] = up[i] + step * (lap + std::abs(up[i]) * up[i]);
        }
        {
            double lap0 = wrs[0] * (up[1] - up[0]);
            np[0] = up[0] + step * (lap0 + std::abs(up[0]) * up[0]);
            double lapN = wls[n - 1] * (up[n - 2] - up[n - 1]) +
                          w_far * (u_far - up[n - 1]);
            np[n - 1] = up[n - 1] + step * (lapN + std::abs(up[n - 1]) * up[n - 1]);
        }
        u.swap(unew);
        t += step;

        double sup = 0;
        bool bad = false;
        for (std::size_t i = 0; i < n; ++i) {
            double a = std::abs(u[i]);
            if (!std::isfinite(a)) { bad = true; break; }
            sup = std::max(sup, a);
        }
        if (bad || sup > 1e12) {
            trace.blew_up = sup > 1e8 || !bad;
            trace.nan_abort = bad;
            break;
        }
        trace.last_valid_time = t;
        while (next_rec < rec.size() && rec[next_rec] <= t) {
            record(t);
            ++next_rec;
        }
        while (next_snap < snaps.size() && snaps[next_snap] <= t) {
            trace.fields_at.push_back({t, mesh.centers, u});
            ++next_snap;
        }
    }
    if (trace.times.empty() || trace.times.back() < trace.last_valid_time)
        record(trace.last_valid_time);

    // windowed local exponents
    trace.local_exponent.assign(trace.times.size(),
                                std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        double tc = trace.times[i];
        if (tc <= 0) continue;
        std::vector<double> xs, ys;
        for (std::size_t j = 0; j < trace.times.size(); ++j) {
            double tj = trace.times[j];
            if (tj > 0 && tj >= tc * std::pow(10.0, -0.25) &&
                tj <= tc * std::pow(10.0, 0.25) && trace.sup_norm[j] > 0) {
                xs.push_back(std::log(tj));
                ys.push_back(std::log(trace.sup_norm[j]));
            }
        }
        if (xs.size() >= 5 && xs.back() - xs.front() > 0.5 * std::log(10.0) * 0.8)
            trace.local_exponent[i] = fit_line(xs, ys).slope;
    }
    return trace;
}

ExponentFit fit_exponent(const SimTrace& trace, double t_lo, double t_hi) {
    if (!(t_hi / t_lo >= std::sqrt(10.0) * 0.999))
        throw domain_error("fit_exponent: window must span at least half a decade");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        double t = trace.times[i];
        if (t < t_lo || t > t_hi) continue;
        if (!(trace.sup_norm[i] > 0))
            throw domain_error("fit_exponent: sup norm vanishes in the window");
        xs.push_back(std::log(t));
        ys.push_back(std::log(trace.sup_norm[i]));
    }
    if (xs.size() < 4) throw domain_error("fit_exponent: too few trace points in window");
    line_fit f = fit_line(xs, ys);
    ExponentFit out;
    out.exponent = f.slope;
    out.width = f.resid_rms / (xs.back() - xs.front()) * 2.0;
    return out;
}

} // namespace glueheat
