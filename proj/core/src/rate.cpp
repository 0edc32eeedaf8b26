#include "glueheat/rate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "glueheat/errors.hpp"
#include "glueheat/util.hpp"

namespace glueheat {

// Fritsch-Carlson monotone cubic on (x, y) with x increasing.
struct RateFunction::Table {
    std::vector<double> x, y, d; // d = node slopes
    double t_lo, t_hi, v_lo, v_hi;

    Table(std::vector<double> xs, std::vector<double> ys, double tl, double th,
          double vl, double vh)
        : x(std::move(xs)), y(std::move(ys)), t_lo(tl), t_hi(th), v_lo(vl), v_hi(vh) {
        const std::size_t n = x.size();
        std::vector<double> del(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i)
            del[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        d.assign(n, 0.0);
        d[0] = del[0];
        d[n - 1] = del[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (del[i - 1] * del[i] <= 0) {
                d[i] = 0;
            } else {
                double w1 = 2 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
                double w2 = (x[i + 1] - x[i]) + 2 * (x[i] - x[i - 1]);
                d[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
            }
        }
    }

    std::size_t seg(double xx) const {
        auto it = std::upper_bound(x.begin(), x.end(), xx);
        std::size_t j = static_cast<std::size_t>(it - x.begin());
        return std::clamp<std::size_t>(j, 1, x.size() - 1) - 1;
    }

    double operator()(double xx) const {
        std::size_t j = seg(xx);
        double h = x[j + 1] - x[j], u = (xx - x[j]) / h;
        double u2 = u * u, u3 = u2 * u;
        return y[j] * (2 * u3 - 3 * u2 + 1) + y[j + 1] * (-2 * u3 + 3 * u2) +
               h * (d[j] * (u3 - 2 * u2 + u) + d[j + 1] * (u3 - u2));
    }

    double prime(double xx) const {
        std::size_t j = seg(xx);
        double h = x[j + 1] - x[j], u = (xx - x[j]) / h;
        double u2 = u * u;
        return (y[j] * (6 * u2 - 6 * u) + y[j + 1] * (-6 * u2 + 6 * u)) / h +
               d[j] * (3 * u2 - 4 * u + 1) + d[j + 1] * (3 * u2 - 2 * u);
    }
};

double RateFunction::default_t_floor() { return std::exp(std::exp(1.0)); }

RateFunction RateFunction::log_t(double t_floor) {
    RateFunction r;
    r.kind_ = RateKind::Log;
    r.t_floor_ = t_floor;
    return r;
}

RateFunction RateFunction::sqrt_log(double t_floor) {
    RateFunction r;
    r.kind_ = RateKind::SqrtLog;
    r.t_floor_ = t_floor;
    return r;
}

RateFunction RateFunction::sqrt_log_loglog(double t_floor) {
    RateFunction r;
    r.kind_ = RateKind::SqrtLogLogLog;
    r.t_floor_ = std::max(t_floor, std::exp(std::exp(1.0)));
    return r;
}

RateFunction RateFunction::const_plus_log(double c, double t_floor) {
    if (c < 0) throw domain_error("RateFunction: blend constant must be >= 0");
    RateFunction r;
    r.kind_ = RateKind::ConstPlusLog;
    r.const_c_ = c;
    r.t_floor_ = t_floor;
    return r;
}

RateFunction RateFunction::from_table(std::vector<double> t, std::vector<double> R) {
    if (t.size() != R.size() || t.size() < 2)
        throw domain_error("RateFunction: table needs >= 2 rows");
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
        if (!(t[i] < t[i + 1]))
            throw domain_error("RateFunction: table times must increase");
    for (double v : R)
        if (!(v > 0)) throw domain_error("RateFunction: table values must be positive");
    RateFunction r;
    r.kind_ = RateKind::Table;
    r.t_floor_ = t.front();
    std::vector<double> lt(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) lt[i] = std::log(t[i]);
    r.table_ = std::make_shared<Table>(std::move(lt), std::vector<double>(R), t.front(),
                                       t.back(), R.front(), R.back());
    return r;
}

RateFunction RateFunction::parse(const std::string& spec) {
    if (spec == "log") return log_t();
    if (spec == "sqrtlog") return sqrt_log();
    if (spec == "sqrtlogloglog") return sqrt_log_loglog();
    if (spec.rfind("constpluslog:", 0) == 0)
        return const_plus_log(std::stod(spec.substr(13)));
    throw domain_error("RateFunction: unknown kind '" + spec + "'");
}

std::string RateFunction::name() const {
    switch (kind_) {
        case RateKind::Log: return "log";
        case RateKind::SqrtLog: return "sqrtlog";
        case RateKind::SqrtLogLogLog: return "sqrtlogloglog";
        case RateKind::ConstPlusLog: return "constpluslog";
        case RateKind::Table: return "table";
    }
    return "?";
}

double RateFunction::value(double t) const {
    switch (kind_) {
        case RateKind::Log: return std::log(std::max(t, t_floor_));
        case RateKind::SqrtLog: return std::sqrt(std::log(std::max(t, t_floor_)));
        case RateKind::SqrtLogLogLog: {
            double lt = std::log(std::max(t, t_floor_));
            return std::sqrt(lt * std::log(lt));
        }
        case RateKind::ConstPlusLog:
            return const_c_ + std::log(std::max(t, t_floor_));
        case RateKind::Table: {
            if (t <= table_->t_lo) return table_->v_lo;
            if (t >= table_->t_hi) return table_->v_hi;
            return (*table_)(std::log(t));
        }
    }
    return 0;
}

double RateFunction::derivative(double t) const {
    if (t < t_floor_) return 0.0;
    switch (kind_) {
        case RateKind::Log: return 1.0 / t;
        case RateKind::SqrtLog: return 1.0 / (2.0 * t * value(t));
        case RateKind::SqrtLogLogLog: {
            double lt = std::log(t);
            return (std::log(lt) + 1.0) / (2.0 * t * value(t));
        }
        case RateKind::ConstPlusLog: return 1.0 / t;
        case RateKind::Table: {
            if (t <= table_->t_lo || t >= table_->t_hi) return 0.0;
            return table_->prime(std::log(t)) / t;
        }
    }
    return 0;
}

AdmissibilityReport check_rate_admissible(const RateFunction& R, double t_lo,
                                          double t_hi, int points_per_decade) {
    if (!(t_lo > std::exp(1.0)))
        throw domain_error("check_rate_admissible: t_lo must exceed e");
    if (!(t_hi > t_lo)) throw domain_error("check_rate_admissible: t_hi <= t_lo");

    AdmissibilityReport rep;
    std::size_t n = static_cast<std::size_t>(
                        std::ceil(std::log10(t_hi / t_lo) * points_per_decade)) + 1;
    auto ts = geomspace(t_lo, t_hi, std::max<std::size_t>(n, 2));

    double cbar = 0;
    for (double t : ts) {
        double v = R.value(t), d = R.derivative(t);
        if (!(v > 0)) {
            rep.reason = "R not positive on the scan";
            return rep;
        }
        if (d < 0) {
            rep.derivative_nonneg = false;
            rep.reason = "R' negative on the scan";
            return rep;
        }
        cbar = std::max(cbar, d / v * t * std::log(t));
    }
    rep.c_bar = cbar;

    // derived subpolynomial bound R(t) <= R(t_lo) (log t / log t_lo)^cbar;
    // freezing below t_floor only helps, so scan the raw bound
    double worst = 0;
    double v0 = R.value(t_lo), l0 = std::log(t_lo);
    for (double t : ts)
        worst = std::max(worst, R.value(t) / (v0 * std::pow(std::log(t) / l0, cbar)));
    rep.subpoly_max_ratio = worst;

    // divergence proxy: the scan must actually grow (a constant table fails)
    rep.diverges = R.value(t_hi) > R.value(std::max(t_lo, R.t_floor())) * 1.01 ||
                   R.kind() != RateKind::Table;
    if (R.kind() == RateKind::Table && !rep.diverges) {
        rep.reason = "table does not grow over the scan (R -> infinity required)";
        rep.admissible = false;
        return rep;
    }

    rep.admissible = rep.derivative_nonneg && rep.diverges &&
                     rep.subpoly_max_ratio < 1.0 + 1e-6;
    if (!rep.admissible && rep.reason.empty())
        rep.reason = "subpolynomial growth bound violated";
    return rep;
}

} // namespace glueheat
