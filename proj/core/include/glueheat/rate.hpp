#pragma once

#include <memory>
#include <string>
#include <vector>

namespace glueheat {

enum class RateKind { Log, SqrtLog, SqrtLogLogLog, ConstPlusLog, Table };

// Cutoff-scale function R(t): positive, nondecreasing, subpolynomial.
// Values are frozen at t_floor below t_floor so every kind is defined
// (and C^0) down to t = 0.
class RateFunction {
public:
    static RateFunction log_t(double t_floor = default_t_floor());
    static RateFunction sqrt_log(double t_floor = default_t_floor());
    static RateFunction sqrt_log_loglog(double t_floor = default_t_floor());
    static RateFunction const_plus_log(double c, double t_floor = default_t_floor());
    // rows (t, R) with t increasing; monotone interpolation in log t,
    // frozen outside the table range
    static RateFunction from_table(std::vector<double> t, std::vector<double> R);
    static RateFunction parse(const std::string& spec); // "log", "sqrtlog", ...

    double value(double t) const;
    double derivative(double t) const;
    double t_floor() const { return t_floor_; }
    RateKind kind() const { return kind_; }
    std::string name() const;

    // e^e: for R = sqrt(log t) the frozen head of int_1^t ds/(s R^2)
    // then contributes exactly log log t_floor
    static double default_t_floor();

private:
    RateKind kind_ = RateKind::Log;
    double t_floor_ = 0;
    double const_c_ = 0;
    struct Table;
    std::shared_ptr<const Table> table_;
};

struct AdmissibilityReport {
    bool admissible = false;
    double c_bar = 0;             // minimal C with R'/R <= C/(t log t) on the scan
    double subpoly_max_ratio = 0; // max of R(t) / (R(t_lo) (log t)^c_bar)
    bool derivative_nonneg = true;
    bool diverges = true; // R(t) -> infinity proxy over the scan
    std::string reason;
};

AdmissibilityReport check_rate_admissible(const RateFunction& R, double t_lo,
                                          double t_hi, int points_per_decade = 32);

} // namespace glueheat
