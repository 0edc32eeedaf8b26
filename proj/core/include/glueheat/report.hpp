#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace glueheat {

// One verified pointwise inequality: samples of LHS/RHS over a space-time
// sweep, the fitted constant, and a per-decade uniformity diagnostic.
struct BoundReport {
    struct Sample {
        double t, r, lhs, rhs;
    };

    std::string name;
    std::vector<Sample> samples;
    double fitted_c = 0;    // max lhs/rhs over samples with rhs > 0
    double uniformity = 1;  // max/min of per-decade fitted constants
    bool support_violation = false; // lhs > 0 where rhs == 0
    bool pass = false;

    // fills fitted_c / uniformity / pass from the samples
    void finalize(double uniformity_limit = 3.0);

    void write_csv(std::ostream& os) const;
    std::string summary_json() const;
};

void write_reports_json(std::ostream& os, const std::vector<BoundReport>& reports);

// 17-significant-digit float formatting used by every CSV/JSON writer.
std::string format_g17(double v);

} // namespace glueheat
