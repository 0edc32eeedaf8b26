#include "glueheat/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>

namespace glueheat {

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void BoundReport::finalize(double uniformity_limit) {
    fitted_c = 0;
    support_violation = false;
    std::map<int, double> per_decade; // floor(log10 t) -> max ratio
    for (const auto& s : samples) {
        int dec = static_cast<int>(std::floor(std::log10(s.t) + 1e-12));
        double& slot = per_decade[dec];
        if (s.rhs > 0) {
            double ratio = s.lhs / s.rhs;
            slot = std::max(slot, ratio);
            fitted_c = std::max(fitted_c, ratio);
        } else if (s.lhs > 0) {
            support_violation = true;
        }
    }
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    for (auto& [dec, c] : per_decade) {
        if (c <= 0) continue;
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    uniformity = hi > 0 ? hi / lo : 1.0;
    pass = !support_violation && uniformity < uniformity_limit;
}

void BoundReport::write_csv(std::ostream& os) const {
    os << "t,r,lhs,rhs,ratio\n";
    for (const auto& s : samples) {
        double ratio = s.rhs > 0 ? s.lhs / s.rhs
                                 : (s.lhs > 0 ? std::numeric_limits<double>::infinity() : 0.0);
        os << format_g17(s.t) << ',' << format_g17(s.r) << ',' << format_g17(s.lhs)
           << ',' << format_g17(s.rhs) << ',' << format_g17(ratio) << '\n';
    }
}

std::string BoundReport::summary_json() const {
    std::string out = "{\"name\":\"" + name + "\",\"fitted_C\":" + format_g17(fitted_c) +
                      ",\"uniformity\":" + format_g17(uniformity) +
                      ",\"support_violation\":" + (support_violation ? "true" : "false") +
                      ",\"pass\":" + (pass ? "true" : "false") + "}";
    return out;
}

void write_reports_json(std::ostream& os, const std::vector<BoundReport>& reports) {
    os << "[\n";
    for (std::size_t i = 0; i < reports.size(); ++i)
        os << "  " << reports[i].summary_json() << (i + 1 < reports.size() ? ",\n" : "\n");
    os << "]\n";
}

} // namespace glueheat
