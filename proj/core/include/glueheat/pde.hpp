#pragma once

#include <functional>
#include <vector>

namespace glueheat {

enum class FarField { SelfSimilarDirichlet, Neumann };

struct SimConfig {
    double r_max = 0;       // >= 20 sqrt(t_end)
    int n_cells = 2000;     // minimum cell count
    double t0 = 0;
    double t_end = 0;
    FarField far_field = FarField::SelfSimilarDirichlet;
    double ell = 0;         // far-field coefficient (u ~ ell / r^2)
    double cfl_safety = 0.8;
    double dr_core = 0;     // finest cell at the origin
    double grade_ratio = 1.02;
    double dr_cap = 2.0;
    int trace_per_decade = 96;
    std::vector<double> snapshot_times;

    void validate() const;
};

struct Snapshot {
    double t;
    std::vector<double> r, u;
};

struct SimTrace {
    std::vector<double> times;
    std::vector<double> sup_norm;
    std::vector<double> sup_location;
    std::vector<double> local_exponent; // windowed d log sup / d log t (NaN at ends)
    std::vector<Snapshot> fields_at;
    bool blew_up = false;
    bool nan_abort = false;
    double last_valid_time = 0;
};

struct RadialMesh {
    std::vector<double> faces;   // n+1 faces, starts at 0
    std::vector<double> centers; // n cell centers
};

RadialMesh build_mesh(const SimConfig& config);

// Second-order finite-volume method of lines for
// u_t = u_rr + (5/r) u_r + |u|u with explicit stepping.
SimTrace simulate(const SimConfig& config,
                  const std::function<double(double)>& initial);

struct ExponentFit {
    double exponent = 0;
    double width = 0; // residual-based confidence width
};

// Least-squares slope of log sup_norm vs log t on [t_lo, t_hi]
// (window must span at least half a decade).
ExponentFit fit_exponent(const SimTrace& trace, double t_lo, double t_hi);

} // namespace glueheat
