#pragma once

#include <string>
#include <vector>

namespace glueheat::acceptance {

struct CriterionResult {
    std::string name;
    bool pass = false;
    bool exploratory = false; // reported, and known to probe beyond what the
                              // construction guarantees (see README)
    double seconds = 0;
    std::string details;
};

struct Options {
    std::string artifact_dir;       // when nonempty, reports are written there
    std::vector<std::string> only;  // subset of criterion names to run
};

std::vector<std::string> criterion_names();

// Runs the acceptance criteria (all, or the requested subset) and returns
// one result per criterion, in canonical order.
std::vector<CriterionResult> run(const Options& opt = {});

} // namespace glueheat::acceptance
