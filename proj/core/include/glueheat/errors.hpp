#pragma once

#include <stdexcept>
#include <string>

namespace glueheat {

// Invalid parameters or out-of-domain arguments (CLI exit code 3).
struct domain_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A numeric routine failed to converge or produced non-finite state
// (CLI exit code 4).
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct quadrature_error : numeric_error {
    using numeric_error::numeric_error;
};

struct integration_diverged : numeric_error {
    integration_diverged(const std::string& what, double last_valid)
        : numeric_error(what), last_valid_point(last_valid) {}
    double last_valid_point;
};

struct bracket_failure : numeric_error {
    using numeric_error::numeric_error;
};

struct no_contraction : numeric_error {
    using numeric_error::numeric_error;
};

struct scale_collapse : numeric_error {
    using numeric_error::numeric_error;
};

} // namespace glueheat
