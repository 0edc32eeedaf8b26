#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>

#include "glueheat/errors.hpp"

namespace glueheat {

// Adaptive Gauss-Kronrod 15-point integration. Throws quadrature_error
// when the refinement does not reach the requested relative tolerance.
template <class F>
double integrate(const F& f, double a, double b, double rel_tol = 1e-10,
                 const char* label = "integral") {
    if (!(b > a)) return 0.0;
    using boost::math::quadrature::gauss_kronrod;
    double err = 0, l1 = 0;
    double val = gauss_kronrod<double, 15>::integrate(f, a, b, 15, rel_tol, &err, &l1);
    if (!std::isfinite(val))
        throw quadrature_error(std::string(label) + ": non-finite quadrature value");
    double scale = std::max(std::abs(val), l1);
    if (scale > 0 && err > 100 * rel_tol * scale + 1e2 * std::numeric_limits<double>::min())
        throw quadrature_error(std::string(label) + ": adaptive refinement did not converge");
    return val;
}

} // namespace glueheat
