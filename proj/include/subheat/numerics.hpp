#pragma once

#include <functional>

namespace subheat {

/// Integral of f over [a, b]; tolerates integrable endpoint singularities.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12);

/// Integral of f over [a, infinity).
double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             double rel_tol = 1e-12);

/// Integral over (0, infinity) split at `split`; the singular piece near 0 and
/// the tail are handled separately.
double integrate_half_line(const std::function<double(double)>& f, double split = 1.0,
                           double rel_tol = 1e-12);

}  // namespace subheat
