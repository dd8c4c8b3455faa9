#include "subheat/numerics.hpp"

#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace subheat {

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  if (a == b) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
  return rule.integrate(f, a, b, std::sqrt(rel_tol));
}

double integrate_to_infinity(const std::function<double(double)>& f, double a, double rel_tol) {
  thread_local boost::math::quadrature::exp_sinh<double> rule(12);
  return rule.integrate(f, a, std::numeric_limits<double>::infinity(), std::sqrt(rel_tol));
}

double integrate_half_line(const std::function<double(double)>& f, double split, double rel_tol) {
  return integrate(f, 0.0, split, rel_tol) + integrate_to_infinity(f, split, rel_tol);
}

}  // namespace subheat
