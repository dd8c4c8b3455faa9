#pragma once

#include <string>
#include <vector>

#include "subheat/estimators.hpp"
#include "subheat/levy_exponents.hpp"
#include "subheat/samplers.hpp"

namespace subheat {

struct LadderPoint {
  double t;
  double statistic;
  double error;
};

struct LadderReport {
  std::vector<LadderPoint> points;  // ordered by decreasing t
  /// Fitted slope or limit, depending on the check.
  double fitted = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Built-in test functions for the small-time limit of E[f(D_t)]/t. Each is
/// bounded and O(x^gamma) at 0 with gamma above the index, so the limit
/// int f d(nu) exists.
struct TestFunction {
  enum class Kind {
    PowerExp,  // min(x,1)^gamma e^{-x}
    Zero,
    Bump,  // smooth bump supported in [lo, hi], equal to 1 at the midpoint
  };
  Kind kind = Kind::PowerExp;
  double gamma = 0.5;
  double lo = 1.0;
  double hi = 2.0;

  double operator()(double x) const;
};

/// int_0^infinity f(x) nu(dx) by quadrature.
double levy_test_integral(const LaplaceExponent& exp, const TestFunction& f);

/// Closed form of int min(x,1)^gamma e^{-x} nu(dx) for the stable exponent:
/// beta/Gamma(1-beta) [lower_gamma(gamma - beta, 1) + Gamma(-beta, 1)].
double stable_power_exp_integral(double beta, double gamma);

/// E[f(D_t)]/t along the ladder against int f d(nu). Passes when the final
/// point is within max(4 stderr, rel_tol * |target|) (absolute 1e-12 for a
/// zero target). Throws DomainError if f violates the integrability
/// hypothesis (gamma <= index).
LadderReport check_levy_convergence(const LaplaceExponent& exp, const TestFunction& f,
                                    const std::vector<double>& t_ladder, const RunOptions& run,
                                    double rel_tol = 0.02);

/// Slope of log(-log P(D_delta <= x)) against log(1/x) over the ladder of x
/// values, target beta/(1-beta) for the leading index. Probabilities are
/// estimated by conditioning every stable component to stay below x, so they
/// remain resolvable far into the rare-event range.
LadderReport check_small_ball(const LaplaceExponent& exp, double delta, const std::vector<double>& x_ladder,
                              const RunOptions& run, double slope_tol = 0.1);

struct SmallBallEstimate {
  double log_probability;
  double relative_error;  // of the probability itself
};

/// log P(D_delta <= x) by the conditional estimator above.
SmallBallEstimate small_ball_probability(const LaplaceExponent& exp, double delta, double x,
                                         const RunOptions& run);

/// Histogram estimate of the density of D_t on bins between consecutive
/// x_grid values, divided by t x^{-1} phi(1/x) at the bin's geometric centre.
/// One point per t holds the largest ratio; the check passes when all maxima
/// are finite and agree within a factor of two. Empty bins count as zero.
LadderReport check_heat_kernel_bound(const LaplaceExponent& exp, const std::vector<double>& t_values,
                                     const std::vector<double>& x_grid, const RunOptions& run);

/// Per-bin ratios for one t, exposed for profile checks.
std::vector<LadderPoint> heat_kernel_ratio_profile(const LaplaceExponent& exp, double t,
                                                   const std::vector<double>& x_grid, const RunOptions& run);

struct InverseMomentReport {
  LadderReport moments;    // E[E_t^p] phi(1/t)^p
  LadderReport truncated;  // E[E_t^p 1{E_t <= delta}] phi(1/t)^p
};

/// E[E_t^p] phi(1/t)^p along the ladder against Gamma(p+1)/Gamma(p beta + 1).
/// Passes when the final point is within max(4 stderr, rel_tol) of the target
/// and the truncated statistic agrees with the full one to rel_tol.
InverseMomentReport check_inverse_moments(const TimeChangeSpec& spec, double p,
                                          const std::vector<double>& t_ladder, const RunOptions& run,
                                          double delta = 1.0, double rel_tol = 0.02);

}  // namespace subheat
