#pragma once

#include <optional>
#include <string>
#include <vector>

#include "subheat/heat_oracles.hpp"
#include "subheat/levy_exponents.hpp"
#include "subheat/samplers.hpp"

namespace subheat {

enum class RateKind {
  PowerInverseTwiceBeta,  // t^{1/(2 beta)}
  TLogInverseT,           // t log(1/t)
  Linear,                 // t
  PhiInverseSqrt,         // phi^{-1}(1/t)^{-1/2}
  PhiSqrt,                // phi(1/t)^{-1/2}
  PowerHalfBeta,          // t^{beta/2}
};

/// A rate function R(t) on (0,1). The phi-based kinds carry their exponent.
struct RateFunction {
  RateKind kind;
  double beta = 0.5;
  std::optional<LaplaceExponent> exponent;

  double operator()(double t) const;
  std::string name() const;
};

struct AsymptoticPrediction {
  RateFunction rate;
  double constant;
  /// Which limit the prediction comes from, e.g. "subordinator/high-index".
  std::string theorem_tag;
};

/// E[(S_1)^gamma] for the beta-stable subordinator: Gamma(1 - gamma/beta) / Gamma(1 - gamma).
/// Finite exactly when gamma < beta.
double stable_moment(double beta, double gamma);

/// E[E_1^p] for the inverse beta-stable subordinator: Gamma(p+1) / Gamma(p beta + 1).
double inverse_moment(double beta, double p);

enum class RunningMaxKind { Stable, Inverse };

/// E[sup_{u <= U_1} W_u] for W with generator Delta (variance 2u) run up to
/// the random horizon U_1.
double running_max_constant(RunningMaxKind kind, double beta);

/// c(d, a) = a Gamma((d+a)/2) / (2^{1-a} pi^{d/2} Gamma(1 - a/2)), the
/// normalising constant of the a-stable jump kernel c / |x-y|^{d+a}.
double stable_kernel_constant(int d, double a);

/// Nonlocal perimeter of (0, L) for W time-changed by a beta-stable
/// subordinator. W o S is (2 beta)-stable, so the kernel index is 2 beta.
double stable_interval_perimeter(double beta, double length);

/// int_0^infinity (|Omega| - Q^W(u)) nu(du) on an interval.
double low_index_spectral_constant(const LaplaceExponent& exp, const Interval& dom);

/// int_0^infinity H^W_{Omega,Omega^c}(u) nu(du) on an interval, which equals
/// the nonlocal perimeter of the interval for W o D.
double low_index_regular_constant(const LaplaceExponent& exp, const Interval& dom);

/// Small-time prediction for |Omega| - Q(t).
/// Throws UnsupportedConfiguration where no limit is available.
AsymptoticPrediction predict_spectral(const LaplaceExponent& exp, const Domain& dom, TimeChangeKind kind);

/// Small-time prediction for H_{Omega,Omega^c}(t).
AsymptoticPrediction predict_regular(const LaplaceExponent& exp, const Domain& dom, TimeChangeKind kind);

struct ExpansionTerm {
  double coefficient;
  double exponent;  // of t
};

/// Maps a Brownian small-time expansion |Omega| - Q^W(t) ~ sum c_n t^{n/2}
/// to the one for the inverse beta-stable clock:
/// c_n Gamma(1 + n/2) / Gamma(1 + n beta/2) t^{n beta/2}.
std::vector<ExpansionTerm> expansion(double beta, const std::vector<double>& coefficients);

struct LadderSample {
  double t;
  double value;  // the decaying quantity at t
  double std_error;
};

struct FitReport {
  std::vector<double> ratios;
  std::vector<double> ratio_errors;
  /// Intercept of a least-squares line through (t^correction_power, ratio).
  double extrapolated;
  /// |final ratio / constant - 1|.
  double final_deviation;
  /// |extrapolated / constant - 1|.
  double extrapolated_deviation;
  bool pass;
};

/// Divides each sample by the prediction's rate and compares with its
/// constant. Samples must hold the decaying quantity (|Omega| - Q or H),
/// at least three points with strictly decreasing t. The final point passes
/// if its ratio is within max(tolerance * constant, 4 * stderr) of the
/// constant. The extrapolation assumes a first correction in t^correction_power
/// and is reported as a diagnostic only.
FitReport fit_rate(const std::vector<LadderSample>& samples, const AsymptoticPrediction& prediction,
                   double tolerance, double correction_power = 0.5);

}  // namespace subheat
