#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "subheat/levy_exponents.hpp"
#include "subheat/random_stream.hpp"

namespace subheat {

enum class TimeChangeKind { Subordinator, InverseSubordinator };

/// A random clock: the subordinator D with exponent `exponent`, or its
/// first-passage inverse E_t = inf{u > 0 : D_u > t}.
struct TimeChangeSpec {
  LaplaceExponent exponent;
  TimeChangeKind kind = TimeChangeKind::Subordinator;
  /// Grid spacing for first-passage sampling of non-stable inverses. With
  /// `relative_grid` the spacing is grid_step * t.
  double grid_step = 1e-3;
  bool relative_grid = true;
  /// Conditional halvings of the crossing step.
  int refine_bisections = 20;
  /// Rejection trials allowed per halving before the refinement stops early.
  int refine_trials = 64;
  /// Step budget for one first-passage walk; exceeding it throws RunawaySampler.
  std::uint64_t max_grid_steps = 1'000'000'000ULL;

  void validate() const;
};

/// Variate with an importance weight; the unweighted law is recovered by
/// E[w g(value)] / E[w].
struct WeightedDraw {
  double value;
  double weight;
};

/// log A(u) in the Kanter representation S_1 = (A(U)/E)^{(1-beta)/beta} with
/// U uniform on (0,1) and E standard exponential. `eps` must equal 1 - u; it
/// is passed separately to keep precision as u approaches 1.
double kanter_log_amplitude(double beta, double u, double eps);

/// S_t for phi(s) = s^beta, by the Kanter representation (exact).
double sample_stable(double beta, double t, RandomStream& stream);

/// Tempered stable increment over time t: stable proposals accepted with
/// probability exp(-theta X); long horizons are split into chunks with
/// t theta^beta <= 1 each.
double sample_tempered(double beta, double theta, double t, RandomStream& stream);

/// Sum of independent stable draws, component i run for time w_i t.
double sample_mixed(std::span<const StableComponent> components, double t, RandomStream& stream);

double sample_subordinator(const LaplaceExponent& exp, double t, RandomStream& stream);

/// D_t drawn under a defensive importance mixture that over-samples the large
/// jumps which carry the variance of bounded, saturating functionals such as
/// min(D_t, scale). `scale` is the level at which the functional saturates.
/// Weights are bounded and have mean one.
WeightedDraw sample_subordinator_tail_weighted(const LaplaceExponent& exp, double t, double scale,
                                               RandomStream& stream);

/// E_t. Exact for stable exponents; grid first passage otherwise, reported as
/// the midpoint of the final crossing bracket.
/// Throws RunawaySampler when the grid walk exceeds spec.max_grid_steps.
double sample_inverse(const TimeChangeSpec& spec, double t, RandomStream& stream);

/// E at increasing levels along one realisation of D; the result is
/// nondecreasing. Grid spacing is taken relative to the smallest level.
std::vector<double> sample_inverse_levels(const TimeChangeSpec& spec, std::span<const double> levels,
                                          RandomStream& stream);

/// U_t for either kind.
double sample_time_change(const TimeChangeSpec& spec, double t, RandomStream& stream);

}  // namespace subheat
