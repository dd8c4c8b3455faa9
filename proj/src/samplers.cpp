#include "subheat/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "subheat/errors.hpp"

namespace subheat {
namespace {

constexpr double pi = std::numbers::pi;

double kanter_log_s1(double beta, double u, double eps, double e) {
  return (1.0 - beta) / beta * (kanter_log_amplitude(beta, u, eps) - std::log(e));
}

double stable_unit(double beta, RandomStream& stream) {
  if (beta == 0.5) {
    // Levy distribution: S_1 = 1 / (2 Z^2) under E exp(-s S_1) = exp(-sqrt(s)).
    const double z = stream.normal();
    return 0.5 / (z * z);
  }
  const double eps = stream.uniform();
  const double e = stream.exponential();
  return std::exp(kanter_log_s1(beta, 1.0 - eps, eps, e));
}

// Defensive mixture on one Kanter coordinate: half the mass from the nominal
// law, half log-uniform on [lo, 1]. Returns the likelihood ratio p/q.
struct LogUniformMixture {
  double log_lo;  // log of the lower end, negative

  double draw(RandomStream& stream, double nominal_draw) const {
    if (stream.uniform() < 0.5) return nominal_draw;
    return std::exp(log_lo * stream.uniform());
  }
  double log_uniform_density(double x) const {
    return (x >= std::exp(log_lo) && x <= 1.0) ? 1.0 / (x * -log_lo) : 0.0;
  }
};

WeightedDraw stable_unit_tail_weighted(double beta, double s_star, RandomStream& stream) {
  // Large S_1 comes from 1 - U of order S_1^{-beta} or from E of order
  // S_1^{-beta/(1-beta)}. Cover both down to a millionth of the level that
  // reaches s_star.
  const double lo_eps = std::max(1e-300, 1e-6 * std::min(1.0, std::pow(s_star, -beta)));
  const double lo_e =
      std::max(1e-300, 1e-6 * std::min(1.0, std::pow(s_star, -beta / (1.0 - beta))));
  const LogUniformMixture eps_mix{std::log(lo_eps)};
  const LogUniformMixture e_mix{std::log(lo_e)};

  const double eps = eps_mix.draw(stream, stream.uniform());
  const double e = e_mix.draw(stream, stream.exponential());

  const double q_eps = 0.5 + 0.5 * eps_mix.log_uniform_density(eps);
  const double p_e = std::exp(-e);
  const double q_e = 0.5 * p_e + 0.5 * e_mix.log_uniform_density(e);
  return {std::exp(kanter_log_s1(beta, 1.0 - eps, eps, e)), p_e / (q_eps * q_e)};
}

WeightedDraw stable_tail_weighted(double beta, double t, double scale, RandomStream& stream) {
  const double time_scale = std::pow(t, 1.0 / beta);
  const auto unit = stable_unit_tail_weighted(beta, scale / time_scale, stream);
  return {time_scale * unit.value, unit.weight};
}

/// Increments of D over a fixed time step, drawn in sequence. For tempered
/// exponents with short steps the acceptance test of the rejection sampler is
/// run against a single exponential clock: a proposal X is rejected exactly
/// when the accumulated theta X overruns the clock, which by memorylessness is
/// an independent event of probability 1 - exp(-theta X) per proposal.
class IncrementStream {
 public:
  IncrementStream(const LaplaceExponent& exp, double step, RandomStream& stream)
      : exp_(exp), step_(step), stream_(stream) {
    if (const auto* ts = std::get_if<TemperedStable>(&exp.variant())) {
      tempered_ = ts;
      thinned_ = step * std::pow(ts->theta, ts->beta) <= 1.0;
      scale_ = std::pow(step, 1.0 / ts->beta);
      clock_ = stream.exponential();
    }
  }

  double next() {
    if (tempered_ == nullptr || !thinned_) return sample_subordinator(exp_, step_, stream_);
    while (true) {
      const double x = scale_ * stable_unit(tempered_->beta, stream_);
      const double cost = tempered_->theta * x;
      if (cost < clock_) {
        clock_ -= cost;
        return x;
      }
      clock_ = stream_.exponential();
    }
  }

 private:
  const LaplaceExponent& exp_;
  double step_;
  RandomStream& stream_;
  const TemperedStable* tempered_ = nullptr;
  bool thinned_ = false;
  double scale_ = 0.0;
  double clock_ = 0.0;
};

double grid_step_for(const TimeChangeSpec& spec, double t) {
  return spec.relative_grid ? spec.grid_step * t : spec.grid_step;
}

[[noreturn]] void runaway(double t, double step, std::uint64_t budget) {
  throw RunawaySampler("first-passage walk above level " + std::to_string(t) + " with step " +
                       std::to_string(step) + " exceeded " + std::to_string(budget) +
                       " steps");
}

}  // namespace

double kanter_log_amplitude(double beta, double u, double eps) {
  const double num = beta * std::log(std::sin(beta * pi * u)) +
                     (1.0 - beta) * std::log(std::sin((1.0 - beta) * pi * u));
  return (num - std::log(std::sin(pi * eps))) / (1.0 - beta);
}

void TimeChangeSpec::validate() const {
  if (!(grid_step > 0.0) || !std::isfinite(grid_step)) throw DomainError("grid_step must be positive");
  if (refine_bisections < 0) throw DomainError("refine_bisections must be nonnegative");
  if (refine_trials < 1) throw DomainError("refine_trials must be positive");
  if (max_grid_steps < 1) throw DomainError("max_grid_steps must be positive");
}

double sample_stable(double beta, double t, RandomStream& stream) {
  return std::pow(t, 1.0 / beta) * stable_unit(beta, stream);
}

double sample_tempered(double beta, double theta, double t, RandomStream& stream) {
  const double mass = t * std::pow(theta, beta);
  const auto chunks = static_cast<long>(std::max(1.0, std::ceil(mass)));
  const double chunk_t = t / static_cast<double>(chunks);
  double sum = 0.0;
  for (long c = 0; c < chunks; ++c) {
    while (true) {
      const double x = sample_stable(beta, chunk_t, stream);
      if (stream.exponential() > theta * x) {
        sum += x;
        break;
      }
    }
  }
  return sum;
}

double sample_mixed(std::span<const StableComponent> components, double t, RandomStream& stream) {
  double sum = 0.0;
  for (const auto& c : components) sum += sample_stable(c.beta, c.weight * t, stream);
  return sum;
}

double sample_subordinator(const LaplaceExponent& exp, double t, RandomStream& stream) {
  if (const auto* st = std::get_if<Stable>(&exp.variant())) return sample_stable(st->beta, t, stream);
  if (const auto* ts = std::get_if<TemperedStable>(&exp.variant())) {
    return sample_tempered(ts->beta, ts->theta, t, stream);
  }
  return sample_mixed(std::get<MixedStable>(exp.variant()).components, t, stream);
}

WeightedDraw sample_subordinator_tail_weighted(const LaplaceExponent& exp, double t, double scale,
                                               RandomStream& stream) {
  if (const auto* st = std::get_if<Stable>(&exp.variant())) {
    return stable_tail_weighted(st->beta, t, scale, stream);
  }
  if (const auto* ts = std::get_if<TemperedStable>(&exp.variant())) {
    const double mass = t * std::pow(ts->theta, ts->beta);
    if (mass > 1.0) return {sample_tempered(ts->beta, ts->theta, t, stream), 1.0};
    // Exponential tilt of the stable law: d(tempered)/d(stable) = exp(-theta x + t theta^beta).
    const auto draw = stable_tail_weighted(ts->beta, t, scale, stream);
    return {draw.value, draw.weight * std::exp(mass - ts->theta * draw.value)};
  }
  WeightedDraw total{0.0, 1.0};
  for (const auto& c : std::get<MixedStable>(exp.variant()).components) {
    const auto draw = stable_tail_weighted(c.beta, c.weight * t, scale, stream);
    total.value += draw.value;
    total.weight *= draw.weight;
  }
  return total;
}

double sample_inverse(const TimeChangeSpec& spec, double t, RandomStream& stream) {
  if (!(t > 0.0)) throw DomainError("inverse subordinator level must be positive");
  if (const auto* st = std::get_if<Stable>(&spec.exponent.variant())) {
    // {E_t <= x} = {D_x >= t} and D_x = x^{1/beta} S_1 give E_t = (t / S_1)^beta.
    return std::pow(t / stable_unit(st->beta, stream), st->beta);
  }

  const double step = grid_step_for(spec, t);
  IncrementStream increments(spec.exponent, step, stream);
  double below = 0.0;  // D at the left end of the current step
  std::uint64_t steps = 0;
  while (true) {
    const double x = increments.next();
    if (below + x > t) break;
    below += x;
    if (++steps >= spec.max_grid_steps) runaway(t, step, spec.max_grid_steps);
  }

  // Conditional halving: the crossing step X_h is distributed as an
  // increment conditioned on X_h > t - below. Splitting it into two
  // independent half-steps conditioned on the same event and keeping the half
  // that crosses preserves that structure at half the width. Each split is
  // drawn by plain rejection; when the trial budget runs out the bracket found
  // so far is kept, so the result is never biased by the stopping rule beyond
  // the width of the current bracket.
  double left = static_cast<double>(steps) * step;
  double width = step;
  double gap = t - below;
  for (int level = 0; level < spec.refine_bisections; ++level) {
    const double half = 0.5 * width;
    bool split = false;
    for (int trial = 0; trial < spec.refine_trials && !split; ++trial) {
      const double x1 = sample_subordinator(spec.exponent, half, stream);
      const double x2 = sample_subordinator(spec.exponent, half, stream);
      if (x1 + x2 <= gap) continue;
      split = true;
      if (x1 <= gap) {
        gap -= x1;
        left += half;
      }
    }
    if (!split) break;
    width = half;
  }
  return left + 0.5 * width;
}

std::vector<double> sample_inverse_levels(const TimeChangeSpec& spec, std::span<const double> levels,
                                          RandomStream& stream) {
  if (levels.empty()) return {};
  if (!std::is_sorted(levels.begin(), levels.end()) || !(levels.front() > 0.0)) {
    throw DomainError("levels must be positive and nondecreasing");
  }
  std::vector<double> out(levels.size());
  if (const auto* st = std::get_if<Stable>(&spec.exponent.variant())) {
    const double s1 = stable_unit(st->beta, stream);
    for (std::size_t i = 0; i < levels.size(); ++i) out[i] = std::pow(levels[i] / s1, st->beta);
    return out;
  }

  const double step = grid_step_for(spec, levels.front());
  IncrementStream increments(spec.exponent, step, stream);
  double below = 0.0;
  double x = increments.next();
  std::uint64_t steps = 0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    while (below + x <= levels[i]) {
      below += x;
      x = increments.next();
      if (++steps >= spec.max_grid_steps) runaway(levels[i], step, spec.max_grid_steps);
    }
    out[i] = (static_cast<double>(steps) + 0.5) * step;
  }
  return out;
}

double sample_time_change(const TimeChangeSpec& spec, double t, RandomStream& stream) {
  if (spec.kind == TimeChangeKind::InverseSubordinator) return sample_inverse(spec, t, stream);
  return sample_subordinator(spec.exponent, t, stream);
}

}  // namespace subheat
